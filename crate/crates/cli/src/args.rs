use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "tkmerge", version, about = "Robust clustering by trimming and merging components")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit tk-merge or TC-merge to a CSV file.
    Fit {
        input: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Sweep trimming levels and pick one from partition stability.
    Monitor {
        input: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Replicate a synthetic scenario and compare tk-merge, tk-means and TCLUST.
    Simulate {
        #[command(flatten)]
        opts: Opts,
    },
    /// Time the methods over increasing sample sizes.
    Bench {
        #[command(flatten)]
        opts: Opts,
    },
    /// Print the adjusted Rand index between two label files.
    Eval { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// JSON configuration; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ground-truth labels (0 = contaminant) for scoring.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// First-step method: tkm or tc.
    #[arg(long)]
    pub method: Option<String>,
    /// Number of final groups.
    #[arg(long = "K")]
    pub big_k: Option<usize>,
    /// Number of first-step components.
    #[arg(long)]
    pub k: Option<usize>,
    /// 2logn, logn or 2Klogn.
    #[arg(long)]
    pub k_heuristic: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Eigenvalue restriction factor.
    #[arg(long)]
    pub r: Option<f64>,
    /// single, complete or average.
    #[arg(long)]
    pub linkage: Option<String>,
    /// euclid or demp.
    #[arg(long)]
    pub metric: Option<String>,
    /// Descending trimming levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// consecutive, smallest_alpha or ground_truth.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub drop_threshold: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_starts: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Monte-Carlo draws per component for the demp metric.
    #[arg(long)]
    pub n_mc: Option<usize>,
    /// s1, s2, s3a, s3b or s3c.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Sample-size scale in (0, 1].
    #[arg(long)]
    pub scale: Option<f64>,
    /// Scenario grid level.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Ascending clean sample sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

impl Opts {
    pub fn to_config(&self, input: Option<PathBuf>) -> RunConfig {
        RunConfig {
            command: None,
            input,
            out: self.out.clone(),
            truth: self.truth.clone(),
            method: self.method.clone(),
            big_k: self.big_k,
            k: self.k,
            k_heuristic: self.k_heuristic.clone(),
            alpha: self.alpha,
            r: self.r,
            linkage: self.linkage.clone(),
            metric: self.metric.clone(),
            grid: self.grid.clone(),
            target: self.target.clone(),
            drop_threshold: self.drop_threshold,
            seed: self.seed,
            n_starts: self.n_starts,
            max_iter: self.max_iter,
            tol: self.tol,
            n_mc: self.n_mc,
            scenario: self.scenario.clone(),
            scale: self.scale,
            level: self.level,
            reps: self.reps,
            sizes: self.sizes.clone(),
            jobs: self.jobs,
            svg: self.svg.then_some(true),
        }
    }
}
