use std::fmt::Write as _;

use rayon::prelude::*;
use tkmerge::datagen::scenario_sized;
use tkmerge::metrics::{ari_labels, median};
use tkmerge::percentage_gain;
use tkmerge::rng::derive_seed;

use super::write_echo;
use crate::compare::{self, Contender, Settings};
use crate::config::RunConfig;
use crate::csvio::{self, fmt_num};
use crate::error::{CliError, Result};

pub fn run(cfg: &RunConfig) -> Result<String> {
    let id = cfg.scenario()?;
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![1000, 2000]);
    let reps = cfg.reps.unwrap_or(3);
    let level = cfg.level.unwrap_or(0);
    if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) || sizes[0] == 0 {
        return Err(CliError::config("--sizes must be positive and strictly ascending"));
    }
    if reps == 0 {
        return Err(CliError::config("--reps must be at least 1"));
    }
    if level >= id.n_levels() {
        return Err(CliError::config(format!("scenario {id} has {} levels", id.n_levels())));
    }
    let settings = Settings::from_config(cfg)?;
    let base = cfg.seed();

    let cells: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| (1..=reps).map(move |rep| (n, rep))).collect();
    let timed: Vec<Result<Vec<(f64, f64)>>> = cells
        .par_iter()
        .map(|&(n, rep)| {
            let seed = derive_seed(derive_seed(base, n as u64), rep as u64);
            let ds = scenario_sized(id, level, n, seed)?;
            Contender::ALL
                .iter()
                .map(|&c| {
                    let o = compare::run(c, id, &ds, &settings, seed)?;
                    Ok((o.wall_s, ari_labels(o.partition.labels(), ds.truth.labels())?))
                })
                .collect()
        })
        .collect();

    let mut timing = String::from("method,n,rep,wall_s,ari,gain_vs_tclust_pct\n");
    let mut gains = vec![vec![Vec::new(); sizes.len()]; 3];
    let mut times = vec![vec![Vec::new(); sizes.len()]; 3];
    for (&(n, rep), cell) in cells.iter().zip(timed) {
        let cell = cell?;
        let s = sizes.iter().position(|&x| x == n).expect("size from the list");
        let t_ref = cell[2].0;
        for (m, (c, &(t, a))) in Contender::ALL.iter().zip(&cell).enumerate() {
            let g = percentage_gain(t, t_ref);
            gains[m][s].push(g);
            times[m][s].push(t);
            let _ = writeln!(timing, "{c},{n},{rep},{},{},{}", fmt_num(t), fmt_num(a), fmt_num(g));
        }
    }
    let dir = cfg.out_dir();
    csvio::ensure_dir(&dir)?;
    csvio::write(&dir, "timing.csv", &timing)?;

    let mut summary = String::from("method,n,median_wall_s,median_gain_vs_tclust_pct,faster_than_tclust\n");
    for (m, c) in Contender::ALL.iter().enumerate() {
        for (s, n) in sizes.iter().enumerate() {
            let t = median(&times[m][s])?;
            let t_ref = median(&times[2][s])?;
            let _ = writeln!(
                summary,
                "{c},{n},{},{},{}",
                fmt_num(t),
                fmt_num(median(&gains[m][s])?),
                t < t_ref
            );
        }
    }
    csvio::write(&dir, "bench_summary.csv", &summary)?;

    let echo = RunConfig {
        out: Some(dir.clone()),
        scenario: Some(id.to_string()),
        sizes: Some(sizes),
        reps: Some(reps),
        level: Some(level),
        seed: Some(base),
        r: Some(settings.r),
        linkage: Some(settings.linkage.to_string()),
        metric: Some(settings.metric.to_string()),
        n_starts: Some(settings.n_starts),
        max_iter: Some(settings.max_iter),
        tol: Some(settings.tol),
        n_mc: Some(settings.n_mc),
        ..cfg.clone()
    };
    write_echo(&dir, &echo)?;
    Ok(summary)
}
