use std::fmt::Write as _;

use tkmerge::monitor::default_grid;
use tkmerge::{monitor_alpha, Method, MonitorConfig};

use super::{read_truth, write_echo};
use crate::config::{RunConfig, TC_MERGE_R};
use crate::csvio;
use crate::error::{CliError, Result};
use crate::svg;

pub fn run(cfg: &RunConfig) -> Result<String> {
    let input = cfg.input()?.to_path_buf();
    let method = cfg.method()?;
    let target = cfg.target()?;
    let data = csvio::read_matrix(&input)?;
    let truth = read_truth(cfg, &data)?;
    let k = match (cfg.k, cfg.big_k, cfg.k_heuristic()?) {
        (Some(k), _, None) => k,
        (None, Some(big_k), Some(h)) => h.components(data.n(), big_k),
        (None, Some(big_k), None) => big_k,
        _ => return Err(CliError::config("monitor needs --K, or --k, or --K with --k-heuristic")),
    };
    let r = cfg.r.unwrap_or(match method {
        Method::Tkm => 1.0,
        Method::Tc => TC_MERGE_R,
    });
    let mcfg = MonitorConfig {
        k,
        method,
        r,
        grid: cfg.grid.clone().unwrap_or_else(default_grid),
        target,
        drop_threshold: cfg.drop_threshold(),
        n_starts: cfg.n_starts(),
        max_iter: cfg.max_iter(),
        tol: cfg.tol(),
        seed: cfg.seed(),
    };
    let trace = monitor_alpha(&data, &mcfg, truth.as_ref())?;

    let dir = cfg.out_dir();
    csvio::ensure_dir(&dir)?;
    csvio::write(&dir, "trace.csv", &trace.to_csv())?;
    csvio::write(&dir, "best_alpha.txt", &format!("{:.2}\n", trace.best_alpha))?;
    for (alpha, part) in trace.alphas.iter().zip(&trace.partitions) {
        if let Some(p) = part {
            csvio::write(&dir, &format!("labels_alpha_{alpha:.2}.csv"), &csvio::labels_csv(p.labels()))?;
        }
    }
    if cfg.svg == Some(true) {
        let xs: Vec<f64> = trace.alphas[..trace.scores.len()].to_vec();
        csvio::write(&dir, "trace.svg", &svg::line(&xs, &trace.scores, "alpha", "ARI with next level"))?;
        if let Some(p) = trace.best_partition() {
            csvio::write(&dir, "scatter.svg", &svg::scatter(&data, p.labels(), "selected level"))?;
        }
    }
    let echo = RunConfig {
        input: Some(input),
        out: Some(dir.clone()),
        method: Some(method.to_string()),
        k: Some(k),
        k_heuristic: None,
        big_k: None,
        r: Some(r),
        grid: Some(mcfg.grid.clone()),
        target: Some(target.to_string()),
        drop_threshold: Some(mcfg.drop_threshold),
        seed: Some(mcfg.seed),
        n_starts: Some(mcfg.n_starts),
        max_iter: Some(mcfg.max_iter),
        tol: Some(mcfg.tol),
        ..cfg.clone()
    };
    write_echo(&dir, &echo)?;

    let mut s = String::new();
    for (alpha, failure) in trace.alphas.iter().zip(&trace.failures) {
        if let Some(f) = failure {
            let _ = writeln!(s, "alpha {alpha:.2} failed: {f}");
        }
    }
    let _ = writeln!(s, "best alpha: {:.2}", trace.best_alpha);
    Ok(s)
}
