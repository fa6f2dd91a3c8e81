use std::fmt::Write as _;

use rayon::prelude::*;
use tkmerge::datagen::scenario_at;
use tkmerge::metrics::ari_labels;
use tkmerge::rng::derive_seed;
use tkmerge::{percentage_gain, summarize};

use super::write_echo;
use crate::compare::{self, Contender, Settings};
use crate::config::RunConfig;
use crate::csvio::{self, fmt_num};
use crate::error::{CliError, Result};

struct Row {
    method: Contender,
    rep: usize,
    seed: u64,
    n: usize,
    result: std::result::Result<(Vec<usize>, f64, f64), String>,
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    let id = cfg.scenario()?;
    let scale = cfg.scale.unwrap_or(1.0);
    let reps = cfg.reps.unwrap_or(10);
    let level = cfg.level.unwrap_or(0);
    if reps == 0 {
        return Err(CliError::config("--reps must be at least 1"));
    }
    if level >= id.n_levels() {
        return Err(CliError::config(format!("scenario {id} has {} levels", id.n_levels())));
    }
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(CliError::config(format!("--scale {scale} is outside (0, 1]")));
    }
    let settings = Settings::from_config(cfg)?;
    let base = cfg.seed();

    let per_rep: Vec<_> = (1..=reps)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(base, rep as u64);
            let ds = scenario_at(id, level, scale, seed);
            let rows: Vec<Row> = Contender::ALL
                .iter()
                .map(|&method| {
                    let result = match &ds {
                        Err(e) => Err(format!("data generation failed: {e}")),
                        Ok(ds) => compare::run(method, id, ds, &settings, seed)
                            .map_err(|e| e.to_string())
                            .and_then(|o| {
                                let a = ari_labels(o.partition.labels(), ds.truth.labels()).map_err(|e| e.to_string())?;
                                Ok((o.partition.into_labels(), a, o.wall_s))
                            }),
                    };
                    Row { method, rep, seed, n: ds.as_ref().map_or(0, |d| d.data.n()), result }
                })
                .collect();
            (rep, ds.ok(), rows)
        })
        .collect();

    let dir = cfg.out_dir();
    for sub in ["datasets", "labels"] {
        csvio::ensure_dir(&dir.join(sub))?;
    }
    let mut results = String::from("method,rep,seed,n,ari,wall_s,gain_vs_tclust_pct,status\n");
    let mut rows_all = Vec::new();
    for (rep, ds, rows) in per_rep {
        if let Some(ds) = &ds {
            csvio::write(&dir.join("datasets"), &format!("data_rep{rep}.csv"), &csvio::matrix_csv(&ds.data, true))?;
            csvio::write(&dir.join("datasets"), &format!("truth_rep{rep}.csv"), &csvio::labels_csv(ds.truth.labels()))?;
        }
        let t_ref = rows.iter().find(|r| r.method == Contender::Tclust).and_then(|r| r.result.as_ref().ok()).map(|r| r.2);
        for row in &rows {
            match &row.result {
                Ok((labels, a, t)) => {
                    csvio::write(&dir.join("labels"), &format!("{}_rep{rep}.csv", row.method), &csvio::labels_csv(labels))?;
                    let gain = t_ref.map(|tr| fmt_num(percentage_gain(*t, tr))).unwrap_or_default();
                    let _ = writeln!(
                        results,
                        "{},{},{},{},{},{},{gain},ok",
                        row.method,
                        row.rep,
                        row.seed,
                        row.n,
                        fmt_num(*a),
                        fmt_num(*t)
                    );
                }
                Err(e) => {
                    let msg = e.replace([',', '\n'], ";");
                    let _ = writeln!(results, "{},{},{},{},,,,error: {msg}", row.method, row.rep, row.seed, row.n);
                }
            }
        }
        rows_all.push((t_ref, rows));
    }
    csvio::write(&dir, "results.csv", &results)?;

    let mut summary = String::from("method,reps_ok,ari_median,ari_sn,wall_median_s,wall_sn_s,gain_median_pct\n");
    for method in Contender::ALL {
        let mut aris = Vec::new();
        let mut times = Vec::new();
        let mut gains = Vec::new();
        for (t_ref, rows) in &rows_all {
            for row in rows.iter().filter(|r| r.method == method) {
                if let Ok((_, a, t)) = &row.result {
                    aris.push(*a);
                    times.push(*t);
                    if let Some(tr) = t_ref {
                        gains.push(percentage_gain(*t, *tr));
                    }
                }
            }
        }
        let cell = |x: &[f64], sn: bool| {
            summarize(x).map(|s| fmt_num(if sn { s.sn } else { s.median })).unwrap_or_default()
        };
        let _ = writeln!(
            summary,
            "{method},{},{},{},{},{},{}",
            aris.len(),
            cell(&aris, false),
            cell(&aris, true),
            cell(&times, false),
            cell(&times, true),
            cell(&gains, false)
        );
    }
    csvio::write(&dir, "summary.csv", &summary)?;

    let echo = RunConfig {
        out: Some(dir.clone()),
        scenario: Some(id.to_string()),
        scale: Some(scale),
        level: Some(level),
        reps: Some(reps),
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
