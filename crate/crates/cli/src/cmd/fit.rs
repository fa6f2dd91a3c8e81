use std::fmt::Write as _;

use serde_json::Value;
use tkmerge::{ari, fit, FitConfig, Method};

use super::{read_truth, write_echo};
use crate::config::{RunConfig, TC_MERGE_R};
use crate::csvio::{self, fmt_num};
use crate::error::Result;
use crate::svg;

pub fn run(cfg: &RunConfig) -> Result<String> {
    let input = cfg.input()?.to_path_buf();
    let method = cfg.method()?;
    let big_k = cfg.big_k()?;
    let linkage = cfg.linkage()?;
    let metric = cfg.metric()?;
    let data = csvio::read_matrix(&input)?;
    let truth = read_truth(cfg, &data)?;
    let k = cfg.resolve_k(data.n(), big_k)?;
    let r = cfg.r.unwrap_or(match method {
        Method::Tkm => 1.0,
        Method::Tc => TC_MERGE_R,
    });
    let fit_cfg = FitConfig {
        big_k,
        k,
        alpha: cfg.alpha.unwrap_or(0.0),
        r,
        metric,
        linkage,
        n_starts: cfg.n_starts(),
        max_iter: cfg.max_iter(),
        tol: cfg.tol(),
        seed: cfg.seed(),
        n_mc: cfg.n_mc(),
    };
    let res = fit(&data, &fit_cfg, method)?;

    let echo = RunConfig {
        input: Some(input.clone()),
        out: Some(cfg.out_dir()),
        method: Some(method.to_string()),
        big_k: Some(big_k),
        k: Some(k),
        k_heuristic: None,
        alpha: Some(fit_cfg.alpha),
        r: Some(r),
        linkage: Some(linkage.to_string()),
        metric: Some(metric.to_string()),
        seed: Some(fit_cfg.seed),
        n_starts: Some(fit_cfg.n_starts),
        max_iter: Some(fit_cfg.max_iter),
        tol: Some(fit_cfg.tol),
        n_mc: Some(fit_cfg.n_mc),
        ..cfg.clone()
    };
    let dir = cfg.out_dir();
    csvio::ensure_dir(&dir)?;
    let labels = res.final_partition.labels();
    csvio::write(&dir, "labels.csv", &csvio::labels_csv(labels))?;

    let model = res.first_step.model();
    let mut centroids = String::from("component,");
    centroids.push_str(&csvio::column_names(data.p()).join(","));
    centroids.push_str(",size,weight,group\n");
    for (j, c) in model.centroids.iter().enumerate() {
        let _ = write!(centroids, "{}", j + 1);
        for v in c {
            let _ = write!(centroids, ",{}", fmt_num(*v));
        }
        let _ = writeln!(
            centroids,
            ",{},{},{}",
            model.sizes[j],
            fmt_num(model.weights[j]),
            res.merge.component_to_group[j]
        );
    }
    csvio::write(&dir, "centroids.csv", &centroids)?;

    let mut json = serde_json::to_value(&res).expect("fit result serialises");
    if let Value::Object(map) = &mut json {
        // timing would make the file differ between identical runs
        map.remove("wall_time_s");
    }
    let mut json = serde_json::to_string_pretty(&json).expect("json value serialises");
    json.push('\n');
    csvio::write(&dir, "model.json", &json)?;

    let mut dend = String::from("left right height\n");
    for m in &res.merge.dendrogram.merges {
        let _ = writeln!(dend, "{} {} {}", m.left, m.right, fmt_num(m.height));
    }
    csvio::write(&dir, "dendrogram.txt", &dend)?;
    csvio::write(&dir, "scatter.csv", &csvio::scatter_csv(&data, labels))?;
    if cfg.svg == Some(true) {
        csvio::write(&dir, "scatter.svg", &svg::scatter(&data, labels, "tk-merge labels"))?;
    }

    let mut s = String::new();
    let _ = writeln!(s, "input: {}", input.display());
    let _ = writeln!(s, "observations: {} x {}", data.n(), data.p());
    let first = match res.first_step.method() {
        Method::Tkm => "trimmed k-means",
        Method::Tc => "TCLUST",
    };
    let _ = writeln!(s, "method: {method} (first step: {first})");
    if res.routed_to_tkmeans {
        let _ = writeln!(s, "note: r = 1 forces equal spherical components; routed to the trimmed k-means branch");
    }
    let _ = writeln!(s, "K = {big_k}, k = {k}, alpha = {}, r = {}", fmt_num(fit_cfg.alpha), fmt_num(r));
    if let Some(h) = cfg.k_heuristic()? {
        let _ = writeln!(s, "k from heuristic {h}");
    }
    let _ = writeln!(s, "linkage: {linkage}, metric: {metric}, seed: {}", fit_cfg.seed);
    let _ = writeln!(s, "retained: {}, trimmed: {}", res.final_partition.n_retained(), res.final_partition.n_trimmed());
    let sizes: Vec<String> = res.final_partition.group_sizes().iter().map(usize::to_string).collect();
    let _ = writeln!(s, "group sizes: {}", sizes.join(" "));
    let map: Vec<String> = res.merge.component_to_group.iter().map(usize::to_string).collect();
    let _ = writeln!(s, "component groups: {}", map.join(" "));
    if let Some(t) = &truth {
        let _ = writeln!(s, "ARI vs truth: {}", fmt_num(ari(&res.final_partition, t)?));
    }
    csvio::write(&dir, "summary.txt", &s)?;
    write_echo(&dir, &echo)?;
    Ok(s)
}
