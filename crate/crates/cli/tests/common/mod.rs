#![allow(dead_code)]

use std::fs;
use std::path::Path;

use rand::Rng;
use tkmerge::datagen::{gen_gaussian_mixture, SyntheticDataset};
use tkmerge::rng::rng_from_seed;
use tkmerge::{DataMatrix, Partition};
use tkmerge_cli::csvio;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn tkmerge(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = tkmerge_cli::run(std::iter::once("tkmerge").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn labels(p: &Path) -> Vec<usize> {
    csvio::read_labels(p).unwrap().into_labels()
}

/// Two clusters of 350 plus 300 points in a far square: exactly 30% gross
/// contamination.
pub fn clumped(seed: u64) -> SyntheticDataset {
    let mut ds = gen_gaussian_mixture(2, 350, 2, 3.0, 4.0, seed).unwrap();
    let mut rng = rng_from_seed(seed + 99);
    let far: Vec<f64> = (0..600).map(|_| rng.random_range(40.0..44.0)).collect();
    ds.data = ds.data.vstack(&DataMatrix::new(far, 300, 2).unwrap()).unwrap();
    let mut labels = ds.truth.labels().to_vec();
    labels.extend(std::iter::repeat_n(0, 300));
    ds.truth = Partition::new(labels, 2).unwrap();
    ds
}

pub fn write_dataset(dir: &Path, ds: &SyntheticDataset) -> (String, String) {
    let data = dir.join("data.csv");
    let truth = dir.join("truth.csv");
    fs::write(&data, csvio::matrix_csv(&ds.data, true)).unwrap();
    fs::write(&truth, csvio::labels_csv(ds.truth.labels())).unwrap();
    (path(&data).to_string(), path(&truth).to_string())
}
