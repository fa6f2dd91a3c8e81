use std::io::Write;
use std::path::Path;

use tkmerge::ari;

use crate::csvio::{self, fmt_num};
use crate::error::{CliError, Result};

pub fn run(a: &Path, b: &Path, out: &mut dyn Write) -> Result<()> {
    let pa = csvio::read_labels(a)?;
    let pb = csvio::read_labels(b)?;
    if pa.len() != pb.len() {
        return Err(CliError::Input {
            path: b.to_path_buf(),
            message: format!("{} labels, but {} has {}", pb.len(), a.display(), pa.len()),
        });
    }
    let v = ari(&pa, &pb)?;
    writeln!(out, "{}", fmt_num(v)).map_err(|source| CliError::Write { path: "<stdout>".into(), source })
}
