pub mod bench;
pub mod eval;
pub mod fit;
pub mod monitor;
pub mod simulate;

use std::path::Path;

use tkmerge::{DataMatrix, Partition};

use crate::config::RunConfig;
use crate::csvio;
use crate::error::{CliError, Result};

pub(crate) fn read_truth(cfg: &RunConfig, data: &DataMatrix) -> Result<Option<Partition>> {
    let Some(path) = &cfg.truth else { return Ok(None) };
    let truth = csvio::read_labels(path)?;
    if truth.len() != data.n() {
        return Err(CliError::Input {
            path: path.clone(),
            message: format!("{} labels for {} observations", truth.len(), data.n()),
        });
    }
    Ok(Some(truth))
}

pub(crate) fn write_echo(dir: &Path, cfg: &RunConfig) -> Result<()> {
    csvio::write(dir, "config_echo.json", &cfg.to_json()).map(|_| ())
}
