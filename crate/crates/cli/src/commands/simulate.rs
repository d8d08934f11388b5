use std::path::{Path, PathBuf};

use blastlab::synthplayers::{simulate_population, PopulationError};

use super::load_levels;
use crate::config::{to_toml, SimulateConfig};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

/// Writes `rates/<name>.csv`.
pub fn simulate_players(root: &Path, cfg: &SimulateConfig) -> CliResult<PathBuf> {
    cfg.population.validate().map_err(CliError::usage)?;
    for w in cfg.population.warnings() {
        eprintln!("warning: {w}");
    }
    let levels = load_levels(root, &cfg.levels)?;
    let table = simulate_population(&levels, &cfg.population).map_err(|e| match e {
        PopulationError::InvalidSpec(_) => CliError::usage(e),
        _ => CliError::internal(e),
    })?;
    let mut out = Outputs::begin(
        root,
        &format!("simulate-players-{}", cfg.name),
        &to_toml(cfg)?,
    )?;
    let path = out.write_csv(&format!("rates/{}.csv", cfg.name), |b| table.write_csv(b))?;
    out.commit();
    Ok(path)
}
