use std::fs::File;
use std::path::Path;

use blastlab::eval::{
    correlation_sweep, read_episodes_csv, summary_text, write_levels_csv, write_sweep_csv,
    CorrelationReport, LevelRuns, StatError,
};
use blastlab::synthplayers::CompletionRateTable;

use super::{resolve, slug};
use crate::config::{to_toml, CorrelateConfig};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

fn open(root: &Path, p: &Path) -> CliResult<File> {
    let path = resolve(root, p);
    File::open(&path).map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))
}

pub(crate) fn check_grid(grid: &[f64]) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::usage("x grid is empty"));
    }
    match grid.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
        Some(x) => Err(CliError::usage(format!("x = {x} outside (0, 1]"))),
        None => Ok(()),
    }
}

/// Sweeps x and writes `correlation/<name>/{sweep.csv, levels.csv, summary.txt}`.
pub fn correlate(root: &Path, cfg: &CorrelateConfig) -> CliResult<CorrelationReport> {
    check_grid(&cfg.grid)?;
    let records = read_episodes_csv(open(root, &cfg.episodes)?).map_err(CliError::data)?;
    let rates = CompletionRateTable::read_csv(open(root, &cfg.rates)?)
        .map_err(CliError::data)?
        .rates();
    let runs = LevelRuns::group(&records);
    let shared = runs
        .iter()
        .filter(|r| rates.contains_key(&r.level_id))
        .count();
    if shared < 3 {
        return Err(CliError::data(format!(
            "{}: only {shared} level(s) have both episodes and a completion rate",
            StatError::DegenerateInput
        )));
    }
    let name = if cfg.name.is_empty() {
        cfg.episodes
            .file_stem()
            .map(|s| slug(&s.to_string_lossy()))
            .unwrap_or_else(|| "sweep".into())
    } else {
        cfg.name.clone()
    };
    let mut report = correlation_sweep(&runs, &rates, &cfg.grid);
    report
        .meta
        .insert("episodes".into(), cfg.episodes.display().to_string());
    report
        .meta
        .insert("rates".into(), cfg.rates.display().to_string());

    let mut out = Outputs::begin(root, &format!("correlate-{name}"), &to_toml(cfg)?)?;
    let dir = format!("correlation/{name}");
    out.write_csv(&format!("{dir}/sweep.csv"), |b| write_sweep_csv(&report, b))?;
    out.write_csv(&format!("{dir}/levels.csv"), |b| {
        write_levels_csv(&report, b)
    })?;
    let summary = format!("config: {}\n{}", out.snapshot(), summary_text(&report));
    out.write_bytes(&format!("{dir}/summary.txt"), summary.as_bytes())?;
    out.commit();
    Ok(report)
}
