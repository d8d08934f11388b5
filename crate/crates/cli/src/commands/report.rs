use std::fs::{self, File};
use std::path::{Path, PathBuf};

use blastlab::eval::{
    correlation_sweep, move_distribution, read_episodes_csv, summary_text, write_distribution_csv,
    write_levels_csv, write_sweep_csv, CorrelationReport, LevelRuns,
};
use blastlab::synthplayers::CompletionRateTable;

use super::correlate::check_grid;
use super::resolve;
use crate::config::{to_toml, ReportConfig};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

fn csv_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    Ok(files)
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Move distributions per agent and level, plus a correlation sweep per agent
/// when a rate table is available. Everything lands in `report/`.
pub fn report(root: &Path, cfg: &ReportConfig) -> CliResult<Vec<(String, CorrelationReport)>> {
    check_grid(&cfg.grid)?;
    let run_dir = cfg
        .run_dir
        .as_deref()
        .map_or_else(|| root.to_path_buf(), |d| resolve(root, d));
    let episode_files = csv_files(&run_dir.join("episodes"))?;
    if episode_files.is_empty() {
        return Err(CliError::data(format!(
            "no episode tables in {}",
            run_dir.join("episodes").display()
        )));
    }
    let rates_path = match &cfg.rates {
        Some(p) => Some(resolve(root, p)),
        None => {
            let mut found = csv_files(&run_dir.join("rates"))?;
            match found.len() {
                0 => None,
                1 => found.pop(),
                _ => {
                    return Err(CliError::usage(
                        "several rate tables found; pick one with --rates",
                    ))
                }
            }
        }
    };
    let rates = match &rates_path {
        Some(p) => {
            let f = File::open(p)
                .map_err(|e| CliError::data(format!("cannot open {}: {e}", p.display())))?;
            Some(
                CompletionRateTable::read_csv(f)
                    .map_err(CliError::data)?
                    .rates(),
            )
        }
        None => None,
    };

    let mut out = Outputs::begin(root, "report", &to_toml(cfg)?)?;
    let mut summary = format!("config: {}\n", out.snapshot());
    let mut sweeps = Vec::new();
    for file in &episode_files {
        let agent = stem(file);
        let f = File::open(file)?;
        let records =
            read_episodes_csv(f).map_err(|e| CliError::data(format!("{}: {e}", file.display())))?;
        let runs = LevelRuns::group(&records);

        out.write_csv(
            &format!("report/moves-{agent}.csv"),
            |b| -> csv::Result<()> {
                let mut series: Vec<(String, Vec<_>)> = vec![("all".into(), records.clone())];
                series.extend(runs.iter().map(|r| (r.level_id.clone(), r.records.clone())));
                for (i, (label, recs)) in series.iter().enumerate() {
                    let mut part = Vec::new();
                    write_distribution_csv(
                        label,
                        &move_distribution(recs, cfg.bin_width),
                        &mut part,
                    )?;
                    let body = if i == 0 {
                        &part[..]
                    } else {
                        let nl = part
                            .iter()
                            .position(|&c| c == b'\n')
                            .map_or(part.len(), |p| p + 1);
                        &part[nl..]
                    };
                    b.extend_from_slice(body);
                }
                Ok(())
            },
        )?;

        summary.push_str(&format!("\n== {agent} ==\n"));
        let done = records.iter().filter(|r| r.completed).count();
        summary.push_str(&format!(
            "episodes: {}  completed: {}  levels: {}\n",
            records.len(),
            done,
            runs.len()
        ));
        let Some(rates) = &rates else { continue };
        let shared = runs
            .iter()
            .filter(|r| rates.contains_key(&r.level_id))
            .count();
        if shared < 3 {
            summary.push_str(&format!(
                "correlation skipped: only {shared} level(s) have a completion rate\n"
            ));
            continue;
        }
        let mut rep = correlation_sweep(&runs, rates, &cfg.grid);
        rep.meta.insert("agent".into(), agent.clone());
        out.write_csv(&format!("report/sweep-{agent}.csv"), |b| {
            write_sweep_csv(&rep, b)
        })?;
        out.write_csv(&format!("report/levels-{agent}.csv"), |b| {
            write_levels_csv(&rep, b)
        })?;
        summary.push_str(&summary_text(&rep));
        sweeps.push((agent, rep));
    }
    if let Some(p) = &rates_path {
        summary.push_str(&format!(
            "\ncompletion rates: {}\n",
            p.strip_prefix(root).unwrap_or(p).display()
        ));
    }
    out.write_bytes("report/summary.txt", summary.as_bytes())?;
    out.commit();
    Ok(sweeps)
}
