//! Correlation sweep over x, move distributions, and their CSV forms.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;

use super::episodes::EpisodeRecord;
use super::stats::{best_fraction_stat, spearman, StatError};
use crate::rng::rng_from_seed;

pub const DEFAULT_X_GRID: [f64; 7] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

/// Evaluation runs of one agent on one level.
#[derive(Clone, Debug)]
pub struct LevelRuns {
    pub level_id: String,
    pub move_limit: u32,
    pub records: Vec<EpisodeRecord>,
}

impl LevelRuns {
    /// Groups records by level id; every record carries its move limit.
    pub fn group(records: &[EpisodeRecord]) -> Vec<LevelRuns> {
        let mut by: BTreeMap<&str, LevelRuns> = BTreeMap::new();
        for r in records {
            by.entry(&r.level_id)
                .or_insert_with(|| LevelRuns {
                    level_id: r.level_id.clone(),
                    move_limit: r.move_limit,
                    records: Vec::new(),
                })
                .records
                .push(r.clone());
        }
        by.into_values().collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    /// `None` when fewer than 3 levels were usable or a series was constant.
    pub rho: Option<f64>,
    pub levels_used: usize,
    pub dropped: Vec<String>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRow {
    pub level_id: String,
    pub completion_rate: Option<f64>,
    pub completed_fraction: f64,
    pub episodes: usize,
    /// Statistic per grid x; `None` where the level had no completed run.
    pub stats: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub grid: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub levels: Vec<LevelRow>,
    pub meta: BTreeMap<String, String>,
}

impl CorrelationReport {
    /// Grid x with the largest |ρ| (first on ties).
    pub fn best_x(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for r in &self.rows {
            if let Some(rho) = r.rho {
                if best.is_none_or(|(_, b)| rho.abs() > b.abs()) {
                    best = Some((r.x, rho));
                }
            }
        }
        best
    }
}

/// Spearman ρ between the best-x% statistic and completion rate, per x.
pub fn correlation_sweep(
    runs: &[LevelRuns],
    completion_rates: &BTreeMap<String, f64>,
    grid: &[f64],
) -> CorrelationReport {
    let mut levels = Vec::new();
    for lr in runs {
        let completed = lr.records.iter().filter(|r| r.completed).count();
        levels.push(LevelRow {
            level_id: lr.level_id.clone(),
            completion_rate: completion_rates.get(&lr.level_id).copied(),
            completed_fraction: if lr.records.is_empty() {
                0.0
            } else {
                completed as f64 / lr.records.len() as f64
            },
            episodes: lr.records.len(),
            stats: grid
                .iter()
                .map(|&x| {
                    best_fraction_stat(&lr.records, x, lr.move_limit)
                        .ok()
                        .map(|s| s.normalized_best_x)
                })
                .collect(),
        });
    }
    let rows = grid
        .iter()
        .enumerate()
        .map(|(g, &x)| {
            let mut stat = Vec::new();
            let mut rate = Vec::new();
            let mut dropped = Vec::new();
            for l in &levels {
                match (l.stats[g], l.completion_rate) {
                    (Some(s), Some(r)) => {
                        stat.push(s);
                        rate.push(r);
                    }
                    _ => dropped.push(l.level_id.clone()),
                }
            }
            let (rho, note) = match spearman(&stat, &rate) {
                Ok(rho) => (Some(rho), String::new()),
                Err(StatError::TooFew(n)) => (None, format!("undefined: only {n} usable levels")),
                Err(e) => (None, format!("undefined: {e}")),
            };
            SweepRow {
                x,
                rho,
                levels_used: stat.len(),
                dropped,
                note,
            }
        })
        .collect();
    CorrelationReport {
        grid: grid.to_vec(),
        rows,
        levels,
        meta: BTreeMap::new(),
    }
}

/// The `quantile` of |ρ| between independently shuffled series of length
/// `n`, by Monte Carlo.
pub fn null_abs_rho_quantile(n: usize, trials: usize, quantile: f64, seed: u64) -> f64 {
    let mut rng = rng_from_seed(seed);
    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut ys = xs.clone();
    let mut samples: Vec<f64> = (0..trials)
        .map(|_| {
            ys.shuffle(&mut rng);
            spearman(&xs, &ys).map(f64::abs).unwrap_or(0.0)
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let idx = ((quantile * trials as f64).ceil() as usize).clamp(1, trials) - 1;
    samples[idx]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveDistribution {
    pub bin_width: u32,
    /// (bin start, completed runs in `[start, start + bin_width)`).
    pub bins: Vec<(u32, usize)>,
    /// (moves, fraction of all runs completed within that many moves), at
    /// each distinct completed move count.
    pub cumulative: Vec<(u32, f64)>,
    pub censored: usize,
    pub total: usize,
}

pub fn move_distribution(records: &[EpisodeRecord], bin_width: u32) -> MoveDistribution {
    let w = bin_width.max(1);
    let mut bins: BTreeMap<u32, usize> = BTreeMap::new();
    let mut exact: BTreeMap<u32, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| r.completed) {
        *bins.entry(r.moves_taken / w * w).or_default() += 1;
        *exact.entry(r.moves_taken).or_default() += 1;
    }
    let total = records.len();
    let mut acc = 0;
    let cumulative = exact
        .into_iter()
        .map(|(m, c)| {
            acc += c;
            (m, acc as f64 / total as f64)
        })
        .collect();
    MoveDistribution {
        bin_width: w,
        bins: bins.into_iter().collect(),
        cumulative,
        censored: records.iter().filter(|r| !r.completed).count(),
        total,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// `x, rho, absRho, levelsUsed, best, note`
pub fn write_sweep_csv(report: &CorrelationReport, out: impl Write) -> csv::Result<()> {
    let best = report.best_x().map(|(x, _)| x);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "rho", "absRho", "levelsUsed", "best", "note"])?;
    for r in &report.rows {
        let mut note = r.note.clone();
        if !r.dropped.is_empty() {
            if !note.is_empty() {
                note.push_str("; ");
            }
            note.push_str(&format!("dropped {}", r.dropped.join(" ")));
        }
        w.write_record(&[
            r.x.to_string(),
            fmt_opt(r.rho),
            fmt_opt(r.rho.map(f64::abs)),
            r.levels_used.to_string(),
            (best == Some(r.x)).to_string(),
            note,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per level: id, completion rate, completed fraction, episodes, and
/// the statistic at each grid x.
pub fn write_levels_csv(report: &CorrelationReport, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "levelId".to_string(),
        "completionRate".into(),
        "agentCompletedFraction".into(),
        "episodes".into(),
    ];
    header.extend(report.grid.iter().map(|x| format!("stat@{x}")));
    w.write_record(&header)?;
    for l in &report.levels {
        let mut row = vec![
            l.level_id.clone(),
            fmt_opt(l.completion_rate),
            format!("{:.6}", l.completed_fraction),
            l.episodes.to_string(),
        ];
        row.extend(l.stats.iter().map(|s| fmt_opt(*s)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Histogram rows (`kind = bin`) followed by cumulative rows (`kind = cumulative`)
/// and a final censored count.
pub fn write_distribution_csv(
    label: &str,
    d: &MoveDistribution,
    out: impl Write,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["series", "kind", "moves", "value"])?;
    for (start, count) in &d.bins {
        w.write_record([label, "bin", &start.to_string(), &count.to_string()])?;
    }
    for (m, f) in &d.cumulative {
        w.write_record([label, "cumulative", &m.to_string(), &format!("{f:.6}")])?;
    }
    w.write_record([label, "censored", "", &d.censored.to_string()])?;
    w.flush()?;
    Ok(())
}

/// Plain-text summary of a sweep.
pub fn summary_text(report: &CorrelationReport) -> String {
    let mut s = String::new();
    for (k, v) in &report.meta {
        s.push_str(&format!("{k}: {v}\n"));
    }
    s.push_str("x       rho        |rho|   levels\n");
    for r in &report.rows {
        let rho = r
            .rho
            .map(|v| format!("{v:+.4}"))
            .unwrap_or_else(|| "undef".into());
        let abs = r
            .rho
            .map(|v| format!("{:.4}", v.abs()))
            .unwrap_or_else(|| "undef".into());
        s.push_str(&format!(
            "{:<7} {rho:<10} {abs:<7} {}\n",
            r.x, r.levels_used
        ));
    }
    match report.best_x() {
        Some((x, rho)) => s.push_str(&format!("best x = {x} (rho = {rho:+.4})\n")),
        None => s.push_str("best x undefined\n"),
    }
    let n = report.rows.iter().map(|r| r.levels_used).max().unwrap_or(0);
    if n >= 3 {
        let q = null_abs_rho_quantile(n, 2000, 0.95, 0);
        s.push_str(&format!(
            "shuffled-pairs 95th percentile of |rho| at {n} levels = {q:.4}\n"
        ));
    }
    s
}
