use std::path::{Path, PathBuf};

use blastlab::eval::CorrelationReport;
use blastlab::ppo::{PpoConfig, ScenarioKind};
use blastlab::rng::derive_seed;
use blastlab::synthplayers::PopulationSpec;

use super::{correlate, eval, gen_levels, load_levels, report, simulate_players, train};
use crate::config::{
    to_toml, CorrelateConfig, EvalConfig, GenLevelsConfig, LevelSetKind, PipelineConfig,
    ReportConfig, SimulateConfig, TrainConfig,
};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

#[derive(Debug)]
pub struct PipelineSummary {
    pub checkpoint: PathBuf,
    /// Correlation sweep per evaluated agent, in evaluation order.
    pub sweeps: Vec<(String, CorrelationReport)>,
}

/// Ladder and curriculum generation, curriculum training, evaluation of the
/// trained agent (and baselines) on the ladder, a synthetic population on the
/// ladder, one sweep per agent, and the report. Step `k` is seeded with
/// `derive(seed, k)`.
pub fn pipeline(root: &Path, cfg: &PipelineConfig, progress: bool) -> CliResult<PipelineSummary> {
    let out = Outputs::begin(root, "pipeline", &to_toml(cfg)?)?;
    let seed = |k: u64| derive_seed(cfg.seed, k);

    gen_levels(
        root,
        &GenLevelsConfig {
            kind: LevelSetKind::Ladder,
            name: "ladder".into(),
            width: cfg.width,
            height: cfg.height,
            ladder: cfg.ladder.clone(),
            seed: seed(1),
            ..GenLevelsConfig::default()
        },
    )?;
    let curriculum_dir = gen_levels(
        root,
        &GenLevelsConfig {
            kind: LevelSetKind::Curriculum,
            name: "curriculum".into(),
            width: cfg.width,
            height: cfg.height,
            tiers: cfg.tiers,
            per_tier: cfg.per_tier,
            seed: seed(2),
            ..GenLevelsConfig::default()
        },
    )?;
    let curriculum_colors = load_levels(root, &curriculum_dir)?
        .iter()
        .map(|l| l.color_count as usize)
        .max()
        .unwrap_or(0);
    let ck = train(
        root,
        &TrainConfig {
            scenario: ScenarioKind::OneStepCurriculum,
            name: "curriculum".into(),
            curriculum: Some("levels/curriculum".into()),
            curriculum_budget: cfg.curriculum_budget,
            color_slots: curriculum_colors.max(cfg.ladder.colors as usize),
            snapshot_every: 0,
            ppo: PpoConfig {
                seed: seed(3),
                ..cfg.ppo.clone()
            },
            ..TrainConfig::default()
        },
        progress,
    )?;

    let mut agents = vec![(
        "curriculum".to_string(),
        "policy:train/curriculum/final.ckpt".to_string(),
    )];
    if cfg.baselines {
        agents.push(("random".into(), "random".into()));
        agents.push(("greedy".into(), "greedy".into()));
    }
    for (name, spec) in &agents {
        eval(
            root,
            &EvalConfig {
                agent: spec.clone(),
                name: name.clone(),
                levels: "levels/ladder".into(),
                episodes: cfg.episodes,
                move_cap: cfg.move_cap,
                seed: seed(4),
            },
        )?;
    }
    simulate_players(
        root,
        &SimulateConfig {
            name: "players".into(),
            levels: "levels/ladder".into(),
            population: PopulationSpec {
                seed: seed(5),
                ..cfg.population.clone()
            },
        },
    )?;
    let mut sweeps = Vec::new();
    for (name, _) in &agents {
        let rep = correlate(
            root,
            &CorrelateConfig {
                name: name.clone(),
                episodes: format!("episodes/{name}.csv").into(),
                rates: "rates/players.csv".into(),
                grid: cfg.grid.clone(),
            },
        )?;
        sweeps.push((name.clone(), rep));
    }
    report(
        root,
        &ReportConfig {
            rates: Some("rates/players.csv".into()),
            grid: cfg.grid.clone(),
            ..ReportConfig::default()
        },
    )?;
    if sweeps.is_empty() {
        return Err(CliError::internal("pipeline produced no sweeps"));
    }
    out.commit();
    Ok(PipelineSummary {
        checkpoint: ck,
        sweeps,
    })
}
