//! Resolved per-command configuration: defaults, then the config file's
//! section for the command, then command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use blastlab::eval::{DEFAULT_MOVE_CAP, DEFAULT_X_GRID};
use blastlab::ppo::{PpoConfig, ScenarioKind};
use blastlab::synthplayers::PopulationSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Reads `[section]` of a TOML config file; absent file or section gives defaults.
pub fn load_section<T: DeserializeOwned + Default>(
    file: Option<&Path>,
    section: &str,
) -> CliResult<T> {
    let Some(path) = file else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
    match table.get(section) {
        None => Ok(T::default()),
        Some(v) => v
            .clone()
            .try_into()
            .map_err(|e| CliError::usage(format!("config {} [{section}]: {e}", path.display()))),
    }
}

pub fn to_toml<T: Serialize>(value: &T) -> CliResult<String> {
    toml::to_string(value).map_err(|e| CliError::internal(format!("serializing config: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LevelSetKind {
    /// Tiered training levels with staged mechanics.
    Curriculum,
    /// Unseen levels for evaluation, optionally with new mechanics.
    Eval,
    /// Levels along one monotone difficulty knob.
    Ladder,
}

impl LevelSetKind {
    pub fn name(self) -> &'static str {
        match self {
            LevelSetKind::Curriculum => "curriculum",
            LevelSetKind::Eval => "eval",
            LevelSetKind::Ladder => "ladder",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderParams {
    pub count: usize,
    pub colors: u8,
    pub goal_min: u32,
    pub goal_max: u32,
    pub rock_density_min: f64,
    pub rock_density_max: f64,
    pub move_limit: u32,
}

impl Default for LadderParams {
    fn default() -> Self {
        LadderParams {
            count: 20,
            colors: 4,
            goal_min: 15,
            goal_max: 60,
            rock_density_min: 0.0,
            rock_density_max: 0.2,
            move_limit: 35,
        }
    }
}

impl LadderParams {
    /// Defaults scaled for a 6x6 board.
    pub fn small() -> Self {
        LadderParams {
            goal_min: 8,
            goal_max: 30,
            move_limit: 20,
            ..LadderParams::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenLevelsConfig {
    pub kind: LevelSetKind,
    /// Output set name; defaults to the kind.
    pub name: String,
    pub width: usize,
    pub height: usize,
    pub tiers: usize,
    pub per_tier: usize,
    /// Eval-set size.
    pub count: usize,
    /// Mechanics only the eval set uses, e.g. `teleporter`, `container`.
    pub new_mechanics: Vec<String>,
    pub ladder: LadderParams,
    pub seed: u64,
}

impl Default for GenLevelsConfig {
    fn default() -> Self {
        GenLevelsConfig {
            kind: LevelSetKind::Curriculum,
            name: String::new(),
            width: blastlab::engine::DEFAULT_WIDTH,
            height: blastlab::engine::DEFAULT_HEIGHT,
            tiers: 10,
            per_tier: 10,
            count: 5,
            new_mechanics: Vec::new(),
            ladder: LadderParams::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub scenario: ScenarioKind,
    /// Output name; defaults to the scenario name.
    pub name: String,
    pub curriculum: Option<PathBuf>,
    pub target: Option<PathBuf>,
    pub curriculum_budget: u64,
    pub target_budget: u64,
    /// 0 uses the largest color count among the training levels.
    pub color_slots: usize,
    /// Save a checkpoint every this many updates (0: phase ends only).
    pub snapshot_every: u64,
    pub ppo: PpoConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            scenario: ScenarioKind::OneStepCurriculum,
            name: String::new(),
            curriculum: None,
            target: None,
            curriculum_budget: 2_000_000,
            target_budget: 200_000,
            color_slots: 0,
            snapshot_every: 50,
            ppo: PpoConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub agent: String,
    /// Output name; defaults to a name derived from the agent spec.
    pub name: String,
    pub levels: PathBuf,
    pub episodes: usize,
    pub move_cap: u32,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            agent: "random".into(),
            name: String::new(),
            levels: PathBuf::from("levels/eval"),
            episodes: 1000,
            move_cap: DEFAULT_MOVE_CAP,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub name: String,
    pub levels: PathBuf,
    pub population: PopulationSpec,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            name: "players".into(),
            levels: PathBuf::from("levels/ladder"),
            population: PopulationSpec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelateConfig {
    pub name: String,
    pub episodes: PathBuf,
    pub rates: PathBuf,
    pub grid: Vec<f64>,
}

impl Default for CorrelateConfig {
    fn default() -> Self {
        CorrelateConfig {
            name: String::new(),
            episodes: PathBuf::from("episodes/random.csv"),
            rates: PathBuf::from("rates/players.csv"),
            grid: DEFAULT_X_GRID.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Directory holding `episodes/` and `rates/`; defaults to the output root.
    pub run_dir: Option<PathBuf>,
    /// Completion-rate table; defaults to the only file in `<run_dir>/rates/`.
    pub rates: Option<PathBuf>,
    pub bin_width: u32,
    pub grid: Vec<f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            run_dir: None,
            rates: None,
            bin_width: 1,
            grid: DEFAULT_X_GRID.to_vec(),
        }
    }
}

/// End-to-end planted-difficulty experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub ladder: LadderParams,
    pub tiers: usize,
    pub per_tier: usize,
    pub curriculum_budget: u64,
    pub ppo: PpoConfig,
    pub episodes: usize,
    pub move_cap: u32,
    /// Also evaluate the random and greedy baselines.
    pub baselines: bool,
    pub population: PopulationSpec,
    pub grid: Vec<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            width: 6,
            height: 6,
            ladder: LadderParams::small(),
            tiers: 5,
            per_tier: 4,
            curriculum_budget: 300_000,
            ppo: PpoConfig {
                conv_channels: [16, 32, 32],
                learning_rate: 3e-4,
                ..PpoConfig::default()
            },
            episodes: 200,
            move_cap: DEFAULT_MOVE_CAP,
            baselines: true,
            population: PopulationSpec::default(),
            grid: DEFAULT_X_GRID.to_vec(),
        }
    }
}

impl PipelineConfig {
    /// Training budget, episode count and population size times `factor`;
    /// level sets keep their size so the correlation stays defined.
    pub fn scaled(&self, factor: f64) -> PipelineConfig {
        let f = factor.max(0.0);
        let scale = |n: usize| ((n as f64 * f).round() as usize).max(1);
        PipelineConfig {
            curriculum_budget: ((self.curriculum_budget as f64 * f).round() as u64).max(1),
            episodes: scale(self.episodes),
            population: PopulationSpec {
                n_players: scale(self.population.n_players),
                ..self.population.clone()
            },
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_overlay_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(
            &path,
            "[train]\nscenario = \"twoStep\"\ntarget_budget = 5\n[train.ppo]\nn_envs = 2\n",
        )
        .unwrap();
        let t: TrainConfig = load_section(Some(&path), "train").unwrap();
        assert_eq!(t.scenario, ScenarioKind::TwoStep);
        assert_eq!(t.target_budget, 5);
        assert_eq!(t.ppo.n_envs, 2);
        assert_eq!(t.ppo.n_steps, 256);
        let e: EvalConfig = load_section(Some(&path), "eval").unwrap();
        assert_eq!(e, EvalConfig::default());

        fs::write(&path, "[eval]\nbogus = 1\n").unwrap();
        let err = load_section::<EvalConfig>(Some(&path), "eval").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn snapshots_round_trip() {
        let p = PipelineConfig::default();
        let back: PipelineConfig = toml::from_str(&to_toml(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let t = TrainConfig {
            target: Some("levels/eval/back-003.lvl".into()),
            ..TrainConfig::default()
        };
        let back: TrainConfig = toml::from_str(&to_toml(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
