//! Command-line flags. Every flag overrides the matching config-file key.

use std::path::PathBuf;

use blastlab::ppo::ScenarioKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{
    CorrelateConfig, EvalConfig, GenLevelsConfig, LevelSetKind, PipelineConfig, ReportConfig,
    SimulateConfig, TrainConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "blastlab",
    version,
    about = "Playtesting lab for click-to-blast puzzle levels"
)]
pub struct Cli {
    /// TOML file with one table per command, e.g. [train] or [eval].
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root.
    #[arg(long, global = true, env = "BLASTLAB_OUT", default_value = "runs")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a curriculum, evaluation set or difficulty ladder.
    GenLevels(GenLevelsArgs),
    /// Train a policy with PPO.
    Train(TrainArgs),
    /// Play an agent on a level set and record every episode.
    Eval(EvalArgs),
    /// Completion rates from a synthetic player population.
    SimulatePlayers(SimulateArgs),
    /// Spearman correlation between best-x% moves and completion rate.
    Correlate(CorrelateArgs),
    /// Move distributions and correlation sweeps for a run directory.
    Report(ReportArgs),
    /// Single-threaded engine throughput.
    Bench(BenchArgs),
    /// Generate, train, evaluate, simulate, correlate and report in one go.
    Pipeline(PipelineArgs),
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

#[derive(Debug, Args)]
pub struct GenLevelsArgs {
    #[arg(long, value_enum)]
    pub kind: Option<LevelSetKind>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub tiers: Option<usize>,
    #[arg(long)]
    pub per_tier: Option<usize>,
    /// Number of evaluation or ladder levels.
    #[arg(long)]
    pub count: Option<usize>,
    /// Mechanic the eval set introduces; repeatable.
    #[arg(long = "new-mechanic")]
    pub new_mechanics: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl GenLevelsArgs {
    pub fn apply(self, c: &mut GenLevelsConfig) {
        set(&mut c.kind, self.kind);
        set(&mut c.name, self.name);
        set(&mut c.width, self.width);
        set(&mut c.height, self.height);
        set(&mut c.tiers, self.tiers);
        set(&mut c.per_tier, self.per_tier);
        if let Some(n) = self.count {
            c.count = n;
            c.ladder.count = n;
        }
        if !self.new_mechanics.is_empty() {
            c.new_mechanics = self.new_mechanics;
        }
        set(&mut c.seed, self.seed);
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Option<ScenarioKind>,
    #[arg(long)]
    pub name: Option<String>,
    /// Directory of curriculum levels.
    #[arg(long)]
    pub curriculum: Option<PathBuf>,
    /// Target level file.
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub curriculum_budget: Option<u64>,
    #[arg(long)]
    pub target_budget: Option<u64>,
    #[arg(long)]
    pub color_slots: Option<usize>,
    #[arg(long)]
    pub snapshot_every: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub n_envs: Option<usize>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// Print one line per update to stderr.
    #[arg(long)]
    pub progress: bool,
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    ScenarioKind::parse(s).ok_or_else(|| {
        format!(
            "expected one of {:?}",
            ScenarioKind::ALL.map(|k| k.to_string())
        )
    })
}

impl TrainArgs {
    pub fn apply(self, c: &mut TrainConfig) {
        set(&mut c.scenario, self.scenario);
        set(&mut c.name, self.name);
        if self.curriculum.is_some() {
            c.curriculum = self.curriculum;
        }
        if self.target.is_some() {
            c.target = self.target;
        }
        set(&mut c.curriculum_budget, self.curriculum_budget);
        set(&mut c.target_budget, self.target_budget);
        set(&mut c.color_slots, self.color_slots);
        set(&mut c.snapshot_every, self.snapshot_every);
        set(&mut c.ppo.seed, self.seed);
        set(&mut c.ppo.learning_rate, self.learning_rate);
        set(&mut c.ppo.n_envs, self.n_envs);
        set(&mut c.ppo.n_steps, self.n_steps);
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// random, greedy or policy:<checkpoint>[:argmax|:sample]
    #[arg(long)]
    pub agent: Option<String>,
    #[arg(long)]
    pub name: Option<String>,
    /// Level file or directory.
    #[arg(long)]
    pub levels: Option<PathBuf>,
    #[arg(long)]
    pub episodes: Option<usize>,
    #[arg(long)]
    pub move_cap: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl EvalArgs {
    pub fn apply(self, c: &mut EvalConfig) {
        set(&mut c.agent, self.agent);
        set(&mut c.name, self.name);
        set(&mut c.levels, self.levels);
        set(&mut c.episodes, self.episodes);
        set(&mut c.move_cap, self.move_cap);
        set(&mut c.seed, self.seed);
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub levels: Option<PathBuf>,
    #[arg(long)]
    pub players: Option<usize>,
    #[arg(long)]
    pub attempts: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SimulateArgs {
    pub fn apply(self, c: &mut SimulateConfig) {
        set(&mut c.name, self.name);
        set(&mut c.levels, self.levels);
        set(&mut c.population.n_players, self.players);
        set(&mut c.population.attempts_per_player, self.attempts);
        set(&mut c.population.alpha, self.alpha);
        set(&mut c.population.beta, self.beta);
        set(&mut c.population.seed, self.seed);
    }
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub name: Option<String>,
    /// Episode table from `eval`.
    #[arg(long)]
    pub episodes: Option<PathBuf>,
    /// Completion-rate table (levelId, completions, attempts, rate).
    #[arg(long)]
    pub rates: Option<PathBuf>,
    /// Comma-separated fractions in (0, 1].
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

impl CorrelateArgs {
    pub fn apply(self, c: &mut CorrelateConfig) {
        set(&mut c.name, self.name);
        set(&mut c.episodes, self.episodes);
        set(&mut c.rates, self.rates);
        set(&mut c.grid, self.grid);
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub run_dir: Option<PathBuf>,
    #[arg(long)]
    pub rates: Option<PathBuf>,
    #[arg(long)]
    pub bin_width: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

impl ReportArgs {
    pub fn apply(self, c: &mut ReportConfig) {
        if self.run_dir.is_some() {
            c.run_dir = self.run_dir;
        }
        if self.rates.is_some() {
            c.rates = self.rates;
        }
        set(&mut c.bin_width, self.bin_width);
        set(&mut c.grid, self.grid);
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = blastlab::engine::DEFAULT_WIDTH)]
    pub width: usize,
    #[arg(long, default_value_t = blastlab::engine::DEFAULT_HEIGHT)]
    pub height: usize,
    #[arg(long, default_value_t = 3.0)]
    pub seconds: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exit non-zero below this many moves per second.
    #[arg(long)]
    pub min_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scale the training budget, episode counts and player counts (e.g. 0.1 for a smoke run).
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub progress: bool,
}

impl PipelineArgs {
    pub fn apply(&self, c: &mut PipelineConfig) {
        set(&mut c.seed, self.seed);
        if let Some(s) = self.scale {
            *c = c.scaled(s);
        }
    }
}
