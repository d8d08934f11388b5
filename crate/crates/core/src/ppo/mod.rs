//! Proximal policy optimization with action masking and color shuffling.

mod config;
mod env;
mod rollout;
mod train;
mod update;

pub use config::{ConfigError, Phase, PpoConfig, ScenarioKind, ScenarioSpec};
pub use env::{reward, EnvError, TrainEnv, Transition, MOVE_PENALTY, WIN_BONUS};
pub use rollout::{
    collect_rollouts, compute_gae, EpisodeSummary, RolloutBuffer, RolloutError, Worker,
};
pub use train::{
    net_shape, run_scenario, train_phase, write_curve_csv, CurveRow, PpoError, Snapshot,
    TrainOptions, TrainOutcome, CURVE_HEADER,
};
pub use update::{clipped_surrogate, normalize, ppo_update, UpdateError, UpdateStats};
