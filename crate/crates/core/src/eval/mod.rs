//! Batch evaluation, best-x% statistic, Spearman correlation and reports.

mod episodes;
mod report;
mod stats;

pub use episodes::{
    read_episodes_csv, run_episode, run_episodes, write_episodes_csv, EpisodeRecord, EvalError,
    DEFAULT_MOVE_CAP,
};
pub use report::{
    correlation_sweep, move_distribution, null_abs_rho_quantile, summary_text,
    write_distribution_csv, write_levels_csv, write_sweep_csv, CorrelationReport, LevelRow,
    LevelRuns, MoveDistribution, SweepRow, DEFAULT_X_GRID,
};
pub use stats::{average_ranks, best_fraction_stat, pearson, spearman, LevelStat, StatError};
