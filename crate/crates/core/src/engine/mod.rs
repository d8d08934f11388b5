//! Click-to-blast puzzle simulation.
//!
//! Tapping a cell removes its cluster (minimum size two). Adjacent rocks and
//! containers lose one hit point per move, adjacent grass is cleared (or grass
//! spreads if none was touched), pieces fall straight down through teleporters,
//! and empty top cells are refilled from the level's color weights. All
//! randomness comes from the board's own seeded generator.

mod board;
mod game;
mod gravity;
mod level;
mod piece;

pub use board::{
    label_clusters, Board, Cluster, DamageTarget, EngineError, MoveOutcome, SHUFFLE_RETRY_CAP,
};
pub use game::{Game, StepResult};
pub use gravity::FallChains;
pub use level::{Level, ValidationError, DEFAULT_HEIGHT, DEFAULT_WIDTH};
pub use piece::{is_won, GoalKind, GoalTally, Piece, PortalRole, MAX_COLORS};

/// Index of the largest cluster's first cell, ties broken by lowest index.
/// Returns `None` on a dead board.
pub fn greedy_action(board: &Board) -> Option<usize> {
    board
        .find_clusters()
        .into_iter()
        .filter(|c| c.cells.len() >= 2)
        .fold(None::<Cluster>, |best, c| match best {
            Some(b) if b.cells.len() >= c.cells.len() => Some(b),
            _ => Some(c),
        })
        .map(|c| c.cells[0])
}
