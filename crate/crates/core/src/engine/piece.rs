use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of piece colors a level may use.
pub const MAX_COLORS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PortalRole {
    Entry,
    Exit,
}

/// Contents of one board cell.
///
/// `Color` and `Rock` pieces are movable and fall under gravity. `Grass`,
/// `Container` and `Teleporter` cells are static. Container hit points are
/// shared by the four cells of a container and live on the board, keyed by id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Piece {
    Empty,
    Color(u8),
    Rock { hp: u8 },
    Grass,
    Container { id: u8 },
    Teleporter { pair: u8, role: PortalRole },
}

impl Piece {
    #[inline]
    pub fn color(self) -> Option<u8> {
        match self {
            Piece::Color(c) => Some(c),
            _ => None,
        }
    }

    /// Pieces that fall under gravity.
    #[inline]
    pub fn is_movable(self) -> bool {
        matches!(self, Piece::Color(_) | Piece::Rock { .. })
    }

    /// Cells that never move and act as floors for the pieces above them.
    #[inline]
    pub fn is_static(self) -> bool {
        matches!(
            self,
            Piece::Grass | Piece::Container { .. } | Piece::Teleporter { .. }
        )
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self == Piece::Empty
    }
}

/// A level objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GoalKind {
    CollectColor(u8),
    ClearRock,
    ClearGrass,
    ClearContainer,
}

impl fmt::Display for GoalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalKind::CollectColor(c) => write!(f, "collect-color {c}"),
            GoalKind::ClearRock => f.write_str("clear-rock"),
            GoalKind::ClearGrass => f.write_str("clear-grass"),
            GoalKind::ClearContainer => f.write_str("clear-container"),
        }
    }
}

/// Counts per goal kind. Used both for requirements and for progress.
pub type GoalTally = BTreeMap<GoalKind, u32>;

/// True iff every required goal has been met.
pub fn is_won(progress: &GoalTally, goals: &GoalTally) -> bool {
    goals
        .iter()
        .all(|(kind, need)| progress.get(kind).copied().unwrap_or(0) >= *need)
}
