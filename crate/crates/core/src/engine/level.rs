use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::gravity::FallChains;
use super::piece::{GoalKind, GoalTally, Piece, PortalRole, MAX_COLORS};

/// Portrait phone footprint used when no dimensions are given.
pub const DEFAULT_WIDTH: usize = 9;
pub const DEFAULT_HEIGHT: usize = 13;

/// Static description of a puzzle level.
///
/// `layout` is row-major with row 0 at the top; `Empty` cells reachable from the
/// top of the board are filled with random colors when a game starts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub layout: Vec<Piece>,
    pub container_hp: BTreeMap<u8, u8>,
    pub move_limit: u32,
    pub goals: GoalTally,
    pub color_count: u8,
    pub refill_weights: Vec<f64>,
    /// Free-form metadata (tier, difficulty knobs) carried through the file format.
    pub tags: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("level {level}: {rule}")]
pub struct ValidationError {
    pub level: String,
    pub rule: String,
}

impl Level {
    /// A level with every cell empty and uniform refill weights.
    pub fn blank(id: impl Into<String>, width: usize, height: usize, color_count: u8) -> Self {
        let c = color_count.max(1) as usize;
        Level {
            id: id.into(),
            width,
            height,
            layout: vec![Piece::Empty; width * height],
            container_hp: BTreeMap::new(),
            move_limit: 1,
            goals: GoalTally::new(),
            color_count,
            refill_weights: vec![1.0 / c as f64; c],
            tags: BTreeMap::new(),
        }
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn total_goal_requirement(&self) -> u32 {
        self.goals.values().sum()
    }

    pub fn count_pieces(&self, pred: impl Fn(Piece) -> bool) -> usize {
        self.layout.iter().filter(|p| pred(**p)).count()
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let fail = |rule: String| {
            Err(ValidationError {
                level: self.id.clone(),
                rule,
            })
        };
        if self.width == 0 || self.height == 0 {
            return fail("board dimensions must be positive".into());
        }
        if self.layout.len() != self.cells() {
            return fail(format!(
                "layout has {} cells, expected {}",
                self.layout.len(),
                self.cells()
            ));
        }
        if self.move_limit < 1 {
            return fail("move limit must be at least 1".into());
        }
        let colors = self.color_count as usize;
        if !(2..=MAX_COLORS).contains(&colors) {
            return fail(format!("color count {colors} outside 2..={MAX_COLORS}"));
        }
        if self.refill_weights.len() != colors {
            return fail(format!(
                "{} refill weights for {colors} colors",
                self.refill_weights.len()
            ));
        }
        if self
            .refill_weights
            .iter()
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return fail("refill weights must be finite and non-negative".into());
        }
        let sum: f64 = self.refill_weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return fail(format!("refill weights sum to {sum}, not 1"));
        }

        let mut rocks = 0u32;
        let mut grass = 0u32;
        let mut container_cells: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        let mut portals: BTreeMap<(u8, PortalRole), usize> = BTreeMap::new();
        for (idx, piece) in self.layout.iter().enumerate() {
            match *piece {
                Piece::Color(c) if c as usize >= colors => {
                    return fail(format!("color {c} at cell {idx} exceeds color count"));
                }
                Piece::Rock { hp: 0 } => return fail(format!("rock with 0 hp at cell {idx}")),
                Piece::Rock { .. } => rocks += 1,
                Piece::Grass => grass += 1,
                Piece::Container { id } => container_cells.entry(id).or_default().push(idx),
                Piece::Teleporter { pair, role } if portals.insert((pair, role), idx).is_some() => {
                    return fail(format!("teleporter pair {pair} has two {role:?} cells"));
                }
                _ => {}
            }
        }

        for (id, cells) in &container_cells {
            if !is_square_block(cells, self.width) {
                return fail(format!("container {id} is not a 2x2 block"));
            }
            match self.container_hp.get(id) {
                Some(hp) if *hp >= 1 => {}
                _ => return fail(format!("container {id} has no positive hp")),
            }
        }
        if let Some(id) = self
            .container_hp
            .keys()
            .find(|id| !container_cells.contains_key(id))
        {
            return fail(format!("hp given for missing container {id}"));
        }

        let pairs: BTreeSet<u8> = portals.keys().map(|(p, _)| *p).collect();
        for pair in pairs {
            if !portals.contains_key(&(pair, PortalRole::Entry))
                || !portals.contains_key(&(pair, PortalRole::Exit))
            {
                return fail(format!("teleporter pair {pair} is missing an end"));
            }
        }
        if FallChains::build(self.width, self.height, &self.layout).is_none() {
            return fail("teleporters form a gravity cycle".into());
        }

        for (kind, need) in &self.goals {
            if *need == 0 {
                return fail(format!("goal {kind} requires zero items"));
            }
            let ok = match *kind {
                GoalKind::CollectColor(c) => {
                    (c as usize) < colors
                        && (self.refill_weights[c as usize] > 0.0
                            || self.count_pieces(|p| p == Piece::Color(c)) >= *need as usize)
                }
                GoalKind::ClearRock => rocks >= *need,
                GoalKind::ClearGrass => grass >= *need,
                GoalKind::ClearContainer => container_cells.len() as u32 >= *need,
            };
            if !ok {
                return fail(format!("goal {kind} x{need} is not achievable"));
            }
        }
        Ok(())
    }
}

fn is_square_block(cells: &[usize], width: usize) -> bool {
    if cells.len() != 4 {
        return false;
    }
    let top_left = cells[0];
    let col = top_left % width;
    if col + 1 >= width {
        return false;
    }
    let mut expected = [
        top_left,
        top_left + 1,
        top_left + width,
        top_left + width + 1,
    ];
    expected.sort_unstable();
    let mut got = cells.to_vec();
    got.sort_unstable();
    got == expected
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basic() -> Level {
        let mut level = Level::blank("t", 3, 3, 2);
        level.goals.insert(GoalKind::CollectColor(0), 5);
        level
    }

    #[test]
    fn blank_level_with_color_goal_validates() {
        basic().validate().unwrap();
    }

    #[test]
    fn rejects_bad_weights() {
        let mut level = basic();
        level.refill_weights = vec![0.7, 0.7];
        assert!(level.validate().is_err());
    }

    #[test]
    fn rejects_unachievable_rock_goal() {
        let mut level = basic();
        level.goals.insert(GoalKind::ClearRock, 1);
        let err = level.validate().unwrap_err();
        assert!(err.rule.contains("clear-rock"));
        level.layout[0] = Piece::Rock { hp: 2 };
        level.validate().unwrap();
    }

    #[test]
    fn rejects_broken_container() {
        let mut level = Level::blank("c", 4, 4, 3);
        level.move_limit = 5;
        level.container_hp.insert(0, 10);
        for idx in [0, 1, 4] {
            level.layout[idx] = Piece::Container { id: 0 };
        }
        assert!(level.validate().is_err());
        level.layout[5] = Piece::Container { id: 0 };
        level.validate().unwrap();
        // wrapping across a row edge is not a block
        let mut wrapped = Level::blank("w", 3, 3, 3);
        wrapped.container_hp.insert(0, 10);
        for idx in [2, 3, 5, 6] {
            wrapped.layout[idx] = Piece::Container { id: 0 };
        }
        assert!(wrapped.validate().is_err());
    }

    #[test]
    fn rejects_unpaired_teleporter() {
        let mut level = basic();
        level.layout[6] = Piece::Teleporter {
            pair: 0,
            role: PortalRole::Entry,
        };
        assert!(level.validate().is_err());
        level.layout[1] = Piece::Teleporter {
            pair: 0,
            role: PortalRole::Exit,
        };
        level.validate().unwrap();
    }
}
