//! Board-to-tensor encoding for the policy.
//!
//! The tensor is stored `[row][col][channel]` (height x width x m), with
//! `m = color_slots + 4`:
//!
//! | channel            | value                                                     |
//! |--------------------|-----------------------------------------------------------|
//! | `color<k>`         | 1.0 where a piece of color `k` sits                       |
//! | `clickableFalse`   | hit points of the non-clickable blocker in the cell       |
//! | `isCollectGoal`    | remaining requirement (color goals) or hp of a goal piece |
//! | `teleporter`       | 1.0 on teleporter entries and exits                       |
//! | `containerOccupied`| 1.0 on container cells                                    |
//!
//! `color_slots` is normally the level's color count; a policy trained across
//! levels with different color counts uses the largest count, leaving unused
//! slots at zero.

use crate::engine::{Board, GoalKind, GoalTally, Level, Piece};

pub const FIXED_CHANNELS: [&str; 4] = [
    "clickableFalse",
    "isCollectGoal",
    "teleporter",
    "containerOccupied",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObsError {
    #[error("board is {got_w}x{got_h} but the encoder expects {want_w}x{want_h}")]
    DimensionMismatch {
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },
    #[error("level uses {colors} colors but only {slots} color slots are encoded")]
    TooManyColors { colors: usize, slots: usize },
    #[error("not a permutation of 0..{0}")]
    BadPermutation(usize),
}

/// Ordered channel names; serialized into checkpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelLegend(pub Vec<String>);

impl ChannelLegend {
    pub fn new(color_slots: usize) -> Self {
        let mut names: Vec<String> = (0..color_slots).map(|k| format!("color{k}")).collect();
        names.extend(FIXED_CHANNELS.iter().map(|s| s.to_string()));
        ChannelLegend(names)
    }

    pub fn channels(&self) -> usize {
        self.0.len()
    }

    pub fn color_slots(&self) -> usize {
        self.0.len().saturating_sub(FIXED_CHANNELS.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub width: usize,
    pub height: usize,
    pub color_slots: usize,
    pub tensor: Vec<f32>,
    pub mask: Vec<bool>,
}

impl Observation {
    #[inline]
    pub fn channels(&self) -> usize {
        self.color_slots + FIXED_CHANNELS.len()
    }

    pub fn legend(&self) -> ChannelLegend {
        ChannelLegend::new(self.color_slots)
    }

    #[inline]
    pub fn value(&self, cell: usize, channel: usize) -> f32 {
        self.tensor[cell * self.channels() + channel]
    }

    /// One channel as a `height * width` plane.
    pub fn plane(&self, channel: usize) -> Vec<f32> {
        let m = self.channels();
        self.tensor
            .iter()
            .skip(channel)
            .step_by(m)
            .copied()
            .collect()
    }

    pub fn any_valid(&self) -> bool {
        self.mask.iter().any(|m| *m)
    }
}

/// Encodes `board` for `level` given the goal progress so far.
pub fn encode(
    board: &Board,
    level: &Level,
    progress: &GoalTally,
    color_slots: usize,
) -> Result<Observation, ObsError> {
    if board.width() != level.width || board.height() != level.height {
        return Err(ObsError::DimensionMismatch {
            got_w: board.width(),
            got_h: board.height(),
            want_w: level.width,
            want_h: level.height,
        });
    }
    if level.color_count as usize > color_slots {
        return Err(ObsError::TooManyColors {
            colors: level.color_count as usize,
            slots: color_slots,
        });
    }
    let m = color_slots + FIXED_CHANNELS.len();
    let clickable_false = color_slots;
    let goal_ch = color_slots + 1;
    let tele_ch = color_slots + 2;
    let container_ch = color_slots + 3;

    let remaining = |kind: GoalKind| -> f32 {
        match level.goals.get(&kind) {
            Some(need) => need.saturating_sub(progress.get(&kind).copied().unwrap_or(0)) as f32,
            None => 0.0,
        }
    };
    let open = |kind: GoalKind| remaining(kind) > 0.0;
    let mut color_remaining = [0.0f32; crate::engine::MAX_COLORS];
    for (c, slot) in color_remaining.iter_mut().enumerate() {
        *slot = remaining(GoalKind::CollectColor(c as u8));
    }
    let rock_goal = open(GoalKind::ClearRock);
    let grass_goal = open(GoalKind::ClearGrass);
    let container_goal = open(GoalKind::ClearContainer);

    let cells = board.width() * board.height();
    let mut tensor = vec![0.0f32; cells * m];
    for (idx, piece) in board.cells().iter().enumerate() {
        let px = &mut tensor[idx * m..(idx + 1) * m];
        match *piece {
            Piece::Empty => {}
            Piece::Color(c) => {
                px[c as usize] = 1.0;
                px[goal_ch] = color_remaining[c as usize];
            }
            Piece::Rock { hp } => {
                px[clickable_false] = f32::from(hp);
                if rock_goal {
                    px[goal_ch] = f32::from(hp);
                }
            }
            Piece::Grass => {
                px[clickable_false] = 1.0;
                if grass_goal {
                    px[goal_ch] = 1.0;
                }
            }
            Piece::Container { id } => {
                let hp = f32::from(board.container_hp_of(id));
                px[clickable_false] = hp;
                px[container_ch] = 1.0;
                if container_goal {
                    px[goal_ch] = hp;
                }
            }
            Piece::Teleporter { .. } => px[tele_ch] = 1.0,
        }
    }
    Ok(Observation {
        width: board.width(),
        height: board.height(),
        color_slots,
        tensor,
        mask: board.valid_actions(),
    })
}

/// Moves color channel `c` to slot `perm[c]`. Other channels and the mask are
/// untouched.
pub fn shuffle_colors(obs: &Observation, perm: &[usize]) -> Result<Observation, ObsError> {
    let k = obs.color_slots;
    let mut seen = vec![false; k];
    if perm.len() != k
        || perm
            .iter()
            .any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
    {
        return Err(ObsError::BadPermutation(k));
    }
    let m = obs.channels();
    let mut out = obs.clone();
    for (src, dst) in obs
        .tensor
        .chunks_exact(m)
        .zip(out.tensor.chunks_exact_mut(m))
    {
        for (c, &p) in perm.iter().enumerate() {
            dst[p] = src[c];
        }
    }
    Ok(out)
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn board_of(width: usize, height: usize, cells: Vec<Piece>) -> Board {
        Board::from_cells(width, height, cells, BTreeMap::new(), &[0.5, 0.5], 0)
    }

    fn level(width: usize, height: usize) -> Level {
        Level::blank("obs", width, height, 2)
    }

    #[test]
    fn empty_board_encodes_to_zeros() {
        let b = board_of(3, 2, vec![Piece::Empty; 6]);
        let obs = encode(&b, &level(3, 2), &GoalTally::new(), 2).unwrap();
        assert_eq!(obs.tensor.len(), 6 * 6);
        assert!(obs.tensor.iter().all(|v| *v == 0.0));
        assert!(obs.mask.iter().all(|m| !m));
    }

    #[test]
    fn rock_hp_is_raw() {
        let mut cells = vec![Piece::Empty; 9 * 13];
        let idx = 5 * 9 + 2; // row 5, col 2
        cells[idx] = Piece::Rock { hp: 3 };
        let b = board_of(9, 13, cells);
        let obs = encode(&b, &level(9, 13), &GoalTally::new(), 2).unwrap();
        assert_eq!(obs.value(idx, 2), 3.0);
        assert_eq!(obs.legend().0[2], "clickableFalse");
    }

    #[test]
    fn red_pair_sets_channel_and_mask() {
        let mut cells = vec![Piece::Empty; 4];
        cells[2] = Piece::Color(0);
        cells[3] = Piece::Color(0);
        let b = board_of(2, 2, cells);
        let mut lvl = level(2, 2);
        lvl.goals.insert(GoalKind::CollectColor(0), 5);
        let mut progress = GoalTally::new();
        progress.insert(GoalKind::CollectColor(0), 2);
        let obs = encode(&b, &lvl, &progress, 2).unwrap();
        assert_eq!(obs.plane(0), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(obs.plane(3), vec![0.0, 0.0, 3.0, 3.0]);
        assert_eq!(obs.mask, vec![false, false, true, true]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let b = board_of(2, 2, vec![Piece::Empty; 4]);
        assert!(matches!(
            encode(&b, &level(3, 2), &GoalTally::new(), 2),
            Err(ObsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn swap_exchanges_color_channels() {
        let b = board_of(2, 1, vec![Piece::Color(0), Piece::Color(1)]);
        let obs = encode(&b, &level(2, 1), &GoalTally::new(), 2).unwrap();
        let swapped = shuffle_colors(&obs, &[1, 0]).unwrap();
        assert_eq!(swapped.plane(0), obs.plane(1));
        assert_eq!(swapped.plane(1), obs.plane(0));
        assert_eq!(swapped.mask, obs.mask);
        assert_eq!(shuffle_colors(&obs, &[0, 1]).unwrap(), obs);
        let back = shuffle_colors(&swapped, &invert_permutation(&[1, 0])).unwrap();
        assert_eq!(back, obs);
        assert!(shuffle_colors(&obs, &[0, 0]).is_err());
        assert!(shuffle_colors(&obs, &[0]).is_err());
    }
}
