use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::gravity::FallChains;
use super::level::Level;
use super::piece::{GoalKind, GoalTally, Piece};
use crate::rng::{rng_from_seed, SimRng};

/// Attempts made by [`Board::shuffle_dead_board`] before giving up.
pub const SHUFFLE_RETRY_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid action at cell {0}: not part of a clickable cluster")]
    InvalidAction(usize),
    #[error("dead board cannot be reshuffled into a playable state")]
    Unresolvable,
    #[error("shuffle requested on a board that already has a valid action")]
    NotDead,
}

/// Maximal 4-connected group of same-colored pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub color: u8,
    /// Cell indices in ascending order.
    pub cells: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DamageTarget {
    Cell(usize),
    Container(u8),
}

/// Everything that happened while resolving one tap.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MoveOutcome {
    /// Cluster cells and destroyed blockers, with the piece each held.
    pub removed_cells: Vec<(usize, Piece)>,
    pub blocker_damage: Vec<(DamageTarget, i32)>,
    pub goals_collected: GoalTally,
    pub grass_spread: Vec<usize>,
    pub teleported: Vec<(usize, usize)>,
    pub refilled: Vec<(usize, u8)>,
}

/// Mutable play state: the grid plus the generator that drives refills.
///
/// Cells are stored row-major, row 0 at the top; index = `row * width + col`.
#[derive(Clone, Debug, PartialEq)]
pub struct Board {
    width: usize,
    height: usize,
    cells: Vec<Piece>,
    container_hp: BTreeMap<u8, u8>,
    refill_cdf: Vec<f64>,
    chains: FallChains,
    rng: SimRng,
}

impl Board {
    /// Lays out `level` and fills its open cells from the seeded generator.
    ///
    /// The level must have passed validation. The resulting board may be dead;
    /// [`crate::engine::Game`] handles reshuffling.
    pub fn from_level(level: &Level, seed: u64) -> Board {
        let mut board = Board::from_cells(
            level.width,
            level.height,
            level.layout.clone(),
            level.container_hp.clone(),
            &level.refill_weights,
            seed,
        );
        let mut scratch = MoveOutcome::default();
        board.settle_and_refill(&mut scratch);
        board
    }

    /// Builds a board from explicit cells without settling them.
    ///
    /// # Panics
    /// If `cells.len() != width * height` or teleporters form a cycle.
    pub fn from_cells(
        width: usize,
        height: usize,
        cells: Vec<Piece>,
        container_hp: BTreeMap<u8, u8>,
        refill_weights: &[f64],
        seed: u64,
    ) -> Board {
        assert_eq!(cells.len(), width * height, "cell count mismatch");
        let chains = FallChains::build(width, height, &cells).expect("teleporter cycle");
        let total: f64 = refill_weights.iter().sum();
        let mut acc = 0.0;
        let refill_cdf = refill_weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Board {
            width,
            height,
            cells,
            container_hp,
            refill_cdf,
            chains,
            rng: rng_from_seed(seed),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn cells(&self) -> &[Piece] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Piece {
        self.cells[idx]
    }

    pub fn container_hp(&self) -> &BTreeMap<u8, u8> {
        &self.container_hp
    }

    pub fn container_hp_of(&self, id: u8) -> u8 {
        self.container_hp.get(&id).copied().unwrap_or(0)
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// 4-neighbours of `idx` (up, left, right, down).
    #[inline]
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> {
        neighbors(self.width, self.height, idx)
    }

    /// Maximal 4-connected same-color clusters, singletons included, in order
    /// of their smallest cell.
    pub fn find_clusters(&self) -> Vec<Cluster> {
        label_clusters(self.width, self.height, |i| self.cells[i].color())
    }

    /// Cells that may be tapped: color pieces with a same-colored neighbour.
    pub fn valid_actions(&self) -> Vec<bool> {
        (0..self.cells.len())
            .map(|i| self.is_valid_action(i))
            .collect()
    }

    #[inline]
    pub fn is_valid_action(&self, idx: usize) -> bool {
        match self.cells.get(idx).and_then(|p| p.color()) {
            Some(c) => self
                .neighbors(idx)
                .any(|n| self.cells[n] == Piece::Color(c)),
            None => false,
        }
    }

    pub fn has_valid_action(&self) -> bool {
        (0..self.cells.len()).any(|i| self.is_valid_action(i))
    }

    fn cluster_at(&self, idx: usize) -> Vec<usize> {
        let color = self.cells[idx];
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![idx];
        let mut out = Vec::new();
        seen[idx] = true;
        while let Some(cur) = stack.pop() {
            out.push(cur);
            for n in self.neighbors(cur) {
                if !seen[n] && self.cells[n] == color {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Resolves a tap at `pos`.
    ///
    /// Order: remove the cluster; damage adjacent rocks and containers (1 hp
    /// per move each); clear adjacent grass, or spread grass by one cell if
    /// none was adjacent; settle pieces along their fall paths; refill the
    /// vacated top cells; tally goals.
    pub fn apply_move(&mut self, pos: usize) -> Result<MoveOutcome, EngineError> {
        if !self.is_valid_action(pos) {
            return Err(EngineError::InvalidAction(pos));
        }
        let mut out = MoveOutcome::default();
        let n = self.cells.len();

        let cluster = self.cluster_at(pos);
        let color = self.cells[pos].color().expect("valid action is a color");
        let mut in_cluster = vec![false; n];
        for &c in &cluster {
            in_cluster[c] = true;
            out.removed_cells.push((c, self.cells[c]));
            self.cells[c] = Piece::Empty;
        }
        *out.goals_collected
            .entry(GoalKind::CollectColor(color))
            .or_insert(0) += cluster.len() as u32;

        let mut touched = vec![false; n];
        let mut adjacent = Vec::new();
        for &c in &cluster {
            for nb in neighbors(self.width, self.height, c) {
                if !in_cluster[nb] && !touched[nb] {
                    touched[nb] = true;
                    adjacent.push(nb);
                }
            }
        }
        adjacent.sort_unstable();

        let mut structure_changed = false;
        let mut hit_containers: Vec<u8> = Vec::new();
        let mut adjacent_grass = Vec::new();
        for &cell in &adjacent {
            match self.cells[cell] {
                Piece::Rock { hp } => {
                    out.blocker_damage.push((DamageTarget::Cell(cell), -1));
                    if hp <= 1 {
                        out.removed_cells.push((cell, self.cells[cell]));
                        self.cells[cell] = Piece::Empty;
                        *out.goals_collected.entry(GoalKind::ClearRock).or_insert(0) += 1;
                    } else {
                        self.cells[cell] = Piece::Rock { hp: hp - 1 };
                    }
                }
                Piece::Container { id } if !hit_containers.contains(&id) => {
                    hit_containers.push(id);
                }
                Piece::Grass => adjacent_grass.push(cell),
                _ => {}
            }
        }
        hit_containers.sort_unstable();
        for id in hit_containers {
            out.blocker_damage.push((DamageTarget::Container(id), -1));
            let hp = self.container_hp.get_mut(&id).expect("container hp");
            *hp = hp.saturating_sub(1);
            if *hp == 0 {
                self.container_hp.remove(&id);
                for cell in 0..n {
                    if self.cells[cell] == (Piece::Container { id }) {
                        out.removed_cells.push((cell, self.cells[cell]));
                        self.cells[cell] = Piece::Empty;
                    }
                }
                *out.goals_collected
                    .entry(GoalKind::ClearContainer)
                    .or_insert(0) += 1;
                structure_changed = true;
            }
        }

        if !adjacent_grass.is_empty() {
            for &cell in &adjacent_grass {
                out.removed_cells.push((cell, Piece::Grass));
                self.cells[cell] = Piece::Empty;
            }
            *out.goals_collected.entry(GoalKind::ClearGrass).or_insert(0) +=
                adjacent_grass.len() as u32;
            structure_changed = true;
        } else if let Some(target) = self.pick_grass_spread() {
            self.cells[target] = Piece::Grass;
            out.grass_spread.push(target);
            structure_changed = true;
        }

        if structure_changed {
            self.rebuild_chains();
        }
        self.settle_and_refill(&mut out);
        Ok(out)
    }

    fn pick_grass_spread(&mut self) -> Option<usize> {
        let mut candidates = Vec::new();
        for (idx, piece) in self.cells.iter().enumerate() {
            if matches!(piece, Piece::Empty | Piece::Color(_))
                && self.neighbors(idx).any(|nb| self.cells[nb] == Piece::Grass)
            {
                candidates.push(idx);
            }
        }
        if candidates.is_empty() {
            return None;
        }
        let pick = self.rng.random_range(0..candidates.len());
        Some(candidates[pick])
    }

    fn rebuild_chains(&mut self) {
        self.chains =
            FallChains::build(self.width, self.height, &self.cells).expect("teleporter cycle");
    }

    /// Drops movable pieces along their fall paths. Idempotent.
    pub fn apply_gravity(&mut self) -> Vec<(usize, usize)> {
        let mut teleported = Vec::new();
        self.chains.settle(&mut self.cells, &mut teleported);
        teleported
    }

    fn settle_and_refill(&mut self, out: &mut MoveOutcome) {
        self.chains.settle(&mut self.cells, &mut out.teleported);
        let slots: Vec<usize> = self.chains.spawn_slots(&self.cells).collect();
        for slot in slots {
            let color = self.draw_refill_color();
            self.cells[slot] = Piece::Color(color);
            out.refilled.push((slot, color));
        }
    }

    fn draw_refill_color(&mut self) -> u8 {
        let u: f64 = self.rng.random();
        self.refill_cdf
            .iter()
            .position(|&edge| u < edge)
            .unwrap_or(self.refill_cdf.len() - 1) as u8
    }

    /// Re-deals the colors of all color pieces among their current cells until
    /// some cluster of size two exists. Other pieces are left in place.
    pub fn shuffle_dead_board(&mut self) -> Result<(), EngineError> {
        if self.has_valid_action() {
            return Err(EngineError::NotDead);
        }
        let slots: Vec<usize> = (0..self.cells.len())
            .filter(|&i| self.cells[i].color().is_some())
            .collect();
        let mut colors: Vec<u8> = slots
            .iter()
            .map(|&i| self.cells[i].color().unwrap())
            .collect();
        let adjacent_slots = slots
            .iter()
            .any(|&s| self.neighbors(s).any(|nb| self.cells[nb].color().is_some()));
        if slots.len() < 2 || !adjacent_slots {
            return Err(EngineError::Unresolvable);
        }
        let original = colors.clone();
        for _ in 0..SHUFFLE_RETRY_CAP {
            colors.shuffle(&mut self.rng);
            for (slot, color) in slots.iter().zip(&colors) {
                self.cells[*slot] = Piece::Color(*color);
            }
            if self.has_valid_action() {
                return Ok(());
            }
        }
        for (slot, color) in slots.iter().zip(&original) {
            self.cells[*slot] = Piece::Color(*color);
        }
        Err(EngineError::Unresolvable)
    }
}

#[inline]
pub(crate) fn neighbors(width: usize, height: usize, idx: usize) -> impl Iterator<Item = usize> {
    let row = idx / width;
    let col = idx % width;
    let up = (row > 0).then(|| idx - width);
    let left = (col > 0).then(|| idx - 1);
    let right = (col + 1 < width).then(|| idx + 1);
    let down = (row + 1 < height).then(|| idx + width);
    [up, left, right, down].into_iter().flatten()
}

/// Flood-fill labelling over any color grid; `color_of` returns `None` for
/// cells that are not color pieces.
pub fn label_clusters(
    width: usize,
    height: usize,
    color_of: impl Fn(usize) -> Option<u8>,
) -> Vec<Cluster> {
    let n = width * height;
    let mut seen = vec![false; n];
    let mut clusters = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let Some(color) = color_of(start) else {
            continue;
        };
        seen[start] = true;
        stack.push(start);
        let mut cells = Vec::new();
        while let Some(cur) = stack.pop() {
            cells.push(cur);
            for nb in neighbors(width, height, cur) {
                if !seen[nb] && color_of(nb) == Some(color) {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        cells.sort_unstable();
        clusters.push(Cluster { color, cells });
    }
    clusters
}
