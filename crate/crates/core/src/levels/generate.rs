//! Procedural level sets.
//!
//! A curriculum is a list of tiers. Each tier may introduce one mechanic and
//! carries ranges for the difficulty knobs; every level of tier `t` draws its
//! knobs from tier `t`'s ranges and may only use mechanics introduced at tiers
//! `<= t`. Each level's generator is seeded from `(spec.seed, level number)`,
//! so regenerating any single level does not depend on its siblings.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::search::winnable_within;
use crate::engine::{
    greedy_action, Game, GoalKind, Level, Piece, PortalRole, DEFAULT_HEIGHT, DEFAULT_WIDTH,
};
use crate::rng::{derive_seed, rng_from_seed, SimRng};

/// Hit points of a freshly placed container.
pub const CONTAINER_HP: u8 = 10;

/// Boards at or below this many cells are certified by exhaustive search.
pub const EXACT_SEARCH_MAX_CELLS: usize = 16;
const SEARCH_NODE_BUDGET: usize = 200_000;
/// Greedy certification: at least `GREEDY_MIN_WINS` of `GREEDY_TRIES` seeded
/// greedy runs must finish within `GREEDY_SLACK` times the move limit.
pub const GREEDY_TRIES: u64 = 20;
pub const GREEDY_MIN_WINS: usize = 10;
pub const GREEDY_SLACK: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanic {
    Rock1,
    Rock2,
    Rock3,
    Grass,
    Teleporter,
    Container,
}

impl Mechanic {
    pub const ALL: [Mechanic; 6] = [
        Mechanic::Rock1,
        Mechanic::Rock2,
        Mechanic::Rock3,
        Mechanic::Grass,
        Mechanic::Teleporter,
        Mechanic::Container,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanic::Rock1 => "rock1",
            Mechanic::Rock2 => "rock2",
            Mechanic::Rock3 => "rock3",
            Mechanic::Grass => "grass",
            Mechanic::Teleporter => "teleporter",
            Mechanic::Container => "container",
        }
    }

    pub fn parse(name: &str) -> Option<Mechanic> {
        Mechanic::ALL.into_iter().find(|m| m.name() == name)
    }

    fn is_scattered_blocker(self) -> bool {
        matches!(
            self,
            Mechanic::Rock1 | Mechanic::Rock2 | Mechanic::Rock3 | Mechanic::Grass
        )
    }

    /// Whether `piece` is an instance of this mechanic.
    pub fn matches(self, piece: Piece) -> bool {
        matches!(
            (self, piece),
            (Mechanic::Rock1, Piece::Rock { hp: 1 })
                | (Mechanic::Rock2, Piece::Rock { hp: 2 })
                | (Mechanic::Rock3, Piece::Rock { hp: 3 })
                | (Mechanic::Grass, Piece::Grass)
                | (Mechanic::Teleporter, Piece::Teleporter { .. })
                | (Mechanic::Container, Piece::Container { .. })
        )
    }
}

/// Mechanics present in a level's layout.
pub fn mechanics_in(level: &Level) -> Vec<Mechanic> {
    Mechanic::ALL
        .into_iter()
        .filter(|m| level.layout.iter().any(|p| m.matches(*p)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnobRanges {
    pub blocker_density: (f64, f64),
    pub goal_count: (u32, u32),
    pub color_count: (u8, u8),
    pub move_limit: (u32, u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TierSpec {
    pub introduces: Option<Mechanic>,
    pub knobs: KnobRanges,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurriculumSpec {
    pub width: usize,
    pub height: usize,
    /// Nominal levels per tier; drives level numbering.
    pub tier_size: usize,
    /// Levels actually generated per tier.
    pub per_tier_count: usize,
    pub tiers: Vec<TierSpec>,
    pub seed: u64,
    pub retry_budget: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("invalid curriculum spec: {0}")]
    InvalidSpec(String),
    #[error("could not generate a valid level {level} within {retries} attempts")]
    GenerationFailure { level: String, retries: usize },
}

/// Mechanic introductions of the default ten-tier curriculum.
pub const DEFAULT_INTRODUCTIONS: [Option<Mechanic>; 10] = [
    None,
    Some(Mechanic::Rock1),
    None,
    Some(Mechanic::Grass),
    None,
    Some(Mechanic::Rock2),
    None,
    Some(Mechanic::Rock3),
    None,
    None,
];

/// Knob ranges for tier `tier` on a board with `cells` cells. Every bound is
/// non-decreasing in `tier`.
pub fn default_knobs(cells: usize, tier: usize) -> KnobRanges {
    let t = tier as f64;
    let cells = cells as f64;
    let goal_lo = (cells * (0.15 + 0.02 * t)).round().max(4.0) as u32;
    let goal_hi = (cells * (0.20 + 0.02 * t)).round().max(5.0) as u32;
    let density = if tier == 0 {
        (0.0, 0.0)
    } else {
        (0.02 * t.min(6.0), 0.03 + 0.02 * t.min(6.0))
    };
    let colors = match tier {
        0..=3 => (3, 3),
        4..=6 => (3, 4),
        _ => (4, 4),
    };
    let move_lo = (f64::from(goal_lo) * 0.5).round() as u32 + 4;
    let move_hi = (f64::from(goal_hi) * 0.6).round() as u32 + 6;
    KnobRanges {
        blocker_density: density,
        goal_count: (goal_lo, goal_hi),
        color_count: colors,
        move_limit: (move_lo, move_hi),
    }
}

impl Default for CurriculumSpec {
    fn default() -> Self {
        CurriculumSpec::with_dims(DEFAULT_WIDTH, DEFAULT_HEIGHT, 10, 10, 0)
    }
}

impl CurriculumSpec {
    /// The default staging on a `width x height` board, `tiers` tiers deep.
    pub fn with_dims(
        width: usize,
        height: usize,
        tiers: usize,
        per_tier_count: usize,
        seed: u64,
    ) -> Self {
        let tiers = (0..tiers)
            .map(|t| TierSpec {
                introduces: DEFAULT_INTRODUCTIONS.get(t).copied().flatten(),
                knobs: default_knobs(width * height, t),
            })
            .collect();
        CurriculumSpec {
            width,
            height,
            tier_size: 10,
            per_tier_count,
            tiers,
            seed,
            retry_budget: 50,
        }
    }

    pub fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: &str| Err(GenerationError::InvalidSpec(m.to_string()));
        if self.width < 2 || self.height < 2 {
            return bad("board must be at least 2x2");
        }
        if self.tiers.is_empty() {
            return bad("no tiers");
        }
        if self.per_tier_count > self.tier_size.max(1) * 1000 {
            return bad("per-tier count is unreasonably large");
        }
        for (i, tier) in self.tiers.iter().enumerate() {
            let k = &tier.knobs;
            if k.blocker_density.0 > k.blocker_density.1
                || k.blocker_density.0 < 0.0
                || k.blocker_density.1 > 0.8
            {
                return bad(&format!("tier {i}: blocker density range invalid"));
            }
            if k.goal_count.0 == 0 || k.goal_count.0 > k.goal_count.1 {
                return bad(&format!("tier {i}: goal range invalid"));
            }
            if k.color_count.0 < 2 || k.color_count.0 > k.color_count.1 || k.color_count.1 > 6 {
                return bad(&format!("tier {i}: color range invalid"));
            }
            if k.move_limit.0 == 0 || k.move_limit.0 > k.move_limit.1 {
                return bad(&format!("tier {i}: move limit range invalid"));
            }
        }
        Ok(())
    }

    /// Mechanics available at `tier` (introduced at or before it).
    pub fn mechanics_at(&self, tier: usize) -> Vec<Mechanic> {
        let mut out: Vec<Mechanic> = self.tiers[..=tier]
            .iter()
            .filter_map(|t| t.introduces)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Knobs {
    density: f64,
    goal: u32,
    colors: u8,
    move_limit: u32,
}

fn draw_knobs(r: &KnobRanges, rng: &mut SimRng) -> Knobs {
    let density = if r.blocker_density.1 > r.blocker_density.0 {
        rng.random_range(r.blocker_density.0..=r.blocker_density.1)
    } else {
        r.blocker_density.0
    };
    Knobs {
        density,
        goal: rng.random_range(r.goal_count.0..=r.goal_count.1),
        colors: rng.random_range(r.color_count.0..=r.color_count.1),
        move_limit: rng.random_range(r.move_limit.0..=r.move_limit.1),
    }
}

struct Draft {
    width: usize,
    height: usize,
    layout: Vec<Piece>,
    container_hp: BTreeMap<u8, u8>,
}

impl Draft {
    fn free_cells(&self) -> Vec<usize> {
        (0..self.layout.len())
            .filter(|&i| self.layout[i] == Piece::Empty)
            .collect()
    }

    fn place_teleporter(&mut self, pair: u8, rng: &mut SimRng) -> bool {
        // entry at the bottom of one column, exit on top of another
        let bottom = (self.height - 1) * self.width;
        let mut cols: Vec<usize> = (0..self.width).collect();
        cols.shuffle(rng);
        for &a in &cols {
            for &b in &cols {
                let entry = bottom + a;
                if a == b || self.layout[entry] != Piece::Empty || self.layout[b] != Piece::Empty {
                    continue;
                }
                self.layout[entry] = Piece::Teleporter {
                    pair,
                    role: PortalRole::Entry,
                };
                self.layout[b] = Piece::Teleporter {
                    pair,
                    role: PortalRole::Exit,
                };
                return true;
            }
        }
        false
    }

    fn place_container(&mut self, id: u8, rng: &mut SimRng) -> bool {
        if self.width < 2 || self.height < 2 {
            return false;
        }
        // resting on the floor so nothing is left stranded underneath
        let row = self.height - 2;
        let mut cols: Vec<usize> = (0..self.width - 1).collect();
        cols.shuffle(rng);
        for col in cols {
            let tl = row * self.width + col;
            let block = [tl, tl + 1, tl + self.width, tl + self.width + 1];
            if block.iter().all(|&c| self.layout[c] == Piece::Empty) {
                for c in block {
                    self.layout[c] = Piece::Container { id };
                }
                self.container_hp.insert(id, CONTAINER_HP);
                return true;
            }
        }
        false
    }
}

fn blocker_piece(m: Mechanic) -> Piece {
    match m {
        Mechanic::Rock1 => Piece::Rock { hp: 1 },
        Mechanic::Rock2 => Piece::Rock { hp: 2 },
        Mechanic::Rock3 => Piece::Rock { hp: 3 },
        Mechanic::Grass => Piece::Grass,
        _ => unreachable!("not a scattered blocker"),
    }
}

/// Builds one candidate level. `required` mechanics are guaranteed to appear.
fn draft_level(
    id: &str,
    width: usize,
    height: usize,
    knobs: Knobs,
    available: &[Mechanic],
    required: &[Mechanic],
    rng: &mut SimRng,
) -> Option<Level> {
    let mut draft = Draft {
        width,
        height,
        layout: vec![Piece::Empty; width * height],
        container_hp: BTreeMap::new(),
    };

    let wants = |m: Mechanic, rng: &mut SimRng| {
        required.contains(&m) || (available.contains(&m) && rng.random_bool(0.5))
    };
    if wants(Mechanic::Teleporter, rng) && !draft.place_teleporter(0, rng) {
        return None;
    }
    if wants(Mechanic::Container, rng) && !draft.place_container(0, rng) {
        return None;
    }

    let scattered: Vec<Mechanic> = available
        .iter()
        .copied()
        .filter(|m| m.is_scattered_blocker())
        .collect();
    let mut blockers: Vec<Mechanic> = required
        .iter()
        .copied()
        .filter(|m| m.is_scattered_blocker())
        .collect();
    let target = (knobs.density * (width * height) as f64).round() as usize;
    if !scattered.is_empty() {
        while blockers.len() < target {
            blockers.push(*scattered.choose(rng).unwrap());
        }
    }
    let free = draft.free_cells();
    let lower_half: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&i| i / width >= height / 2)
        .collect();
    let mut anywhere = free.clone();
    anywhere.shuffle(rng);
    let mut lower = lower_half;
    lower.shuffle(rng);
    for m in blockers {
        // grass is static; keep it low so it does not strand whole columns
        let pool = if m == Mechanic::Grass {
            &mut lower
        } else {
            &mut anywhere
        };
        let cell = loop {
            let c = pool.pop()?;
            if draft.layout[c] == Piece::Empty {
                break c;
            }
        };
        draft.layout[cell] = blocker_piece(m);
    }

    let colors = knobs.colors;
    let mut level = Level::blank(id, width, height, colors);
    level.layout = draft.layout;
    level.container_hp = draft.container_hp;
    level.move_limit = knobs.move_limit;
    let goal_color = rng.random_range(0..colors);
    level
        .goals
        .insert(GoalKind::CollectColor(goal_color), knobs.goal);

    let rocks = level.count_pieces(|p| matches!(p, Piece::Rock { .. })) as u32;
    let grass = level.count_pieces(|p| p == Piece::Grass) as u32;
    if rocks > 0 && rng.random_bool(0.5) {
        level.goals.insert(GoalKind::ClearRock, rocks);
    }
    if grass > 0 && rng.random_bool(0.5) {
        level.goals.insert(GoalKind::ClearGrass, grass);
    }
    if !level.container_hp.is_empty() && rng.random_bool(0.5) {
        level
            .goals
            .insert(GoalKind::ClearContainer, level.container_hp.len() as u32);
    }
    level
        .tags
        .insert("density".into(), format!("{:.4}", knobs.density));
    level.tags.insert("goal".into(), knobs.goal.to_string());
    level.validate().ok()?;
    Some(level)
}

/// Certifies that a level can be won: exhaustively on tiny boards, otherwise
/// statistically with the greedy player.
pub fn certify_winnable(level: &Level, seed: u64) -> bool {
    let level = Arc::new(level.clone());
    if level.cells() <= EXACT_SEARCH_MAX_CELLS {
        return winnable_within(
            &level,
            derive_seed(seed, 0),
            level.move_limit,
            SEARCH_NODE_BUDGET,
        )
        .is_some();
    }
    let cap = level.move_limit * GREEDY_SLACK;
    let wins = (0..GREEDY_TRIES)
        .filter(|&i| {
            let mut game = Game::new(Arc::clone(&level), derive_seed(seed, i));
            while !game.is_over() && game.moves() < cap {
                let Some(action) = greedy_action(game.board()) else {
                    break;
                };
                if game.step(action).is_err() {
                    return false;
                }
            }
            game.is_won()
        })
        .count();
    wins >= GREEDY_MIN_WINS
}

struct LevelRequest<'a> {
    id: String,
    seed: u64,
    knobs: &'a KnobRanges,
    available: Vec<Mechanic>,
    required: Vec<Mechanic>,
    tags: Vec<(&'static str, String)>,
}

fn build_level(spec: &CurriculumSpec, req: LevelRequest<'_>) -> Result<Level, GenerationError> {
    let mut rng = rng_from_seed(req.seed);
    for _ in 0..spec.retry_budget.max(1) {
        let knobs = draw_knobs(req.knobs, &mut rng);
        let Some(mut level) = draft_level(
            &req.id,
            spec.width,
            spec.height,
            knobs,
            &req.available,
            &req.required,
            &mut rng,
        ) else {
            continue;
        };
        for (k, v) in &req.tags {
            level.tags.insert((*k).to_string(), v.clone());
        }
        let cert_seed: u64 = rng.random();
        if certify_winnable(&level, cert_seed) {
            level.tags.insert("cert-seed".into(), cert_seed.to_string());
            return Ok(level);
        }
    }
    Err(GenerationError::GenerationFailure {
        level: req.id,
        retries: spec.retry_budget,
    })
}

/// `|tiers| * per_tier_count` levels, staged by tier.
pub fn generate_curriculum(spec: &CurriculumSpec) -> Result<Vec<Level>, GenerationError> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.tiers.len() * spec.per_tier_count);
    for (t, tier) in spec.tiers.iter().enumerate() {
        let available = spec.mechanics_at(t);
        for j in 0..spec.per_tier_count {
            let number = t * spec.tier_size + j + 1;
            out.push(build_level(
                spec,
                LevelRequest {
                    id: format!("level-{number:03}"),
                    seed: derive_seed(spec.seed, number as u64),
                    knobs: &tier.knobs,
                    available: available.clone(),
                    required: tier.introduces.into_iter().collect(),
                    tags: vec![("tier", t.to_string())],
                },
            )?);
        }
    }
    Ok(out)
}

/// Evaluation levels following the curriculum.
///
/// With new mechanics, every level mixes all training mechanics with at least
/// one of `new_mechanics`, at the last tier's difficulty. Without, level `i`
/// revisits tier `i + 1` (the "third level of each later tier" pattern).
pub fn generate_eval_set(
    spec: &CurriculumSpec,
    count: usize,
    new_mechanics: &[Mechanic],
) -> Result<Vec<Level>, GenerationError> {
    spec.validate()?;
    let last = spec.tiers.len() - 1;
    let training = spec.mechanics_at(last);
    let first_number = spec.tiers.len() * spec.tier_size + 1;
    (0..count)
        .map(|i| {
            if new_mechanics.is_empty() {
                let tier = (i + 1) % spec.tiers.len();
                let number = tier * spec.tier_size + 3;
                build_level(
                    spec,
                    LevelRequest {
                        id: format!("back-{number:03}"),
                        seed: derive_seed(spec.seed ^ 0xBAC, number as u64),
                        knobs: &spec.tiers[tier].knobs,
                        available: spec.mechanics_at(tier),
                        required: Vec::new(),
                        tags: vec![("tier", tier.to_string())],
                    },
                )
            } else {
                let number = first_number + i;
                let mut available = training.clone();
                available.extend_from_slice(new_mechanics);
                build_level(
                    spec,
                    LevelRequest {
                        id: format!("level-{number:03}"),
                        seed: derive_seed(spec.seed, number as u64),
                        knobs: &spec.tiers[last].knobs,
                        available,
                        required: vec![new_mechanics[i % new_mechanics.len()]],
                        tags: vec![("tier", "eval".to_string())],
                    },
                )
            }
        })
        .collect()
}

/// Levels along a single monotone difficulty knob: goal size and rock density
/// rise linearly from the easy end to the hard end; the move limit is fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub width: usize,
    pub height: usize,
    pub count: usize,
    pub color_count: u8,
    pub goal_count: (u32, u32),
    pub rock_density: (f64, f64),
    pub move_limit: u32,
    pub seed: u64,
}

impl LadderSpec {
    pub fn difficulty(&self, i: usize) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            i as f64 / (self.count - 1) as f64
        }
    }
}

pub fn generate_ladder(spec: &LadderSpec) -> Result<Vec<Level>, GenerationError> {
    let host = CurriculumSpec {
        width: spec.width,
        height: spec.height,
        tier_size: 1,
        per_tier_count: 1,
        tiers: Vec::new(),
        seed: spec.seed,
        retry_budget: 50,
    };
    (0..spec.count)
        .map(|i| {
            let d = spec.difficulty(i);
            let lerp = |a: f64, b: f64| a + (b - a) * d;
            let goal =
                lerp(f64::from(spec.goal_count.0), f64::from(spec.goal_count.1)).round() as u32;
            let density = lerp(spec.rock_density.0, spec.rock_density.1);
            let knobs = KnobRanges {
                blocker_density: (density, density),
                goal_count: (goal, goal),
                color_count: (spec.color_count, spec.color_count),
                move_limit: (spec.move_limit, spec.move_limit),
            };
            build_level(
                &host,
                LevelRequest {
                    id: format!("ladder-{i:02}"),
                    seed: derive_seed(spec.seed, i as u64),
                    knobs: &knobs,
                    available: vec![Mechanic::Rock1, Mechanic::Rock2],
                    required: Vec::new(),
                    tags: vec![("difficulty", format!("{d:.4}"))],
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(tiers: usize, per_tier: usize) -> CurriculumSpec {
        CurriculumSpec::with_dims(6, 6, tiers, per_tier, 11)
    }

    #[test]
    fn zero_density_tier_has_no_blockers() {
        let mut spec = small_spec(1, 5);
        spec.tiers[0].knobs.blocker_density = (0.0, 0.0);
        let levels = generate_curriculum(&spec).unwrap();
        assert_eq!(levels.len(), 5);
        for level in levels {
            assert!(level.layout.iter().all(|p| *p == Piece::Empty));
        }
    }

    #[test]
    fn default_knobs_are_monotone_in_tier() {
        for cells in [36, 117] {
            for t in 1..10 {
                let a = default_knobs(cells, t - 1);
                let b = default_knobs(cells, t);
                assert!(a.blocker_density.0 <= b.blocker_density.0);
                assert!(a.blocker_density.1 <= b.blocker_density.1);
                assert!(a.goal_count.0 <= b.goal_count.0 && a.goal_count.1 <= b.goal_count.1);
                assert!(a.color_count.0 <= b.color_count.0 && a.color_count.1 <= b.color_count.1);
                assert!(a.move_limit.0 <= b.move_limit.0 && a.move_limit.1 <= b.move_limit.1);
            }
        }
    }

    #[test]
    fn eval_set_contains_new_mechanics() {
        let spec = small_spec(4, 1);
        let new = [Mechanic::Teleporter, Mechanic::Container];
        let levels = generate_eval_set(&spec, 4, &new).unwrap();
        assert_eq!(levels.len(), 4);
        for level in &levels {
            let present = mechanics_in(level);
            assert!(present.iter().any(|m| new.contains(m)), "{}", level.id);
        }
        assert!(generate_eval_set(&spec, 0, &new).unwrap().is_empty());
    }

    #[test]
    fn back_levels_use_earlier_tiers() {
        let spec = small_spec(10, 1);
        let levels = generate_eval_set(&spec, 9, &[]).unwrap();
        let ids: Vec<_> = levels.iter().map(|l| l.id.as_str()).collect();
        assert_eq!(ids[0], "back-013");
        assert_eq!(ids[8], "back-093");
        for level in &levels {
            assert!(mechanics_in(level)
                .iter()
                .all(|m| !matches!(m, Mechanic::Teleporter | Mechanic::Container)));
        }
    }

    #[test]
    fn tiny_levels_are_certified_by_search() {
        let mut spec = CurriculumSpec::with_dims(4, 4, 3, 3, 5);
        for tier in &mut spec.tiers {
            tier.knobs.goal_count = (4, 6);
            tier.knobs.move_limit = (5, 6);
            tier.knobs.color_count = (3, 3);
        }
        let levels = generate_curriculum(&spec).unwrap();
        assert_eq!(levels.len(), 9);
        for level in levels {
            assert!(level.cells() <= EXACT_SEARCH_MAX_CELLS);
            let seed: u64 = level.tags["cert-seed"].parse().unwrap();
            let limit = level.move_limit;
            let path = winnable_within(&Arc::new(level), derive_seed(seed, 0), limit, 200_000);
            assert!(path.is_some_and(|p| p.len() as u32 <= limit));
        }
    }

    #[test]
    fn ladder_goals_rise() {
        let spec = LadderSpec {
            width: 6,
            height: 6,
            count: 5,
            color_count: 3,
            goal_count: (6, 20),
            rock_density: (0.0, 0.1),
            move_limit: 12,
            seed: 2,
        };
        let levels = generate_ladder(&spec).unwrap();
        let goals: Vec<u32> = levels
            .iter()
            .map(|l| {
                l.goals
                    .iter()
                    .find(|(k, _)| matches!(k, GoalKind::CollectColor(_)))
                    .unwrap()
                    .1
            })
            .copied()
            .collect();
        assert!(goals.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(goals[0], 6);
        assert_eq!(goals[4], 20);
    }
}
