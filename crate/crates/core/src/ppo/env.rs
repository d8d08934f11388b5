//! Training environment: one game at a time, episode cap, color shuffling.

use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::engine::{EngineError, Game, Level};
use crate::obs::{encode, shuffle_colors, ObsError, Observation};
use crate::rng::{rng_from_seed, SimRng};

pub const WIN_BONUS: f64 = 5.0;
pub const MOVE_PENALTY: f64 = 0.05;

/// `useful / requirement + 5·[won] − 0.05`.
pub fn reward(useful_progress: u32, total_requirement: u32, won: bool) -> f64 {
    let progress = if total_requirement == 0 {
        0.0
    } else {
        f64::from(useful_progress) / f64::from(total_requirement)
    };
    progress + if won { WIN_BONUS } else { 0.0 } - MOVE_PENALTY
}

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("engine fault: {0}")]
    Engine(#[from] EngineError),
    #[error("observation fault: {0}")]
    Obs(#[from] ObsError),
    #[error("level {0} starts with no valid move")]
    DeadStart(String),
}

/// What one environment step produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub reward: f64,
    pub done: bool,
    pub won: bool,
    /// Moves in the episode that just ended (only meaningful when `done`).
    pub episode_moves: u32,
    /// True when the episode was cut by the step cap rather than won or stuck.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct TrainEnv {
    levels: Vec<Arc<Level>>,
    color_slots: usize,
    step_cap: u32,
    rng: SimRng,
    game: Game,
    perm: Vec<usize>,
    steps: u32,
    episodes: u64,
}

impl TrainEnv {
    /// Starts the first episode. `levels` must be non-empty; each reset picks
    /// one uniformly at random.
    pub fn new(
        levels: Vec<Arc<Level>>,
        color_slots: usize,
        step_cap: u32,
        seed: u64,
    ) -> Result<Self, EnvError> {
        assert!(!levels.is_empty(), "training env needs at least one level");
        let mut rng = rng_from_seed(seed);
        let (game, perm) = Self::fresh_episode(&levels, color_slots, &mut rng)?;
        Ok(TrainEnv {
            levels,
            color_slots,
            step_cap,
            rng,
            game,
            perm,
            steps: 0,
            episodes: 0,
        })
    }

    fn fresh_episode(
        levels: &[Arc<Level>],
        color_slots: usize,
        rng: &mut SimRng,
    ) -> Result<(Game, Vec<usize>), EnvError> {
        let level = levels.choose(rng).expect("non-empty level pool").clone();
        let game = Game::new(level, rng.random());
        if game.is_over() {
            return Err(EnvError::DeadStart(game.level().id.clone()));
        }
        let mut perm: Vec<usize> = (0..color_slots).collect();
        perm.shuffle(rng);
        Ok((game, perm))
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn episodes_started(&self) -> u64 {
        self.episodes + 1
    }

    /// Observation of the current state, color channels permuted.
    pub fn observe(&self) -> Result<Observation, EnvError> {
        let g = &self.game;
        let obs = encode(g.board(), g.level(), g.progress(), self.color_slots)?;
        Ok(shuffle_colors(&obs, &self.perm)?)
    }

    /// Applies `action`; on episode end the env resets itself.
    pub fn step(&mut self, action: usize) -> Result<Transition, EnvError> {
        let res = self.game.step(action)?;
        self.steps += 1;
        let level = self.game.level();
        let r = reward(res.useful_progress, level.total_goal_requirement(), res.won);
        let capped = self.steps >= self.step_cap;
        let done = res.won || res.stuck || capped;
        let t = Transition {
            reward: r,
            done,
            won: res.won,
            episode_moves: self.steps,
            truncated: capped && !res.won && !res.stuck,
        };
        if done {
            let (game, perm) = Self::fresh_episode(&self.levels, self.color_slots, &mut self.rng)?;
            self.game = game;
            self.perm = perm;
            self.steps = 0;
            self.episodes += 1;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{GoalKind, Piece};

    /// 2x2 board full of one color: the first tap always wins.
    fn instant_win() -> Arc<Level> {
        let mut level = Level::blank("win", 2, 2, 2);
        level.layout = vec![Piece::Color(0); 4];
        level.goals.insert(GoalKind::CollectColor(0), 4);
        level.refill_weights = vec![0.5, 0.5];
        Arc::new(level)
    }

    /// Goal that can never be met within the cap.
    fn endless() -> Arc<Level> {
        let mut level = Level::blank("endless", 3, 3, 2);
        level.goals.insert(GoalKind::CollectColor(0), 1000);
        level.move_limit = 5;
        Arc::new(level)
    }

    #[test]
    fn reward_values() {
        assert!((reward(4, 4, true) - 5.95).abs() < 1e-12);
        assert!((reward(0, 10, false) + 0.05).abs() < 1e-12);
        assert!((reward(3, 12, false) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn winning_step_is_terminal_and_resets() {
        let mut env = TrainEnv::new(vec![instant_win()], 2, 100, 1).unwrap();
        let t = env.step(0).unwrap();
        assert!(t.done && t.won && !t.truncated);
        assert_eq!(t.episode_moves, 1);
        assert_eq!(env.game().moves(), 0);
        assert_eq!(env.episodes_started(), 2);
    }

    #[test]
    fn cap_injects_exactly_one_done_at_step_100() {
        let mut env = TrainEnv::new(vec![endless()], 2, 100, 3).unwrap();
        let mut dones = Vec::new();
        for i in 0..150 {
            let obs = env.observe().unwrap();
            let a = obs.mask.iter().position(|m| *m).expect("board has a move");
            let t = env.step(a).unwrap();
            if t.done {
                dones.push((i + 1, t.truncated, t.episode_moves));
            }
        }
        assert_eq!(dones, vec![(100, true, 100)]);
    }

    #[test]
    fn permutation_changes_between_episodes_and_is_seeded() {
        let perms = |seed| {
            let mut env = TrainEnv::new(vec![instant_win()], 6, 100, seed).unwrap();
            (0..20)
                .map(|_| {
                    let p = env.permutation().to_vec();
                    env.step(0).unwrap();
                    p
                })
                .collect::<Vec<_>>()
        };
        let a = perms(5);
        assert_eq!(a, perms(5));
        assert!(a.iter().any(|p| p != &a[0]));
        // the observation's color planes follow the permutation
        let env = TrainEnv::new(vec![instant_win()], 6, 100, 9).unwrap();
        let obs = env.observe().unwrap();
        let slot = env.permutation()[0];
        assert_eq!(obs.plane(slot), vec![1.0; 4]);
    }
}
