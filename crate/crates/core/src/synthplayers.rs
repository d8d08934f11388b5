//! Synthetic player population standing in for real completion-rate data.
//!
//! Each player has a skill `s ~ Beta(α, β)`. On every move of an attempt the
//! player taps the largest cluster with probability `s` and a uniformly random
//! valid cell otherwise. An attempt succeeds if the goals are met within the
//! level's move limit.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{greedy_action, EngineError, Game, Level};
use crate::rng::{derive_seed, rng_from_seed, stream_key};

/// Attempts per level below which rates are considered noisy.
pub const MIN_STABLE_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationSpec {
    pub n_players: usize,
    pub attempts_per_player: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        PopulationSpec {
            n_players: 200,
            attempts_per_player: 5,
            alpha: 2.0,
            beta: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PopulationError {
    #[error("invalid population spec: {0}")]
    InvalidSpec(String),
    #[error("engine fault: {0}")]
    Engine(#[from] EngineError),
    #[error("rate table: {0}")]
    Csv(#[from] csv::Error),
    #[error("rate table row for {level}: {reason}")]
    BadRow { level: String, reason: String },
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<(), PopulationError> {
        if self.n_players == 0 || self.attempts_per_player == 0 {
            return Err(PopulationError::InvalidSpec(
                "need at least one player and attempt".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite())
        {
            return Err(PopulationError::InvalidSpec(
                "Beta parameters must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Non-fatal problems worth telling the user about.
    pub fn warnings(&self) -> Vec<String> {
        let attempts = self.n_players * self.attempts_per_player;
        if attempts < MIN_STABLE_ATTEMPTS {
            vec![format!(
                "only {attempts} attempts per level (< {MIN_STABLE_ATTEMPTS}); completion rates will be noisy"
            )]
        } else {
            Vec::new()
        }
    }

    /// Player skills, shared by every level.
    pub fn skills(&self) -> Vec<f64> {
        let beta = Beta::new(self.alpha, self.beta).expect("validated Beta parameters");
        let mut rng = rng_from_seed(derive_seed(self.seed, 0));
        (0..self.n_players).map(|_| beta.sample(&mut rng)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateRow {
    pub level_id: String,
    pub completions: u64,
    pub attempts: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompletionRateTable {
    pub rows: Vec<RateRow>,
}

impl CompletionRateTable {
    pub fn rates(&self) -> BTreeMap<String, f64> {
        self.rows
            .iter()
            .map(|r| (r.level_id.clone(), r.rate))
            .collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), PopulationError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["levelId", "completions", "attempts", "rate"])?;
        for r in &self.rows {
            w.write_record(&[
                r.level_id.clone(),
                r.completions.to_string(),
                r.attempts.to_string(),
                format!("{:.6}", r.rate),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads a table in the same schema; externally measured rates are welcome.
    /// Lines starting with `#` are ignored.
    pub fn read_csv(input: impl Read) -> Result<Self, PopulationError> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(input);
        let rows: Vec<RateRow> = r.deserialize().collect::<Result<_, _>>()?;
        for row in &rows {
            let bad = |reason: &str| PopulationError::BadRow {
                level: row.level_id.clone(),
                reason: reason.into(),
            };
            if row.attempts == 0 {
                return Err(bad("attempts must be positive"));
            }
            if row.completions > row.attempts || !(0.0..=1.0).contains(&row.rate) {
                return Err(bad("rate outside [0, 1]"));
            }
        }
        Ok(CompletionRateTable { rows })
    }
}

/// One attempt by a player of skill `skill`; true on success.
pub fn play_attempt(level: &Arc<Level>, skill: f64, seed: u64) -> Result<bool, EngineError> {
    let mut game = Game::new(level.clone(), derive_seed(seed, 0));
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    while !game.is_over() && game.moves() < level.move_limit {
        let board = game.board();
        let action = if rng.random_bool(skill.clamp(0.0, 1.0)) {
            greedy_action(board)
        } else {
            let valid: Vec<usize> = (0..board.cells().len())
                .filter(|&i| board.is_valid_action(i))
                .collect();
            valid.choose(&mut rng).copied()
        };
        match action {
            Some(a) => {
                game.step(a)?;
            }
            None => break,
        }
    }
    Ok(game.is_won())
}

/// Completion rates for every level. Attempt `a` of player `p` on a level
/// with id `L` is seeded by `derive(derive(derive(seed, key(L)), p), a)`.
pub fn simulate_population(
    levels: &[Arc<Level>],
    spec: &PopulationSpec,
) -> Result<CompletionRateTable, PopulationError> {
    spec.validate()?;
    let skills = spec.skills();
    let mut rows = Vec::with_capacity(levels.len());
    for level in levels {
        let level_seed = derive_seed(spec.seed, stream_key(&level.id));
        let completions: u64 = skills
            .par_iter()
            .enumerate()
            .map(|(p, &skill)| -> Result<u64, EngineError> {
                let player_seed = derive_seed(level_seed, p as u64);
                let mut wins = 0;
                for a in 0..spec.attempts_per_player {
                    if play_attempt(level, skill, derive_seed(player_seed, a as u64))? {
                        wins += 1;
                    }
                }
                Ok(wins)
            })
            .collect::<Result<Vec<u64>, _>>()?
            .into_iter()
            .sum();
        let attempts = (spec.n_players * spec.attempts_per_player) as u64;
        rows.push(RateRow {
            level_id: level.id.clone(),
            completions,
            attempts,
            rate: completions as f64 / attempts as f64,
        });
    }
    Ok(CompletionRateTable { rows })
}
