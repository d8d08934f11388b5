use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{Agent, AgentError};
use crate::engine::{EngineError, Game, Level};
use crate::obs::{encode, ObsError};
use crate::rng::{derive_seed, rng_from_seed};

/// Safety bound on evaluation episodes; agents nominally have unlimited moves.
pub const DEFAULT_MOVE_CAP: u32 = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EpisodeRecord {
    pub level_id: String,
    pub agent_id: String,
    pub seed: u64,
    pub moves_taken: u32,
    pub completed: bool,
    pub move_cap: u32,
    /// The level's player move limit, kept so statistics can normalize
    /// without the level file.
    pub move_limit: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("engine fault: {0}")]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Obs(#[from] ObsError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("episode log: {0}")]
    Csv(#[from] csv::Error),
}

/// Plays one episode to a win, a stuck board or `move_cap` moves.
///
/// The board is seeded with `derive(seed, 0)` and the agent's rng with
/// `derive(seed, 1)`.
pub fn run_episode(
    agent: &Agent,
    level: &Arc<Level>,
    move_cap: u32,
    seed: u64,
) -> Result<EpisodeRecord, EvalError> {
    let mut actor = agent.actor();
    play(&mut actor, agent, level, move_cap, seed)
}

fn play(
    actor: &mut crate::agents::Actor<'_>,
    agent: &Agent,
    level: &Arc<Level>,
    move_cap: u32,
    seed: u64,
) -> Result<EpisodeRecord, EvalError> {
    let slots = agent.color_slots().unwrap_or(level.color_count as usize);
    let mut game = Game::new(level.clone(), derive_seed(seed, 0));
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    while !game.is_over() && game.moves() < move_cap {
        let obs = encode(game.board(), level, game.progress(), slots)?;
        let action = actor.act(&obs, &mut rng)?;
        game.step(action)?;
    }
    Ok(EpisodeRecord {
        level_id: level.id.clone(),
        agent_id: agent.id.clone(),
        seed,
        moves_taken: game.moves(),
        completed: game.is_won(),
        move_cap,
        move_limit: level.move_limit,
    })
}

/// Episode `i` uses seed `derive(base_seed, i)`. Episodes run in parallel;
/// the result is in episode order and independent of scheduling.
pub fn run_episodes(
    agent: &Agent,
    level: &Arc<Level>,
    n_episodes: usize,
    move_cap: u32,
    base_seed: u64,
) -> Result<Vec<EpisodeRecord>, EvalError> {
    (0..n_episodes as u64)
        .into_par_iter()
        .map_init(
            || agent.actor(),
            |actor, i| play(actor, agent, level, move_cap, derive_seed(base_seed, i)),
        )
        .collect()
}

pub fn write_episodes_csv(records: &[EpisodeRecord], out: impl Write) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record([
            "levelId",
            "agentId",
            "seed",
            "movesTaken",
            "completed",
            "moveCap",
            "moveLimit",
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads an episode log; lines starting with `#` are ignored.
pub fn read_episodes_csv(input: impl Read) -> Result<Vec<EpisodeRecord>, EvalError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
