//! Playtesting laboratory for click-to-blast puzzle levels.

pub mod agents;
pub mod engine;
pub mod eval;
pub mod levels;
pub mod nn;
pub mod obs;
pub mod ppo;
pub mod rng;
pub mod synthplayers;
