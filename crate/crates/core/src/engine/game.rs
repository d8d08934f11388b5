use std::sync::Arc;

use super::board::{Board, EngineError, MoveOutcome};
use super::level::Level;
use super::piece::{is_won, GoalTally};

/// Result of one tap, from the point of view of the player.
#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub outcome: MoveOutcome,
    /// Goal items that counted toward a still-open requirement this move.
    pub useful_progress: u32,
    pub won: bool,
    /// The board went dead and could not be reshuffled; the attempt is over.
    pub stuck: bool,
}

/// A single attempt at a level.
#[derive(Clone, Debug)]
pub struct Game {
    level: Arc<Level>,
    board: Board,
    progress: GoalTally,
    moves: u32,
    won: bool,
    stuck: bool,
}

impl Game {
    pub fn new(level: Arc<Level>, seed: u64) -> Game {
        let board = Board::from_level(&level, seed);
        let mut game = Game {
            level,
            board,
            progress: GoalTally::new(),
            moves: 0,
            won: false,
            stuck: false,
        };
        game.won = is_won(&game.progress, &game.level.goals);
        game.revive();
        game
    }

    fn revive(&mut self) {
        if !self.won && !self.board.has_valid_action() {
            self.stuck = self.board.shuffle_dead_board().is_err();
        }
    }

    pub fn level(&self) -> &Arc<Level> {
        &self.level
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn progress(&self) -> &GoalTally {
        &self.progress
    }

    pub fn moves(&self) -> u32 {
        self.moves
    }

    pub fn is_won(&self) -> bool {
        self.won
    }

    pub fn is_stuck(&self) -> bool {
        self.stuck
    }

    pub fn is_over(&self) -> bool {
        self.won || self.stuck
    }

    pub fn step(&mut self, action: usize) -> Result<StepResult, EngineError> {
        let outcome = self.board.apply_move(action)?;
        self.moves += 1;
        let mut useful = 0;
        for (kind, got) in &outcome.goals_collected {
            let entry = self.progress.entry(*kind).or_insert(0);
            if let Some(need) = self.level.goals.get(kind) {
                useful += (*need).saturating_sub(*entry).min(*got);
            }
            *entry += got;
        }
        self.won = is_won(&self.progress, &self.level.goals);
        self.revive();
        Ok(StepResult {
            outcome,
            useful_progress: useful,
            won: self.won,
            stuck: self.stuck,
        })
    }
}
