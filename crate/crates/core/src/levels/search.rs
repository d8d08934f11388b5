//! Exhaustive winnability search for tiny boards.

use std::sync::Arc;

use crate::engine::{Game, Level};

/// Depth-first search over cluster taps from the seeded start position.
///
/// Refills are drawn from the board's own generator, so the tree is fixed by
/// `seed`. Returns a winning action sequence of at most `max_moves` taps, or
/// `None` if none exists or `node_budget` game states were expanded first.
pub fn winnable_within(
    level: &Arc<Level>,
    seed: u64,
    max_moves: u32,
    node_budget: usize,
) -> Option<Vec<usize>> {
    let game = Game::new(Arc::clone(level), seed);
    if game.is_won() {
        return Some(Vec::new());
    }
    let mut budget = node_budget;
    let mut path = Vec::new();
    dfs(&game, max_moves, &mut budget, &mut path).then_some(path)
}

fn dfs(game: &Game, depth: u32, budget: &mut usize, path: &mut Vec<usize>) -> bool {
    if depth == 0 || game.is_over() {
        return false;
    }
    let actions: Vec<usize> = game
        .board()
        .find_clusters()
        .into_iter()
        .filter(|c| c.cells.len() >= 2)
        .map(|c| c.cells[0])
        .collect();
    for action in actions {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut next = game.clone();
        if next.step(action).is_err() {
            continue;
        }
        path.push(action);
        if next.is_won() || dfs(&next, depth - 1, budget, path) {
            return true;
        }
        path.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{GoalKind, Piece};

    #[test]
    fn finds_one_move_win() {
        let mut level = Level::blank("s", 2, 2, 2);
        level.layout = vec![Piece::Color(0); 4];
        level.goals.insert(GoalKind::CollectColor(0), 4);
        let path = winnable_within(&Arc::new(level), 1, 1, 100).unwrap();
        assert_eq!(path.len(), 1);
    }

    #[test]
    fn impossible_goal_within_limit() {
        let mut level = Level::blank("s", 2, 2, 2);
        level.layout = vec![Piece::Color(0); 4];
        level.goals.insert(GoalKind::CollectColor(0), 9);
        // at most 4 pieces per move on a 2x2 board
        assert!(winnable_within(&Arc::new(level), 1, 2, 10_000).is_none());
    }
}
