//! Shared workloads for the criterion benches and `blastlab bench`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use blastlab::engine::{Board, GoalKind, Level, Piece};
use blastlab::rng::{derive_seed, rng_from_seed};
use rand::Rng;

/// A 5-color level with a band of rocks and some grass; goals are out of
/// reach so play never ends by winning.
pub fn bench_level(width: usize, height: usize) -> Arc<Level> {
    let mut level = Level::blank(format!("bench-{width}x{height}"), width, height, 5);
    for x in 0..width {
        if x % 3 == 1 {
            level.layout[(height / 2) * width + x] = Piece::Rock { hp: 2 };
        }
    }
    level.layout[(height - 1) * width] = Piece::Grass;
    level.goals.insert(GoalKind::CollectColor(0), u32::MAX / 2);
    level.move_limit = u32::MAX;
    Arc::new(level)
}

#[derive(Clone, Copy, Debug)]
pub struct Throughput {
    pub moves: u64,
    pub elapsed: Duration,
}

impl Throughput {
    pub fn per_second(&self) -> f64 {
        self.moves as f64 / self.elapsed.as_secs_f64()
    }
}

/// Random valid taps on fresh boards for at least `duration`, single thread.
/// Only `apply_move` calls are timed.
pub fn engine_throughput(level: &Level, duration: Duration, seed: u64) -> Throughput {
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let mut board = Board::from_level(level, derive_seed(seed, 1));
    let mut boards = 1;
    let mut moves = 0u64;
    let mut timed = Duration::ZERO;
    let wall = Instant::now();
    let n = level.cells();
    while wall.elapsed() < duration {
        for _ in 0..256 {
            if !board.has_valid_action() {
                boards += 1;
                board = Board::from_level(level, derive_seed(seed, boards));
            }
            let mut pos = rng.random_range(0..n);
            while !board.is_valid_action(pos) {
                pos = rng.random_range(0..n);
            }
            let t = Instant::now();
            board.apply_move(pos).expect("valid action");
            timed += t.elapsed();
            moves += 1;
        }
    }
    Throughput {
        moves,
        elapsed: timed,
    }
}

/// A fixed sequence of `count` valid positions replayable from a clone of the
/// returned board.
pub fn move_script(level: &Level, count: usize, seed: u64) -> (Board, Vec<usize>) {
    let start = Board::from_level(level, derive_seed(seed, 1));
    let mut board = start.clone();
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let mut script = Vec::with_capacity(count);
    while script.len() < count && board.has_valid_action() {
        let valid: Vec<usize> = (0..level.cells())
            .filter(|&i| board.is_valid_action(i))
            .collect();
        let pos = valid[rng.random_range(0..valid.len())];
        board.apply_move(pos).expect("valid action");
        script.push(pos);
    }
    (start, script)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn throughput_counts_moves() {
        let level = bench_level(9, 13);
        let t = engine_throughput(&level, Duration::from_millis(20), 1);
        assert!(t.moves >= 256);
        assert!(t.per_second() > 0.0);
    }

    #[test]
    fn scripts_replay() {
        let level = bench_level(9, 13);
        let (start, script) = move_script(&level, 50, 2);
        assert_eq!(script.len(), 50);
        let mut b = start.clone();
        for &p in &script {
            b.apply_move(p).unwrap();
        }
    }
}
