use std::time::Duration;

use blastlab_bench::{bench_level, engine_throughput};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub moves: u64,
    pub seconds: f64,
    pub moves_per_second: f64,
}

/// Single-threaded `apply_move` throughput on random valid taps.
pub fn bench(width: usize, height: usize, seconds: f64, seed: u64) -> CliResult<BenchReport> {
    if width == 0 || height == 0 || !(seconds > 0.0 && seconds.is_finite()) {
        return Err(CliError::usage(
            "bench needs a non-empty board and a positive duration",
        ));
    }
    let level = bench_level(width, height);
    let t = engine_throughput(&level, Duration::from_secs_f64(seconds), seed);
    Ok(BenchReport {
        width,
        height,
        moves: t.moves,
        seconds: t.elapsed.as_secs_f64(),
        moves_per_second: t.per_second(),
    })
}
