use std::sync::Arc;

use blastlab::engine::{GoalKind, Level};
use blastlab::synthplayers::{play_attempt, simulate_population, PopulationSpec};

fn family(limit: u32) -> Arc<Level> {
    let mut level = Level::blank(format!("limit-{limit:02}"), 6, 6, 4);
    level.goals.insert(GoalKind::CollectColor(0), 18);
    level.move_limit = limit;
    Arc::new(level)
}

fn rate(level: &Arc<Level>, skill: f64, n: u64) -> f64 {
    (0..n)
        .filter(|&s| play_attempt(level, skill, s).unwrap())
        .count() as f64
        / n as f64
}

#[test]
fn rate_rises_with_move_limit() {
    let levels: Vec<_> = [6, 9, 12, 15, 20, 30].into_iter().map(family).collect();
    let spec = PopulationSpec {
        n_players: 100,
        attempts_per_player: 4,
        seed: 8,
        ..PopulationSpec::default()
    };
    let table = simulate_population(&levels, &spec).unwrap();
    let rates: Vec<f64> = table.rows.iter().map(|r| r.rate).collect();
    // 400 attempts: two standard errors at p = 0.5 is 0.05
    for w in rates.windows(2) {
        assert!(w[1] >= w[0] - 0.05, "{rates:?}");
    }
    assert!(rates[5] > rates[0] + 0.3, "{rates:?}");
}

#[test]
fn rate_rises_with_skill() {
    let level = family(12);
    let rates: Vec<f64> = [0.0, 0.5, 1.0]
        .iter()
        .map(|&s| rate(&level, s, 400))
        .collect();
    assert!(
        rates[0] <= rates[1] + 0.05 && rates[1] <= rates[2] + 0.05,
        "{rates:?}"
    );
    assert!(rates[2] > rates[0], "{rates:?}");
}
