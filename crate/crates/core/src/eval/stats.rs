use serde::Serialize;

use super::episodes::EpisodeRecord;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatError {
    #[error("no completed runs")]
    InsufficientData,
    #[error("fraction {0} outside (0, 1]")]
    BadFraction(f64),
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 points, got {0}")]
    TooFew(usize),
    #[error("a series is constant; correlation undefined")]
    DegenerateInput,
}

/// Best-x% statistic for one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelStat {
    pub level_id: String,
    pub x: f64,
    /// Max moves among the fastest `ceil(x · completed)` runs, over the move limit.
    pub normalized_best_x: f64,
    pub completed_fraction: f64,
    pub episode_count: usize,
}

/// Keeps completed runs, sorts by moves, takes the first `ceil(x·n)` and
/// returns their maximum divided by `move_limit`.
pub fn best_fraction_stat(
    records: &[EpisodeRecord],
    x: f64,
    move_limit: u32,
) -> Result<LevelStat, StatError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(StatError::BadFraction(x));
    }
    let mut moves: Vec<u32> = records
        .iter()
        .filter(|r| r.completed)
        .map(|r| r.moves_taken)
        .collect();
    if moves.is_empty() {
        return Err(StatError::InsufficientData);
    }
    moves.sort_unstable();
    let n = moves.len();
    // guard against 0.1 * 10 landing a hair above 1
    let k = ((x * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    Ok(LevelStat {
        level_id: records[0].level_id.clone(),
        x,
        normalized_best_x: f64::from(moves[k - 1]) / f64::from(move_limit),
        completed_fraction: n as f64 / records.len() as f64,
        episode_count: records.len(),
    })
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatError> {
    if xs.len() != ys.len() {
        return Err(StatError::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatError::DegenerateInput);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's ρ: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatError> {
    if xs.len() != ys.len() {
        return Err(StatError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(StatError::TooFew(xs.len()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(moves: &[u32]) -> Vec<EpisodeRecord> {
        moves
            .iter()
            .enumerate()
            .map(|(i, &m)| EpisodeRecord {
                level_id: "L".into(),
                agent_id: "a".into(),
                seed: i as u64,
                moves_taken: m,
                completed: true,
                move_cap: 1000,
                move_limit: 20,
            })
            .collect()
    }

    #[test]
    fn best_fraction_examples() {
        let r = recs(&[5, 7, 9, 11, 13, 15, 17, 19, 21, 23]);
        assert_eq!(
            best_fraction_stat(&r, 0.2, 20).unwrap().normalized_best_x,
            0.35
        );
        assert_eq!(
            best_fraction_stat(&r, 1.0, 20).unwrap().normalized_best_x,
            1.15
        );
        assert_eq!(
            best_fraction_stat(&r, 0.01, 20).unwrap().normalized_best_x,
            0.25
        );
        // 0.1 * 10 is exactly one run, not two
        assert_eq!(
            best_fraction_stat(&r, 0.1, 20).unwrap().normalized_best_x,
            0.25
        );
    }

    #[test]
    fn censored_runs_are_skipped_but_counted() {
        let mut r = recs(&[4, 8]);
        r[1].completed = false;
        let s = best_fraction_stat(&r, 1.0, 4).unwrap();
        assert_eq!(s.normalized_best_x, 1.0);
        assert_eq!(s.completed_fraction, 0.5);
        r[0].completed = false;
        assert_eq!(
            best_fraction_stat(&r, 1.0, 4),
            Err(StatError::InsufficientData)
        );
        assert_eq!(
            best_fraction_stat(&r, 0.0, 4),
            Err(StatError::BadFraction(0.0))
        );
    }

    #[test]
    fn spearman_examples() {
        let up = spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap();
        let down = spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap();
        assert!((up - 1.0).abs() < 1e-12 && (down + 1.0).abs() < 1e-12);
        let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((rho - 0.6).abs() < 1e-12);
        assert_eq!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatError::DegenerateInput)
        );
        assert_eq!(
            spearman(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatError::TooFew(2))
        );
    }

    #[test]
    fn ties_share_ranks() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 10.0, 5.0]),
            vec![2.5, 4.0, 2.5, 1.0]
        );
    }
}
