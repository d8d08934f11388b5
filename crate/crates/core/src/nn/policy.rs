//! Masked categorical distribution over board cells.

use rand::Rng;

use super::tensor::{NnError, Real};

/// Log-probabilities of the softmax over valid cells; invalid cells get −∞.
pub fn masked_log_softmax<T: Real>(
    logits: &[T],
    mask: &[bool],
    out: &mut [T],
) -> Result<(), NnError> {
    if logits.len() != mask.len() || out.len() != logits.len() {
        return Err(NnError::Shape("mask length differs from logits".into()));
    }
    let mut max = T::neg_infinity();
    for (&l, &m) in logits.iter().zip(mask) {
        if m && l > max {
            max = l;
        }
    }
    if max == T::neg_infinity() {
        return Err(NnError::Shape("no valid action under the mask".into()));
    }
    let mut sum = T::zero();
    for (&l, &m) in logits.iter().zip(mask) {
        if m {
            sum += (l - max).exp();
        }
    }
    let log_sum = sum.ln();
    for ((o, &l), &m) in out.iter_mut().zip(logits).zip(mask) {
        *o = if m {
            (l - max) - log_sum
        } else {
            T::neg_infinity()
        };
    }
    Ok(())
}

/// Draws an index from `log_probs` by inverse CDF over valid cells.
pub fn sample<T: Real>(log_probs: &[T], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, lp) in log_probs.iter().enumerate() {
        if *lp == T::neg_infinity() {
            continue;
        }
        acc += lp.as_f64().exp();
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Highest-probability cell; ties go to the lowest index.
pub fn argmax<T: Real>(log_probs: &[T]) -> usize {
    let mut best = 0;
    for (i, lp) in log_probs.iter().enumerate() {
        if *lp > log_probs[best] {
            best = i;
        }
    }
    best
}

pub fn entropy<T: Real>(log_probs: &[T]) -> T {
    let mut h = T::zero();
    for &lp in log_probs {
        if lp != T::neg_infinity() {
            h -= lp.exp() * lp;
        }
    }
    h
}
