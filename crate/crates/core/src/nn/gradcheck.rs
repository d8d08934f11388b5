//! Finite-difference check of the full network's backward pass.

use rand::seq::index;
use rand::Rng;

use super::network::{NetShape, NetworkParams, Workspace};
use super::policy::masked_log_softmax;
use crate::rng::rng_from_seed;

#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub checked: usize,
    pub failures: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

/// Probe loss touching both heads: `Σ_j w_j log π_j + (V − target)²`.
struct Probe {
    input: Vec<f64>,
    mask: Vec<bool>,
    weights: Vec<f64>,
    target: f64,
}

impl Probe {
    fn loss(&self, net: &NetworkParams<f64>, ws: &mut Workspace<f64>) -> f64 {
        net.forward(&self.input, ws).expect("probe shapes match");
        let mut lp = vec![0.0; ws.logits.len()];
        masked_log_softmax(&ws.logits, &self.mask, &mut lp).expect("mask has a valid cell");
        let policy: f64 = lp
            .iter()
            .zip(&self.weights)
            .zip(&self.mask)
            .filter(|(_, m)| **m)
            .map(|((l, w), _)| l * w)
            .sum();
        policy + (ws.value - self.target).powi(2)
    }

    fn gradient(&self, net: &NetworkParams<f64>, ws: &mut Workspace<f64>) -> NetworkParams<f64> {
        net.forward(&self.input, ws).expect("probe shapes match");
        let mut lp = vec![0.0; ws.logits.len()];
        masked_log_softmax(&ws.logits, &self.mask, &mut lp).expect("mask has a valid cell");
        let wsum: f64 = self
            .weights
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| **m)
            .map(|(w, _)| w)
            .sum();
        let dlogits: Vec<f64> = lp
            .iter()
            .zip(&self.weights)
            .zip(&self.mask)
            .map(|((l, w), m)| if *m { w - l.exp() * wsum } else { 0.0 })
            .collect();
        let dvalue = 2.0 * (ws.value - self.target);
        let mut grads = net.zeros_like();
        net.backward(ws, &dlogits, dvalue, &mut grads)
            .expect("shapes match");
        grads
    }
}

/// Compares analytic and central-difference gradients (in f64) on `samples`
/// randomly chosen parameters, or all of them if there are fewer.
pub fn check_network_gradients(
    shape: NetShape,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> GradCheckReport {
    let mut rng = rng_from_seed(seed);
    let mut net = NetworkParams::<f64>::init(shape, seed);
    // random biases so no unit sits exactly on a ReLU kink
    for k in [1, 3, 5, 7, 9] {
        for b in &mut net.tensors[k].data {
            *b = rng.random_range(-0.1..0.1);
        }
    }
    let cells = shape.actions();
    let mut mask: Vec<bool> = (0..cells).map(|_| rng.random_bool(0.6)).collect();
    mask[0] = true;
    let probe = Probe {
        input: (0..shape.input_len())
            .map(|_| rng.random_range(0.0..2.0))
            .collect(),
        mask,
        weights: (0..cells).map(|_| rng.random_range(-1.0..1.0)).collect(),
        target: 0.7,
    };
    let mut ws = Workspace::new(&shape);
    let grads = probe.gradient(&net, &mut ws);

    let total = net.param_count();
    let picked = index::sample(&mut rng, total, samples.min(total)).into_vec();
    let eps = 1e-6;
    let mut report = GradCheckReport {
        checked: 0,
        failures: 0,
        max_rel_error: 0.0,
        tolerance,
    };
    for i in picked {
        let orig = net.get_flat(i);
        net.set_flat(i, orig + eps);
        let up = probe.loss(&net, &mut ws);
        net.set_flat(i, orig - eps);
        let down = probe.loss(&net, &mut ws);
        net.set_flat(i, orig);
        let numeric = (up - down) / (2.0 * eps);
        let analytic = grads.get_flat(i);
        let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
        report.checked += 1;
        report.max_rel_error = report.max_rel_error.max(rel);
        if rel >= tolerance {
            report.failures += 1;
        }
    }
    report
}
