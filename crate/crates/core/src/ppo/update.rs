//! Clipped-surrogate PPO update.

use rand::seq::SliceRandom;

use super::config::PpoConfig;
use super::rollout::RolloutBuffer;
use crate::nn::{masked_log_softmax, Adam, NetworkParams, NnError, Workspace};
use crate::rng::SimRng;

/// `min(r·A, clip(r, 1−ε, 1+ε)·A)`; the loss is its negation.
pub fn clipped_surrogate(ratio: f64, advantage: f64, clip_range: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - clip_range, 1.0 + clip_range);
    (ratio * advantage).min(clipped * advantage)
}

/// Shifts and scales to mean 0, standard deviation 1 (left centered only if
/// the spread is zero).
pub fn normalize(values: &mut [f64]) {
    let n = values.len() as f64;
    if values.is_empty() {
        return;
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for v in values.iter_mut() {
        *v = if std > 1e-8 {
            (*v - mean) / (std + 1e-8)
        } else {
            *v - mean
        };
    }
}

/// Averages over every minibatch of every epoch.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub approx_kl: f64,
    pub grad_norm: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum UpdateError {
    #[error("non-finite loss in epoch {epoch}, minibatch {minibatch}")]
    NaNLoss { epoch: usize, minibatch: usize },
    #[error(transparent)]
    Nn(#[from] NnError),
}

/// Per-sample loss terms and the loss gradient w.r.t. the logits.
pub(crate) struct SampleLoss {
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    pub ratio: f64,
    pub log_ratio: f64,
}

/// Loss `−surrogate + c_v·(V − R)² − c_e·H` for one transition. Writes
/// `dloss/dlogits` (scaled by `scale`) into `dlogits` and returns the terms
/// plus `dloss/dV · scale`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn sample_loss(
    logits: &[f32],
    value: f32,
    mask: &[bool],
    action: usize,
    old_log_prob: f32,
    advantage: f64,
    ret: f64,
    config: &PpoConfig,
    scale: f64,
    lp: &mut [f32],
    dlogits: &mut [f32],
) -> Result<(SampleLoss, f32), NnError> {
    masked_log_softmax(logits, mask, lp)?;
    let log_ratio = f64::from(lp[action]) - f64::from(old_log_prob);
    let ratio = log_ratio.exp();
    let surrogate = clipped_surrogate(ratio, advantage, config.clip_range);
    // gradient flows only through the unclipped branch when it is the minimum
    let unclipped_active = ratio * advantage <= surrogate;
    let dlogp = if unclipped_active {
        -advantage * ratio
    } else {
        0.0
    };

    let mut entropy = 0.0;
    for (l, m) in lp.iter().zip(mask) {
        if *m {
            let l = f64::from(*l);
            entropy -= l.exp() * l;
        }
    }
    for (k, d) in dlogits.iter_mut().enumerate() {
        if !mask[k] {
            *d = 0.0;
            continue;
        }
        let l = f64::from(lp[k]);
        let p = l.exp();
        let onehot = if k == action { 1.0 } else { 0.0 };
        let g = dlogp * (onehot - p) + config.entropy_coef * p * (l + entropy);
        *d = (g * scale) as f32;
    }
    let verr = f64::from(value) - ret;
    let dvalue = (2.0 * config.value_coef * verr * scale) as f32;
    Ok((
        SampleLoss {
            policy: -surrogate,
            value: verr * verr,
            entropy,
            ratio,
            log_ratio,
        },
        dvalue,
    ))
}

/// Runs `update_epochs` passes of shuffled minibatches over `buf`.
/// `advantages` must already be normalized.
#[allow(clippy::too_many_arguments)]
pub fn ppo_update(
    params: &mut NetworkParams<f32>,
    adam: &mut Adam,
    buf: &RolloutBuffer,
    advantages: &[f64],
    returns: &[f64],
    config: &PpoConfig,
    rng: &mut SimRng,
) -> Result<UpdateStats, UpdateError> {
    let n = buf.len();
    let mb = n / config.n_minibatches;
    let cells = params.shape.actions();
    let mut ws = Workspace::new(&params.shape);
    let mut grads = params.zeros_like();
    let mut lp = vec![0.0f32; cells];
    let mut dlogits = vec![0.0f32; cells];
    let mut order: Vec<usize> = (0..n).collect();
    let mut stats = UpdateStats::default();
    let mut batches = 0usize;
    let scale = 1.0 / mb as f64;

    for epoch in 0..config.update_epochs {
        order.shuffle(rng);
        for (minibatch, chunk) in order.chunks_exact(mb).enumerate() {
            grads.fill_zero();
            let (mut pl, mut vl, mut ent, mut clipped, mut kl) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for &i in chunk {
                params.forward(buf.obs_at(i), &mut ws)?;
                let (loss, dvalue) = sample_loss(
                    &ws.logits,
                    ws.value,
                    buf.mask_at(i),
                    buf.actions[i],
                    buf.log_probs[i],
                    advantages[i],
                    returns[i],
                    config,
                    scale,
                    &mut lp,
                    &mut dlogits,
                )?;
                params.backward(&mut ws, &dlogits, dvalue, &mut grads)?;
                pl += loss.policy;
                vl += loss.value;
                ent += loss.entropy;
                if (loss.ratio - 1.0).abs() > config.clip_range {
                    clipped += 1.0;
                }
                kl += (loss.ratio - 1.0) - loss.log_ratio;
            }
            let total = (pl + config.value_coef * vl - config.entropy_coef * ent) * scale;
            if !total.is_finite() || !grads.all_finite() {
                return Err(UpdateError::NaNLoss { epoch, minibatch });
            }
            let norm = grads.global_norm();
            if config.max_grad_norm > 0.0 && norm > config.max_grad_norm {
                grads.scale((config.max_grad_norm / (norm + 1e-6)) as f32);
            }
            adam.step(params, &grads);

            stats.policy_loss += pl * scale;
            stats.value_loss += vl * scale;
            stats.entropy += ent * scale;
            stats.clip_fraction += clipped * scale;
            stats.approx_kl += kl * scale;
            stats.grad_norm += norm;
            batches += 1;
        }
    }
    let b = batches.max(1) as f64;
    stats.policy_loss /= b;
    stats.value_loss /= b;
    stats.entropy /= b;
    stats.clip_fraction /= b;
    stats.approx_kl /= b;
    stats.grad_norm /= b;
    Ok(stats)
}
