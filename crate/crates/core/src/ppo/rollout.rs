//! On-policy rollout collection and advantage estimation.

use std::io::Write;

use rayon::prelude::*;

use super::env::{EnvError, TrainEnv};
use crate::nn::{masked_log_softmax, sample, NetShape, NetworkParams, NnError, Workspace};
use crate::obs::Observation;
use crate::rng::{rng_from_seed, SimRng};

/// A finished episode seen during collection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeSummary {
    pub env: usize,
    pub moves: u32,
    pub won: bool,
}

/// Transitions laid out env-major: index `env * n_steps + step`.
#[derive(Clone, Debug, PartialEq)]
pub struct RolloutBuffer {
    pub n_envs: usize,
    pub n_steps: usize,
    pub obs_len: usize,
    pub obs: Vec<f32>,
    pub masks: Vec<bool>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f32>,
    pub values: Vec<f32>,
    pub rewards: Vec<f64>,
    /// The episode ended after this transition (win, stuck or step cap).
    pub dones: Vec<bool>,
    /// Value estimate of each env's state after its last transition.
    pub bootstrap: Vec<f32>,
    pub episodes: Vec<EpisodeSummary>,
}

impl RolloutBuffer {
    pub fn len(&self) -> usize {
        self.n_envs * self.n_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn obs_at(&self, i: usize) -> &[f32] {
        &self.obs[i * self.obs_len..(i + 1) * self.obs_len]
    }

    pub fn mask_at(&self, i: usize) -> &[bool] {
        let cells = self.masks.len() / self.len();
        &self.masks[i * cells..(i + 1) * cells]
    }

    pub fn advantages(&self, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
        compute_gae(
            &self.rewards,
            &self.values,
            &self.dones,
            &self.bootstrap,
            self.n_steps,
            gamma,
            lambda,
        )
    }

    /// Per-transition dump (no observations), used when an update blows up.
    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "env", "step", "action", "logProb", "value", "reward", "done",
        ])?;
        for i in 0..self.len() {
            w.write_record(&[
                (i / self.n_steps).to_string(),
                (i % self.n_steps).to_string(),
                self.actions[i].to_string(),
                self.log_probs[i].to_string(),
                self.values[i].to_string(),
                self.rewards[i].to_string(),
                self.dones[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Generalized advantage estimation over env-major rows of `n_steps`.
///
/// Returns `(advantages, returns)` with `returns = advantages + values`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f32],
    dones: &[bool],
    bootstrap: &[f32],
    n_steps: usize,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    for (env, boot) in bootstrap.iter().enumerate() {
        let mut last = 0.0;
        for t in (0..n_steps).rev() {
            let i = env * n_steps + t;
            let next_value = if t + 1 == n_steps {
                f64::from(*boot)
            } else {
                f64::from(values[i + 1])
            };
            let live = if dones[i] { 0.0 } else { 1.0 };
            let delta = rewards[i] + gamma * next_value * live - f64::from(values[i]);
            last = delta + gamma * lambda * live * last;
            adv[i] = last;
        }
    }
    let returns = adv
        .iter()
        .zip(values)
        .map(|(a, v)| a + f64::from(*v))
        .collect();
    (adv, returns)
}

/// An environment plus the per-env state needed to act in it.
#[derive(Clone, Debug)]
pub struct Worker {
    pub env: TrainEnv,
    rng: SimRng,
    ws: Workspace<f32>,
    current: Observation,
}

#[derive(Debug, thiserror::Error)]
pub enum RolloutError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Nn(#[from] NnError),
}

struct Segment {
    obs: Vec<f32>,
    masks: Vec<bool>,
    actions: Vec<usize>,
    log_probs: Vec<f32>,
    values: Vec<f32>,
    rewards: Vec<f64>,
    dones: Vec<bool>,
    bootstrap: f32,
    episodes: Vec<EpisodeSummary>,
}

impl Worker {
    pub fn new(env: TrainEnv, shape: &NetShape, action_seed: u64) -> Result<Self, RolloutError> {
        let current = env.observe()?;
        Ok(Worker {
            env,
            rng: rng_from_seed(action_seed),
            ws: Workspace::new(shape),
            current,
        })
    }

    fn run(
        &mut self,
        id: usize,
        params: &NetworkParams<f32>,
        n_steps: usize,
    ) -> Result<Segment, RolloutError> {
        let obs_len = self.current.tensor.len();
        let cells = self.current.mask.len();
        let mut seg = Segment {
            obs: Vec::with_capacity(n_steps * obs_len),
            masks: Vec::with_capacity(n_steps * cells),
            actions: Vec::with_capacity(n_steps),
            log_probs: Vec::with_capacity(n_steps),
            values: Vec::with_capacity(n_steps),
            rewards: Vec::with_capacity(n_steps),
            dones: Vec::with_capacity(n_steps),
            bootstrap: 0.0,
            episodes: Vec::new(),
        };
        let mut lp = vec![0.0f32; cells];
        for _ in 0..n_steps {
            params.forward(&self.current.tensor, &mut self.ws)?;
            masked_log_softmax(&self.ws.logits, &self.current.mask, &mut lp)?;
            let action = sample(&lp, &mut self.rng);
            let t = self.env.step(action)?;
            seg.obs.extend_from_slice(&self.current.tensor);
            seg.masks.extend_from_slice(&self.current.mask);
            seg.actions.push(action);
            seg.log_probs.push(lp[action]);
            seg.values.push(self.ws.value);
            seg.rewards.push(t.reward);
            seg.dones.push(t.done);
            if t.done {
                seg.episodes.push(EpisodeSummary {
                    env: id,
                    moves: t.episode_moves,
                    won: t.won,
                });
            }
            self.current = self.env.observe()?;
        }
        params.forward(&self.current.tensor, &mut self.ws)?;
        seg.bootstrap = self.ws.value;
        Ok(seg)
    }
}

/// Runs every worker for `n_steps` under a fixed parameter snapshot. Workers
/// may run in parallel; the buffer is always ordered by (env, step).
pub fn collect_rollouts(
    params: &NetworkParams<f32>,
    workers: &mut [Worker],
    n_steps: usize,
) -> Result<RolloutBuffer, RolloutError> {
    let segments: Vec<Segment> = workers
        .par_iter_mut()
        .enumerate()
        .map(|(id, w)| w.run(id, params, n_steps))
        .collect::<Result<_, _>>()?;
    let obs_len = params.shape.input_len();
    let mut buf = RolloutBuffer {
        n_envs: workers.len(),
        n_steps,
        obs_len,
        obs: Vec::with_capacity(workers.len() * n_steps * obs_len),
        masks: Vec::new(),
        actions: Vec::new(),
        log_probs: Vec::new(),
        values: Vec::new(),
        rewards: Vec::new(),
        dones: Vec::new(),
        bootstrap: Vec::new(),
        episodes: Vec::new(),
    };
    for s in segments {
        buf.obs.extend(s.obs);
        buf.masks.extend(s.masks);
        buf.actions.extend(s.actions);
        buf.log_probs.extend(s.log_probs);
        buf.values.extend(s.values);
        buf.rewards.extend(s.rewards);
        buf.dones.extend(s.dones);
        buf.bootstrap.push(s.bootstrap);
        buf.episodes.extend(s.episodes);
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_terminal_step() {
        let (a, r) = compute_gae(&[1.0], &[0.0], &[true], &[0.0], 1, 1.0, 1.0);
        assert_eq!(a, vec![1.0]);
        assert_eq!(r, vec![1.0]);
    }

    #[test]
    fn two_step_hand_recursion() {
        let (a, r) = compute_gae(
            &[1.0, 1.0],
            &[0.0, 0.0],
            &[false, true],
            &[0.0],
            2,
            0.5,
            0.5,
        );
        assert_eq!(a, vec![1.25, 1.0]);
        assert_eq!(r, a);
    }

    #[test]
    fn zero_rewards_and_values() {
        let (a, _) = compute_gae(&[0.0; 6], &[0.0; 6], &[false; 6], &[0.0; 2], 3, 0.99, 0.95);
        assert!(a.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn bootstrap_used_only_without_done() {
        // one env, one step, bootstrap 2: delta = 0 + 0.5*2 - 0
        let (a, _) = compute_gae(&[0.0], &[0.0], &[false], &[2.0], 1, 0.5, 1.0);
        assert_eq!(a, vec![1.0]);
        let (a, _) = compute_gae(&[0.0], &[0.0], &[true], &[2.0], 1, 0.5, 1.0);
        assert_eq!(a, vec![0.0]);
    }

    #[test]
    fn envs_do_not_leak_into_each_other() {
        // env 0 ends on a non-terminal step; env 1's first value must not be used
        let (a, _) = compute_gae(
            &[0.0, 0.0],
            &[0.0, 10.0],
            &[false, true],
            &[0.0, 0.0],
            1,
            1.0,
            1.0,
        );
        assert_eq!(a, vec![0.0, -10.0]);
    }
}
