//! Training loop and the three scenarios.

use std::io::Write;
use std::sync::Arc;

use super::config::{ConfigError, PpoConfig, ScenarioSpec};
use super::env::{EnvError, TrainEnv};
use super::rollout::{collect_rollouts, RolloutBuffer, RolloutError, Worker};
use super::update::{normalize, ppo_update, UpdateError, UpdateStats};
use crate::engine::Level;
use crate::nn::{Adam, AdamConfig, NetShape, NetworkParams};
use crate::obs::FIXED_CHANNELS;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, thiserror::Error)]
pub enum PpoError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("rollout failed: {0}")]
    Rollout(#[from] RolloutError),
    #[error("non-finite loss at update {update} (epoch {epoch}, minibatch {minibatch})")]
    NaNLoss {
        update: u64,
        epoch: usize,
        minibatch: usize,
        buffer: Box<RolloutBuffer>,
    },
    #[error("update failed: {0}")]
    Update(UpdateError),
    #[error("levels in one scenario must share board dimensions")]
    MixedDimensions,
}

/// One line of the training curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub phase: &'static str,
    pub update: u64,
    pub env_steps: u64,
    pub episodes: usize,
    /// `None` when no episode finished during the rollout.
    pub mean_episode_moves: Option<f64>,
    pub win_rate: Option<f64>,
    pub stats: UpdateStats,
}

pub const CURVE_HEADER: [&str; 12] = [
    "phase",
    "updateIdx",
    "envSteps",
    "episodes",
    "meanEpisodeMoves",
    "winRate",
    "policyLoss",
    "valueLoss",
    "entropy",
    "clipFraction",
    "approxKl",
    "gradNorm",
];

pub fn write_curve_csv(rows: &[CurveRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in rows {
        let s = &r.stats;
        w.write_record(&[
            r.phase.to_string(),
            r.update.to_string(),
            r.env_steps.to_string(),
            r.episodes.to_string(),
            opt(r.mean_episode_moves),
            opt(r.win_rate),
            format!("{:.6}", s.policy_loss),
            format!("{:.6}", s.value_loss),
            format!("{:.6}", s.entropy),
            format!("{:.6}", s.clip_fraction),
            format!("{:.6}", s.approx_kl),
            format!("{:.6}", s.grad_norm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parameters saved during training.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub phase: &'static str,
    pub env_steps: u64,
    pub params: NetworkParams<f32>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: NetworkParams<f32>,
    pub color_slots: usize,
    pub curve: Vec<CurveRow>,
    pub snapshots: Vec<Snapshot>,
    pub env_steps: u64,
}

/// Snapshot cadence and progress reporting.
#[derive(Default)]
pub struct TrainOptions<'a> {
    /// Keep a snapshot every this many updates; 0 keeps only phase ends.
    pub snapshot_every: u64,
    pub on_update: Option<&'a mut dyn FnMut(&CurveRow)>,
}

/// Network input shape for levels of `width x height` with `color_slots`.
pub fn net_shape(width: usize, height: usize, color_slots: usize, config: &PpoConfig) -> NetShape {
    NetShape::new(width, height, color_slots + FIXED_CHANNELS.len())
        .with_conv_channels(config.conv_channels)
}

/// Trains `params` in place for `budget` environment steps on `levels`.
///
/// `phase_seed` fixes every random stream of the phase: env `i` uses
/// `derive(phase_seed, 2i)` for level/board draws and `derive(phase_seed, 2i+1)`
/// for action sampling; minibatch shuffling uses `derive(phase_seed, u64::MAX)`.
#[allow(clippy::too_many_arguments)]
pub fn train_phase(
    params: &mut NetworkParams<f32>,
    phase: &'static str,
    levels: &[Arc<Level>],
    budget: u64,
    color_slots: usize,
    config: &PpoConfig,
    phase_seed: u64,
    opts: &mut TrainOptions<'_>,
    outcome: &mut TrainOutcome,
) -> Result<(), PpoError> {
    let updates = config.updates_for(budget);
    let mut workers = (0..config.n_envs)
        .map(|i| {
            let env = TrainEnv::new(
                levels.to_vec(),
                color_slots,
                config.episode_step_cap,
                derive_seed(phase_seed, 2 * i as u64),
            )?;
            Ok(Worker::new(
                env,
                &params.shape,
                derive_seed(phase_seed, 2 * i as u64 + 1),
            )?)
        })
        .collect::<Result<Vec<_>, PpoError>>()?;
    let mut adam = Adam::new(
        AdamConfig {
            lr: config.learning_rate,
            ..AdamConfig::default()
        },
        params,
    );
    let mut shuffle_rng = rng_from_seed(derive_seed(phase_seed, u64::MAX));

    for update in 0..updates {
        let buf = collect_rollouts(params, &mut workers, config.n_steps)?;
        outcome.env_steps += buf.len() as u64;
        let (mut adv, ret) = buf.advantages(config.gamma, config.lambda_gae);
        normalize(&mut adv);
        let stats = match ppo_update(
            params,
            &mut adam,
            &buf,
            &adv,
            &ret,
            config,
            &mut shuffle_rng,
        ) {
            Ok(s) => s,
            Err(UpdateError::NaNLoss { epoch, minibatch }) => {
                return Err(PpoError::NaNLoss {
                    update,
                    epoch,
                    minibatch,
                    buffer: Box::new(buf),
                })
            }
            Err(e) => return Err(PpoError::Update(e)),
        };
        let n = buf.episodes.len();
        let row = CurveRow {
            phase,
            update: outcome.curve.len() as u64,
            env_steps: outcome.env_steps,
            episodes: n,
            mean_episode_moves: (n > 0)
                .then(|| buf.episodes.iter().map(|e| f64::from(e.moves)).sum::<f64>() / n as f64),
            win_rate: (n > 0)
                .then(|| buf.episodes.iter().filter(|e| e.won).count() as f64 / n as f64),
            stats,
        };
        if let Some(cb) = opts.on_update.as_mut() {
            cb(&row);
        }
        outcome.curve.push(row);
        let last = update + 1 == updates;
        if !last && opts.snapshot_every > 0 && (update + 1) % opts.snapshot_every == 0 {
            outcome.snapshots.push(Snapshot {
                phase,
                env_steps: outcome.env_steps,
                params: params.clone(),
            });
        }
    }
    outcome.snapshots.push(Snapshot {
        phase,
        env_steps: outcome.env_steps,
        params: params.clone(),
    });
    Ok(())
}

/// Trains a fresh network through every phase of `spec`.
///
/// Phase `p` draws its randomness from `derive(config.seed, p + 1)`, so the
/// curriculum phase of `twoStep` replays `oneStepCurriculum` exactly; the
/// target phase starts from the curriculum parameters with fresh optimizer
/// state. Initial weights come from `derive(config.seed, 0)`.
pub fn run_scenario(
    spec: &ScenarioSpec,
    config: &PpoConfig,
    mut opts: TrainOptions<'_>,
) -> Result<TrainOutcome, PpoError> {
    config.validate()?;
    let phases = spec.phases()?;
    let first = &phases[0].levels[0];
    let (w, h) = (first.width, first.height);
    if phases
        .iter()
        .flat_map(|p| &p.levels)
        .any(|l| l.width != w || l.height != h)
    {
        return Err(PpoError::MixedDimensions);
    }
    let color_slots = spec.resolved_color_slots();
    let shape = net_shape(w, h, color_slots, config);
    let params = NetworkParams::init(shape, derive_seed(config.seed, 0));
    let mut outcome = TrainOutcome {
        params,
        color_slots,
        curve: Vec::new(),
        snapshots: Vec::new(),
        env_steps: 0,
    };
    for (p, phase) in phases.iter().enumerate() {
        let mut params = outcome.params.clone();
        train_phase(
            &mut params,
            phase.name,
            &phase.levels,
            phase.budget,
            color_slots,
            config,
            derive_seed(config.seed, p as u64 + 1),
            &mut opts,
            &mut outcome,
        )?;
        outcome.params = params;
    }
    Ok(outcome)
}
