use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use blastlab::nn::Checkpoint;
use blastlab::obs::ChannelLegend;
use blastlab::ppo::{
    run_scenario, write_curve_csv, PpoError, ScenarioKind, ScenarioSpec, TrainOptions,
};

use super::load_levels;
use crate::config::{to_toml, TrainConfig};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

fn checkpoint(
    params: blastlab::nn::NetworkParams<f32>,
    color_slots: usize,
    meta: &BTreeMap<String, String>,
    phase: &str,
    env_steps: u64,
) -> Checkpoint {
    let mut meta = meta.clone();
    meta.insert("phase".into(), phase.into());
    meta.insert("envSteps".into(), env_steps.to_string());
    Checkpoint {
        legend: ChannelLegend::new(color_slots),
        params,
        meta,
    }
}

/// Trains one scenario. Writes `train/<name>/{curve.csv, final.ckpt,
/// checkpoints/<phase>-<steps>.ckpt}` and returns the final checkpoint path.
/// On a non-finite loss the offending rollout buffer is kept as
/// `train/<name>/nan-buffer.csv` and the command fails.
pub fn train(root: &Path, cfg: &TrainConfig, progress: bool) -> CliResult<PathBuf> {
    let name = if cfg.name.is_empty() {
        cfg.scenario.to_string()
    } else {
        cfg.name.clone()
    };
    let curriculum = match (&cfg.curriculum, cfg.scenario) {
        (Some(p), ScenarioKind::OneStepCurriculum | ScenarioKind::TwoStep) => load_levels(root, p)?,
        (None, ScenarioKind::OneStepCurriculum | ScenarioKind::TwoStep) => {
            return Err(CliError::usage(format!(
                "{} needs --curriculum",
                cfg.scenario
            )));
        }
        _ => Vec::new(),
    };
    let target = match (&cfg.target, cfg.scenario) {
        (Some(p), ScenarioKind::OneStepTarget | ScenarioKind::TwoStep) => {
            let mut set = load_levels(root, p)?;
            if set.len() != 1 {
                return Err(CliError::usage(format!(
                    "target must be a single level, got {}",
                    set.len()
                )));
            }
            Some(set.remove(0))
        }
        (None, ScenarioKind::OneStepTarget | ScenarioKind::TwoStep) => {
            return Err(CliError::usage(format!("{} needs --target", cfg.scenario)));
        }
        _ => None,
    };
    let budgets = match cfg.scenario {
        ScenarioKind::OneStepCurriculum => vec![cfg.curriculum_budget],
        ScenarioKind::OneStepTarget => vec![cfg.target_budget],
        ScenarioKind::TwoStep => vec![cfg.curriculum_budget, cfg.target_budget],
    };
    let spec = ScenarioSpec {
        kind: cfg.scenario,
        curriculum,
        target,
        budgets,
        color_slots: cfg.color_slots,
    };

    let resolved = to_toml(cfg)?;
    let mut out = Outputs::begin(root, &format!("train-{name}"), &resolved)?;
    let dir = format!("train/{name}");
    let mut meta = BTreeMap::new();
    meta.insert("scenario".to_string(), cfg.scenario.to_string());
    meta.insert("config".to_string(), resolved);

    let mut report = |row: &blastlab::ppo::CurveRow| {
        if progress {
            eprintln!(
                "[{}] update {} steps {} moves {} win {}",
                row.phase,
                row.update,
                row.env_steps,
                row.mean_episode_moves
                    .map_or("-".into(), |m| format!("{m:.2}")),
                row.win_rate.map_or("-".into(), |w| format!("{w:.3}")),
            );
        }
    };
    let opts = TrainOptions {
        snapshot_every: cfg.snapshot_every,
        on_update: Some(&mut report),
    };
    let outcome = match run_scenario(&spec, &cfg.ppo, opts) {
        Ok(o) => o,
        Err(PpoError::NaNLoss {
            update,
            epoch,
            minibatch,
            buffer,
        }) => {
            out.write_csv(&format!("{dir}/nan-buffer.csv"), |b| buffer.write_csv(b))?;
            out.commit();
            return Err(CliError::internal(format!(
                "non-finite loss at update {update} (epoch {epoch}, minibatch {minibatch}); buffer saved to {dir}/nan-buffer.csv"
            )));
        }
        Err(e @ (PpoError::Config(_) | PpoError::MixedDimensions)) => {
            return Err(CliError::usage(e))
        }
        Err(e @ PpoError::Env(_)) => return Err(CliError::data(e)),
        Err(e) => return Err(CliError::internal(e)),
    };

    out.write_csv(&format!("{dir}/curve.csv"), |b| {
        write_curve_csv(&outcome.curve, b)
    })?;
    for s in &outcome.snapshots {
        let ck = checkpoint(
            s.params.clone(),
            outcome.color_slots,
            &meta,
            s.phase,
            s.env_steps,
        );
        out.write_bytes(
            &format!("{dir}/checkpoints/{}-{:010}.ckpt", s.phase, s.env_steps),
            &ck.to_bytes(),
        )?;
    }
    let last_phase = outcome.curve.last().map_or("init", |r| r.phase);
    let ck = checkpoint(
        outcome.params,
        outcome.color_slots,
        &meta,
        last_phase,
        outcome.env_steps,
    );
    let path = out.write_bytes(&format!("{dir}/final.ckpt"), &ck.to_bytes())?;
    out.commit();
    Ok(path)
}
