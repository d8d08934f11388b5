use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::Level;
use crate::nn::DEFAULT_CONV_CHANNELS;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid PPO config: {0}")]
pub struct ConfigError(pub String);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoConfig {
    pub n_envs: usize,
    pub n_steps: usize,
    pub n_minibatches: usize,
    pub learning_rate: f64,
    pub entropy_coef: f64,
    pub clip_range: f64,
    pub value_coef: f64,
    pub gamma: f64,
    pub lambda_gae: f64,
    pub update_epochs: usize,
    pub episode_step_cap: u32,
    /// Global gradient-norm clip; 0 disables clipping.
    pub max_grad_norm: f64,
    pub conv_channels: [usize; 3],
    pub seed: u64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            n_envs: 8,
            n_steps: 256,
            n_minibatches: 64,
            learning_rate: 1e-4,
            entropy_coef: 0.01,
            clip_range: 0.2,
            value_coef: 0.5,
            gamma: 0.99,
            lambda_gae: 0.95,
            update_epochs: 4,
            episode_step_cap: 100,
            max_grad_norm: 0.5,
            conv_channels: DEFAULT_CONV_CHANNELS,
            seed: 0,
        }
    }
}

impl PpoConfig {
    pub fn batch_size(&self) -> usize {
        self.n_envs * self.n_steps
    }

    pub fn minibatch_size(&self) -> usize {
        self.batch_size() / self.n_minibatches
    }

    /// Number of updates needed to spend `budget` environment steps (rounded up
    /// to whole rollouts).
    pub fn updates_for(&self, budget: u64) -> u64 {
        budget.div_ceil(self.batch_size() as u64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError(m.to_string()));
        if self.n_envs == 0 || self.n_steps == 0 || self.n_minibatches == 0 {
            return err("n_envs, n_steps and n_minibatches must be positive");
        }
        if !self.batch_size().is_multiple_of(self.n_minibatches) {
            return err("n_envs * n_steps must be divisible by n_minibatches");
        }
        if self.update_epochs == 0 || self.episode_step_cap == 0 {
            return err("update_epochs and episode_step_cap must be positive");
        }
        let coefs = [
            self.learning_rate,
            self.entropy_coef,
            self.clip_range,
            self.value_coef,
            self.gamma,
            self.lambda_gae,
            self.max_grad_norm,
        ];
        if coefs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return err("coefficients must be finite and non-negative");
        }
        if self.gamma > 1.0 || self.lambda_gae > 1.0 {
            return err("gamma and lambda_gae must be at most 1");
        }
        if self.conv_channels.contains(&0) {
            return err("conv_channels must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "oneStepCurriculum")]
    OneStepCurriculum,
    #[serde(rename = "oneStepTarget")]
    OneStepTarget,
    #[serde(rename = "twoStep")]
    TwoStep,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::OneStepCurriculum,
        ScenarioKind::OneStepTarget,
        ScenarioKind::TwoStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::OneStepCurriculum => "oneStepCurriculum",
            ScenarioKind::OneStepTarget => "oneStepTarget",
            ScenarioKind::TwoStep => "twoStep",
        }
    }

    pub fn parse(s: &str) -> Option<ScenarioKind> {
        ScenarioKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What to train on and for how long.
///
/// `budgets` holds one entry per phase: the curriculum phase and/or the
/// target phase, in that order.
#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub curriculum: Vec<Arc<Level>>,
    pub target: Option<Arc<Level>>,
    pub budgets: Vec<u64>,
    /// Color channels in the observation; 0 picks the largest color count
    /// among the scenario's levels.
    pub color_slots: usize,
}

/// One training phase: a level pool and a step budget.
#[derive(Clone, Debug)]
pub struct Phase {
    pub name: &'static str,
    pub levels: Vec<Arc<Level>>,
    pub budget: u64,
}

impl ScenarioSpec {
    pub fn phases(&self) -> Result<Vec<Phase>, ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        let curriculum = || -> Result<Phase, ConfigError> {
            if self.curriculum.is_empty() {
                return Err(ConfigError(format!(
                    "{} needs curriculum levels",
                    self.kind
                )));
            }
            Ok(Phase {
                name: "curriculum",
                levels: self.curriculum.clone(),
                budget: self.budgets[0],
            })
        };
        let target = |budget: u64| -> Result<Phase, ConfigError> {
            match &self.target {
                Some(t) => Ok(Phase {
                    name: "target",
                    levels: vec![t.clone()],
                    budget,
                }),
                None => Err(ConfigError(format!("{} needs a target level", self.kind))),
            }
        };
        let want = if self.kind == ScenarioKind::TwoStep {
            2
        } else {
            1
        };
        if self.budgets.len() != want {
            return err(format!(
                "{} takes {want} step budget(s), got {}",
                self.kind,
                self.budgets.len()
            ));
        }
        match self.kind {
            ScenarioKind::OneStepCurriculum => Ok(vec![curriculum()?]),
            ScenarioKind::OneStepTarget => Ok(vec![target(self.budgets[0])?]),
            ScenarioKind::TwoStep => Ok(vec![curriculum()?, target(self.budgets[1])?]),
        }
    }

    pub fn resolved_color_slots(&self) -> usize {
        if self.color_slots > 0 {
            return self.color_slots;
        }
        self.curriculum
            .iter()
            .chain(self.target.iter())
            .map(|l| l.color_count as usize)
            .max()
            .unwrap_or(0)
    }
}
