//! One action interface over trained policies and the scripted baselines.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::engine::label_clusters;
use crate::nn::{
    argmax, masked_log_softmax, sample, Checkpoint, CheckpointError, NetworkParams, NnError,
    Workspace,
};
use crate::obs::{ChannelLegend, Observation};

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("observation has no valid action")]
    NoValidAction,
    #[error("checkpoint expects channels [{expected}] on a {ew}x{eh} board, observation has [{got}] on {gw}x{gh}")]
    LegendMismatch {
        expected: String,
        ew: usize,
        eh: usize,
        got: String,
        gw: usize,
        gh: usize,
    },
    #[error(
        "bad agent spec {0:?}: expected random, greedy or policy:<checkpoint>[:argmax|:sample]"
    )]
    BadSpec(String),
    #[error("cannot load checkpoint: {0}")]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyMode {
    Sample,
    Argmax,
}

#[derive(Clone, Debug)]
pub enum AgentKind {
    Random,
    Greedy,
    Policy {
        params: Arc<NetworkParams<f32>>,
        legend: ChannelLegend,
        mode: PolicyMode,
    },
}

/// An immutable agent; share it freely across threads.
#[derive(Clone, Debug)]
pub struct Agent {
    pub id: String,
    pub kind: AgentKind,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

impl Agent {
    pub fn random() -> Agent {
        Agent {
            id: "random".into(),
            kind: AgentKind::Random,
        }
    }

    pub fn greedy() -> Agent {
        Agent {
            id: "greedy".into(),
            kind: AgentKind::Greedy,
        }
    }

    pub fn policy(id: impl Into<String>, checkpoint: Checkpoint, mode: PolicyMode) -> Agent {
        Agent {
            id: id.into(),
            kind: AgentKind::Policy {
                params: Arc::new(checkpoint.params),
                legend: checkpoint.legend,
                mode,
            },
        }
    }

    /// Parses `random`, `greedy` or `policy:<checkpoint>[:argmax|:sample]`.
    pub fn from_spec(spec: &str) -> Result<Agent, AgentError> {
        match spec {
            "random" => return Ok(Agent::random()),
            "greedy" => return Ok(Agent::greedy()),
            _ => {}
        }
        let Some(rest) = spec.strip_prefix("policy:") else {
            return Err(AgentError::BadSpec(spec.into()));
        };
        let (path, mode) = match rest.rsplit_once(':') {
            Some((p, "argmax")) => (p, PolicyMode::Argmax),
            Some((p, "sample")) => (p, PolicyMode::Sample),
            _ => (rest, PolicyMode::Sample),
        };
        if path.is_empty() {
            return Err(AgentError::BadSpec(spec.into()));
        }
        let ck = Checkpoint::load(Path::new(path))?;
        Ok(Agent::policy(spec, ck, mode))
    }

    /// Color slots the agent's observations must carry, if it cares.
    pub fn color_slots(&self) -> Option<usize> {
        match &self.kind {
            AgentKind::Policy { legend, .. } => Some(legend.color_slots()),
            _ => None,
        }
    }

    /// Per-thread scratch state for acting.
    pub fn actor(&self) -> Actor<'_> {
        let ws = match &self.kind {
            AgentKind::Policy { params, .. } => Some(Workspace::new(&params.shape)),
            _ => None,
        };
        Actor {
            agent: self,
            ws,
            lp: Vec::new(),
        }
    }
}

pub struct Actor<'a> {
    agent: &'a Agent,
    ws: Option<Workspace<f32>>,
    lp: Vec<f32>,
}

impl Actor<'_> {
    /// Picks a cell; never returns a masked one.
    pub fn act(&mut self, obs: &Observation, rng: &mut impl Rng) -> Result<usize, AgentError> {
        if !obs.any_valid() {
            return Err(AgentError::NoValidAction);
        }
        match &self.agent.kind {
            AgentKind::Random => {
                let valid: Vec<usize> = (0..obs.mask.len()).filter(|&i| obs.mask[i]).collect();
                Ok(*valid.choose(rng).expect("mask has a valid cell"))
            }
            AgentKind::Greedy => Ok(greedy_from_obs(obs)),
            AgentKind::Policy {
                params,
                legend,
                mode,
            } => {
                let s = params.shape;
                if obs.legend() != *legend || obs.width != s.width || obs.height != s.height {
                    return Err(AgentError::LegendMismatch {
                        expected: legend.0.join(","),
                        ew: s.width,
                        eh: s.height,
                        got: obs.legend().0.join(","),
                        gw: obs.width,
                        gh: obs.height,
                    });
                }
                let ws = self.ws.as_mut().expect("policy actor has a workspace");
                params.forward(&obs.tensor, ws)?;
                self.lp.resize(obs.mask.len(), 0.0);
                masked_log_softmax(&ws.logits, &obs.mask, &mut self.lp)?;
                Ok(match mode {
                    PolicyMode::Sample => sample(&self.lp, rng),
                    PolicyMode::Argmax => argmax(&self.lp),
                })
            }
        }
    }
}

/// First cell of a largest valid cluster; ties go to the lowest cell index.
pub fn greedy_from_obs(obs: &Observation) -> usize {
    let m = obs.channels();
    let color_of = |i: usize| {
        let px = &obs.tensor[i * m..i * m + obs.color_slots];
        px.iter().position(|v| *v > 0.5).map(|c| c as u8)
    };
    let clusters = label_clusters(obs.width, obs.height, color_of);
    let mut best: Option<&[usize]> = None;
    for c in &clusters {
        if c.cells.len() < 2 {
            continue;
        }
        match best {
            Some(b)
                if b.len() > c.cells.len() || (b.len() == c.cells.len() && b[0] < c.cells[0]) => {}
            _ => best = Some(&c.cells),
        }
    }
    best.map(|b| b[0])
        .unwrap_or_else(|| obs.mask.iter().position(|m| *m).unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Board, GoalTally, Level, Piece};
    use crate::nn::NetShape;
    use crate::obs::encode;
    use crate::rng::rng_from_seed;
    use std::collections::BTreeMap;

    fn obs_of(width: usize, height: usize, cells: Vec<Piece>, colors: u8) -> Observation {
        let weights = vec![1.0 / f64::from(colors); colors as usize];
        let b = Board::from_cells(width, height, cells, BTreeMap::new(), &weights, 0);
        let level = Level::blank("t", width, height, colors);
        encode(&b, &level, &GoalTally::new(), colors as usize).unwrap()
    }

    #[test]
    fn random_is_uniform_on_a_uniform_board() {
        let obs = obs_of(3, 3, vec![Piece::Color(0); 9], 2);
        let agent = Agent::random();
        let mut actor = agent.actor();
        let mut rng = rng_from_seed(1);
        let n = 10_000;
        let mut counts = [0usize; 9];
        for _ in 0..n {
            counts[actor.act(&obs, &mut rng).unwrap()] += 1;
        }
        let expected = n as f64 / 9.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9th percentile of chi-squared with 8 degrees of freedom
        assert!(chi2 < 26.12, "chi2 = {chi2}");
    }

    #[test]
    fn greedy_picks_the_larger_cluster() {
        // size-3 cluster of color 0 on the left, size-6 cluster of color 1 on the right
        let (a, b) = (Piece::Color(0), Piece::Color(1));
        let cells = vec![a, b, b, a, b, b, a, b, b];
        let obs = obs_of(3, 3, cells, 2);
        let six = [1, 2, 4, 5, 7, 8];
        let agent = Agent::greedy();
        let mut actor = agent.actor();
        let mut rng = rng_from_seed(0);
        let first = actor.act(&obs, &mut rng).unwrap();
        assert!(six.contains(&first));
        assert_eq!(first, 1);
        for _ in 0..10 {
            assert_eq!(actor.act(&obs, &mut rng).unwrap(), first);
        }
    }

    #[test]
    fn single_valid_cell_pair_is_chosen_by_everyone() {
        let (a, c) = (Piece::Color(0), Piece::Color(2));
        let obs = obs_of(3, 1, vec![c, a, a], 3);
        let shape = NetShape::new(3, 1, 7).with_conv_channels([2, 2, 2]);
        let ck = Checkpoint {
            legend: ChannelLegend::new(3),
            params: NetworkParams::init(shape, 3),
            meta: BTreeMap::new(),
        };
        let agents = [
            Agent::random(),
            Agent::greedy(),
            Agent::policy("p", ck.clone(), PolicyMode::Sample),
            Agent::policy("p", ck, PolicyMode::Argmax),
        ];
        let mut rng = rng_from_seed(2);
        for agent in &agents {
            let mut actor = agent.actor();
            for _ in 0..20 {
                let a = actor.act(&obs, &mut rng).unwrap();
                assert!(a == 1 || a == 2, "{agent}: {a}");
            }
        }
    }

    #[test]
    fn dead_observation_is_an_error() {
        let obs = obs_of(2, 1, vec![Piece::Color(0), Piece::Color(1)], 2);
        let agent = Agent::greedy();
        assert!(matches!(
            agent.actor().act(&obs, &mut rng_from_seed(0)),
            Err(AgentError::NoValidAction)
        ));
    }

    #[test]
    fn policy_rejects_foreign_legend() {
        let obs = obs_of(2, 2, vec![Piece::Color(0); 4], 2);
        let shape = NetShape::new(2, 2, 7).with_conv_channels([2, 2, 2]);
        let ck = Checkpoint {
            legend: ChannelLegend::new(3),
            params: NetworkParams::init(shape, 3),
            meta: BTreeMap::new(),
        };
        let agent = Agent::policy("p", ck, PolicyMode::Sample);
        assert!(matches!(
            agent.actor().act(&obs, &mut rng_from_seed(0)),
            Err(AgentError::LegendMismatch { .. })
        ));
    }

    #[test]
    fn spec_parsing() {
        assert!(matches!(
            Agent::from_spec("random").unwrap().kind,
            AgentKind::Random
        ));
        assert!(matches!(
            Agent::from_spec("greedy").unwrap().kind,
            AgentKind::Greedy
        ));
        assert!(matches!(
            Agent::from_spec("bogus"),
            Err(AgentError::BadSpec(_))
        ));
        assert!(matches!(
            Agent::from_spec("policy:"),
            Err(AgentError::BadSpec(_))
        ));
        assert!(matches!(
            Agent::from_spec("policy:/nonexistent/x.ckpt:argmax"),
            Err(AgentError::Checkpoint(_))
        ));
    }
}
