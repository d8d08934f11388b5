use std::path::{Path, PathBuf};

use blastlab::agents::{Agent, AgentError};
use blastlab::eval::{run_episodes, write_episodes_csv, EvalError};
use blastlab::rng::{derive_seed, stream_key};

use super::{load_levels, resolve, slug};
use crate::config::{to_toml, EvalConfig};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

/// `random`, `greedy`, or `<run>-<file stem>` for a policy checkpoint.
pub fn default_eval_name(agent: &str) -> String {
    let Some(rest) = agent.strip_prefix("policy:") else {
        return slug(agent);
    };
    let path = rest
        .strip_suffix(":argmax")
        .or_else(|| rest.strip_suffix(":sample"))
        .unwrap_or(rest);
    let p = Path::new(path);
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match p.parent().and_then(|d| d.file_name()) {
        Some(run) => slug(&format!("{}-{stem}", run.to_string_lossy())),
        None => slug(&stem),
    }
}

/// Loads an agent; checkpoint paths resolve like every other input, and the
/// agent keeps the spec exactly as written for its id.
fn load_agent(root: &Path, spec: &str) -> CliResult<Agent> {
    let resolved = match spec.strip_prefix("policy:") {
        None => spec.to_string(),
        Some(rest) => {
            let (path, mode) = match rest.rsplit_once(':') {
                Some((p, m @ ("argmax" | "sample"))) => (p, format!(":{m}")),
                _ => (rest, String::new()),
            };
            format!("policy:{}{mode}", resolve(root, Path::new(path)).display())
        }
    };
    let mut agent = Agent::from_spec(&resolved).map_err(|e| match e {
        AgentError::BadSpec(_) => CliError::usage(e),
        _ => CliError::data(e),
    })?;
    agent.id = spec.to_string();
    Ok(agent)
}

/// Writes `episodes/<name>.csv`. Level `L` uses base seed `derive(seed, key(L))`.
pub fn eval(root: &Path, cfg: &EvalConfig) -> CliResult<PathBuf> {
    if cfg.episodes == 0 {
        return Err(CliError::usage("episodes must be positive"));
    }
    let name = if cfg.name.is_empty() {
        default_eval_name(&cfg.agent)
    } else {
        cfg.name.clone()
    };
    let agent = load_agent(root, &cfg.agent)?;
    let levels = load_levels(root, &cfg.levels)?;
    let mut records = Vec::with_capacity(levels.len() * cfg.episodes);
    for level in &levels {
        let seed = derive_seed(cfg.seed, stream_key(&level.id));
        let runs =
            run_episodes(&agent, level, cfg.episodes, cfg.move_cap, seed).map_err(|e| match e {
                EvalError::Agent(_) | EvalError::Obs(_) => {
                    CliError::data(format!("level {}: {e}", level.id))
                }
                _ => CliError::internal(e),
            })?;
        records.extend(runs);
    }
    let mut out = Outputs::begin(root, &format!("eval-{name}"), &to_toml(cfg)?)?;
    let path = out.write_csv(&format!("episodes/{name}.csv"), |b| {
        write_episodes_csv(&records, b)
    })?;
    out.commit();
    Ok(path)
}
