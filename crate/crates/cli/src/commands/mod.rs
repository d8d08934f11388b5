//! One function per subcommand, callable without going through argument parsing.

mod bench;
mod correlate;
mod eval;
mod gen_levels;
mod pipeline;
mod report;
mod simulate;
mod train;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use blastlab::engine::Level;
use blastlab::levels::{load_level, load_level_set};

use crate::error::{CliError, CliResult};

pub use bench::{bench, BenchReport};
pub use correlate::correlate;
pub use eval::{default_eval_name, eval};
pub use gen_levels::gen_levels;
pub use pipeline::{pipeline, PipelineSummary};
pub use report::report;
pub use simulate::simulate_players;
pub use train::train;

/// Relative paths are tried against the output root, then the working directory.
pub fn resolve(root: &Path, p: &Path) -> PathBuf {
    let under_root = root.join(p);
    if p.is_absolute() || !under_root.exists() {
        p.to_path_buf()
    } else {
        under_root
    }
}

/// A level file or a directory of them.
pub fn load_levels(root: &Path, p: &Path) -> CliResult<Vec<Arc<Level>>> {
    let path = resolve(root, p);
    let levels = if path.is_dir() {
        load_level_set(&path).map_err(CliError::data)?
    } else if path.is_file() {
        vec![load_level(&path).map_err(CliError::data)?]
    } else {
        return Err(CliError::data(format!(
            "no level file or directory at {}",
            path.display()
        )));
    };
    if levels.is_empty() {
        return Err(CliError::data(format!("no levels in {}", path.display())));
    }
    Ok(levels.into_iter().map(Arc::new).collect())
}

/// File-name-safe version of an identifier.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_path_safe() {
        assert_eq!(
            slug("policy:runs/a.ckpt:argmax"),
            "policy-runs-a.ckpt-argmax"
        );
    }
}
