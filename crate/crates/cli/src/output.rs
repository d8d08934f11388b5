//! Output bookkeeping: config snapshots, provenance headers, cleanup on failure.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Files written by one command. Unless [`Outputs::commit`] is called, every
/// tracked file is deleted when this is dropped.
pub struct Outputs {
    root: PathBuf,
    snapshot: String,
    created: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    /// Writes the resolved config to `<root>/config/<label>.toml`.
    pub fn begin(root: &Path, label: &str, resolved_toml: &str) -> CliResult<Outputs> {
        let snapshot = format!("config/{label}.toml");
        let mut out = Outputs {
            root: root.to_path_buf(),
            snapshot,
            created: Vec::new(),
            committed: false,
        };
        let rel = out.snapshot.clone();
        out.write_bytes(&rel, resolved_toml.as_bytes())?;
        Ok(out)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Snapshot path relative to the output root, as named in file headers.
    pub fn snapshot(&self) -> &str {
        &self.snapshot
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.path(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)
            .map_err(|e| CliError::internal(format!("writing {}: {e}", path.display())))?;
        self.created.push(path.clone());
        Ok(path)
    }

    /// A CSV file whose first line names the config snapshot.
    pub fn write_csv<E: std::fmt::Display>(
        &mut self,
        rel: &str,
        body: impl FnOnce(&mut Vec<u8>) -> Result<(), E>,
    ) -> CliResult<PathBuf> {
        let mut bytes = format!("# config: {}\n", self.snapshot).into_bytes();
        body(&mut bytes).map_err(|e| CliError::internal(format!("formatting {rel}: {e}")))?;
        self.write_bytes(rel, &bytes)
    }

    /// Registers a file written by other means so it is cleaned up too.
    pub fn track(&mut self, path: PathBuf) {
        self.created.push(path);
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.created)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for p in self.created.iter().rev() {
            let _ = fs::remove_file(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncommitted_outputs_are_removed() {
        let dir = tempfile::tempdir().unwrap();
        let kept;
        {
            let mut out = Outputs::begin(dir.path(), "t", "a = 1\n").unwrap();
            kept = out
                .write_csv("x/data.csv", |b| {
                    b.extend_from_slice(b"h\n1\n");
                    Ok::<_, String>(())
                })
                .unwrap();
            assert!(kept.exists());
        }
        assert!(!kept.exists());
        assert!(!dir.path().join("config/t.toml").exists());

        let mut out = Outputs::begin(dir.path(), "t", "a = 1\n").unwrap();
        let p = out
            .write_csv("data.csv", |b| {
                b.extend_from_slice(b"h\n");
                Ok::<_, String>(())
            })
            .unwrap();
        out.commit();
        assert_eq!(
            fs::read_to_string(p).unwrap(),
            "# config: config/t.toml\nh\n"
        );
    }
}
