//! Resumable search progress, stored as canonical JSON and replaced
//! atomically.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CHECKPOINT_SCHEMA: &str = "sigma-fact/checkpoint/v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointState {
    pub next_n: u64,
    /// Indices with a recorded verdict; contiguous, ending at `next_n - 1`.
    pub completed: BTreeSet<u64>,
    /// Prime indices, ascending.
    pub found: Vec<u64>,
    pub config_fingerprint: String,
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("checkpoint {path} is not valid JSON: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("checkpoint schema {found:?} is not {CHECKPOINT_SCHEMA:?}")]
    Schema { found: String },
    #[error("checkpoint was written under a different configuration (fingerprint {found}, expected {expected})")]
    FingerprintMismatch { expected: String, found: String },
    #[error("inconsistent checkpoint: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckpointFile {
    schema: String,
    config_fingerprint: String,
    next_n: u64,
    completed: Vec<u64>,
    found: Vec<u64>,
}

impl CheckpointState {
    pub fn fresh(next_n: u64, config_fingerprint: impl Into<String>) -> Self {
        Self {
            next_n,
            completed: BTreeSet::new(),
            found: Vec::new(),
            config_fingerprint: config_fingerprint.into(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = CheckpointFile {
            schema: CHECKPOINT_SCHEMA.to_owned(),
            config_fingerprint: self.config_fingerprint.clone(),
            next_n: self.next_n,
            completed: self.completed.iter().copied().collect(),
            found: self.found.clone(),
        };
        let mut out = serde_json::to_string(&file).expect("checkpoint serializes");
        out.push('\n');
        out
    }

    fn validate(&self) -> Result<(), CheckpointError> {
        if self.next_n == 0 {
            return Err(CheckpointError::Invalid("next_n is 0".into()));
        }
        if let (Some(&first), Some(&last)) = (self.completed.first(), self.completed.last()) {
            if last + 1 != self.next_n || last - first + 1 != self.completed.len() as u64 {
                return Err(CheckpointError::Invalid(format!(
                    "completed set {first}..={last} is not gap-free up to next_n - 1 = {}",
                    self.next_n - 1
                )));
            }
        }
        if !self.found.windows(2).all(|w| w[0] < w[1]) {
            return Err(CheckpointError::Invalid("found list is not ascending".into()));
        }
        if let Some(n) = self.found.iter().find(|n| !self.completed.contains(n)) {
            return Err(CheckpointError::Invalid(format!("found index {n} was never completed")));
        }
        Ok(())
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn checkpoint_save(state: &CheckpointState, path: &Path) -> Result<(), CheckpointError> {
    state.validate()?;
    write_atomic(path, state.to_json().as_bytes()).map_err(|source| CheckpointError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Loads a checkpoint, refusing one written under another configuration.
pub fn checkpoint_load(path: &Path, expected_fingerprint: &str) -> Result<CheckpointState, CheckpointError> {
    let text = fs::read_to_string(path).map_err(|source| CheckpointError::Io {
        path: path.to_owned(),
        source,
    })?;
    let file: CheckpointFile = serde_json::from_str(&text).map_err(|source| CheckpointError::Parse {
        path: path.to_owned(),
        source,
    })?;
    if file.schema != CHECKPOINT_SCHEMA {
        return Err(CheckpointError::Schema { found: file.schema });
    }
    if file.config_fingerprint != expected_fingerprint {
        return Err(CheckpointError::FingerprintMismatch {
            expected: expected_fingerprint.to_owned(),
            found: file.config_fingerprint,
        });
    }
    let completed: BTreeSet<u64> = file.completed.iter().copied().collect();
    if completed.len() != file.completed.len() {
        return Err(CheckpointError::Invalid("duplicate completed index".into()));
    }
    let state = CheckpointState {
        next_n: file.next_n,
        completed,
        found: file.found,
        config_fingerprint: file.config_fingerprint,
    };
    state.validate()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> CheckpointState {
        CheckpointState {
            next_n: 31,
            completed: (1..=30).collect(),
            found: vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 19, 24],
            config_fingerprint: "abc123".into(),
        }
    }

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        checkpoint_save(&sample(), &path).unwrap();
        assert_eq!(checkpoint_load(&path, "abc123").unwrap(), sample());
        // no temp files left behind
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn fingerprint_mismatch_is_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        checkpoint_save(&sample(), &path).unwrap();
        assert!(matches!(
            checkpoint_load(&path, "other"),
            Err(CheckpointError::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn rejects_gaps_and_bad_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");

        let mut gappy = sample();
        gappy.completed.remove(&7);
        assert!(matches!(checkpoint_save(&gappy, &path), Err(CheckpointError::Invalid(_))));

        fs::write(&path, sample().to_json().replace("/v1", "/v0")).unwrap();
        assert!(matches!(checkpoint_load(&path, "abc123"), Err(CheckpointError::Schema { .. })));

        fs::write(&path, "{").unwrap();
        assert!(matches!(checkpoint_load(&path, "abc123"), Err(CheckpointError::Parse { .. })));

        let missing = dir.path().join("missing.json");
        assert!(matches!(checkpoint_load(&missing, "abc123"), Err(CheckpointError::Io { .. })));
    }

    proptest! {
        #[test]
        fn save_load_identity(start in 1u64..500, len in 0u64..300, mask in any::<u64>(), fp in "[0-9a-f]{8,64}") {
            let completed: BTreeSet<u64> = (start..start + len).collect();
            let found = completed.iter().copied().filter(|n| mask >> (n % 64) & 1 == 1).collect();
            let state = CheckpointState { next_n: start + len, completed, found, config_fingerprint: fp.clone() };
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("c.json");
            checkpoint_save(&state, &path).unwrap();
            prop_assert_eq!(checkpoint_load(&path, &fp).unwrap(), state);
        }
    }
}
