//! Versioned JSON snapshots of the memory state.
//!
//! Files are written to a temporary sibling and renamed into place, so a reader
//! never observes a partially written snapshot.

use std::io::Write;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reasoner::MissingList;
use crate::stcm::StcmBuffer;
use crate::sustain::SustainNetwork;
use crate::vocab::Vocabulary;

pub const FORMAT_VERSION: u32 = 1;

/// Generator streams for sensing and for visit scheduling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub perception: ChaCha8Rng,
    pub schedule: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateSnapshot {
    pub format_version: u32,
    pub vocabulary: Vocabulary,
    pub network: SustainNetwork,
    pub stcm: StcmBuffer,
    pub missing_list: MissingList,
    pub day_cursor: u32,
    pub rng_state: RngState,
}

impl StateSnapshot {
    /// Cross-checks dimensions and labels against the vocabulary.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: self.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let dim = self.vocabulary.dim();
        self.network.validate()?;
        if self.network.dim() != dim {
            return Err(Error::Inconsistent(format!(
                "network dimension {} does not match vocabulary size {dim}",
                self.network.dim()
            )));
        }
        self.stcm.validate(dim)?;
        if let Some(item) = self.missing_list.items().iter().find(|i| !self.vocabulary.contains(i)) {
            return Err(Error::Inconsistent(format!(
                "missing list item `{item}` not in vocabulary"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::parse("state snapshot", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::parse("state snapshot", e))?;
        let found = value
            .get("formatVersion")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| {
                Error::parse(
                    "state snapshot",
                    serde::de::Error::custom("missing or non-integer formatVersion"),
                )
            })?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(Error::VersionMismatch {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                expected: FORMAT_VERSION,
            });
        }
        let snapshot: Self = serde_json::from_value(value).map_err(|e| Error::parse("state snapshot", e))?;
        snapshot.validate()?;
        Ok(snapshot)
    }
}

pub fn save_state(snapshot: &StateSnapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    snapshot.validate()?;
    let json = snapshot.to_json()?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(json.as_bytes()).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load_state(path: impl AsRef<Path>) -> Result<StateSnapshot> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    StateSnapshot::from_json(&text)
}
