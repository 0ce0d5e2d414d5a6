//! Collaboration-level and middleware-level graphs, their GraphML/DOT
//! encodings and the component diff between two deployments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod collab;
pub mod dot;
pub mod graphml;
mod middleware;
mod plan;

pub use collab::{CollabKind, CollabVertex, CollaborationGraph, Flow, Session};
pub use middleware::{LinkKind, MiddlewareGraph, MwEdge, MwKind, MwVertex};
pub use plan::{apply, diff, MigrationPlan, Move, PlanError};

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    #[default]
    Audio,
    Text,
    Video,
}

impl DataType {
    pub const ALL: [DataType; 3] = [DataType::Audio, DataType::Text, DataType::Video];

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Audio => "audio",
            DataType::Text => "text",
            DataType::Video => "video",
        }
    }

    /// Most frequent type, ties broken towards audio, then text.
    pub fn dominant<I: IntoIterator<Item = DataType>>(types: I) -> DataType {
        let mut counts = [0usize; 3];
        for t in types {
            counts[t as usize] += 1;
        }
        let mut best = DataType::Audio;
        for t in DataType::ALL {
            if counts[t as usize] > counts[best as usize] {
                best = t;
            }
        }
        best
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "audio" => Ok(DataType::Audio),
            "text" => Ok(DataType::Text),
            "video" => Ok(DataType::Video),
            _ => Err(()),
        }
    }
}

/// A graph invariant that does not hold. `code` is stable and names the
/// invariant, e.g. `one-CM-per-session`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invariant `{code}` violated: {detail}")]
pub struct InvariantError {
    pub code: &'static str,
    pub detail: String,
}

impl InvariantError {
    pub(crate) fn new(code: &'static str, detail: impl Into<String>) -> Self {
        InvariantError {
            code,
            detail: detail.into(),
        }
    }
}
