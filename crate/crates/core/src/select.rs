//! Choosing one deployment among the candidates.
//!
//! Candidates are scored against the resource context; infeasible ones score
//! −1. Among the best-scoring, the policy breaks ties (most spread-out, or
//! cheapest to migrate to from the current deployment), and whatever tie is
//! left goes to the first candidate in enumeration order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{diff, MiddlewareGraph};
use crate::model::ApplicationModel;
use crate::refine::CandidateSet;

/// Minimum energy of a device allowed to host a channel manager.
pub const DEFAULT_E_MIN: u32 = 60;

/// Resource attributes per device ip. Only energy is populated for now.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextSnapshot {
    pub energy: BTreeMap<String, u32>,
    pub bandwidth: BTreeMap<String, u64>,
    pub memory: BTreeMap<String, u64>,
}

impl ContextSnapshot {
    pub fn from_model(model: &ApplicationModel) -> Self {
        ContextSnapshot {
            energy: model
                .devices
                .values()
                .map(|d| (d.ip.clone(), d.energy))
                .collect(),
            ..Default::default()
        }
    }
}

/// Fitness of a candidate in a context; −1 means it cannot be deployed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Score(i64);

impl Score {
    pub const INFEASIBLE: Score = Score(-1);

    pub fn new(value: u32) -> Self {
        Score(i64::from(value))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_feasible(self) -> bool {
        self.0 >= 0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Dispersion,
    #[default]
    Distance,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Dispersion => "dispersion",
            PolicyKind::Distance => "distance",
        })
    }
}

/// Tie-break among equally scored candidates.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    /// Prefer deployments spread over more devices.
    Dispersion,
    /// Prefer the smallest migration from `current`.
    Distance { current: &'a MiddlewareGraph },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("no energy reading for device `{0}`")]
    MissingContext(String),
    #[error("no candidate fits the current context")]
    NoFeasibleCandidate,
    #[error("candidate set is empty")]
    EmptyCandidateSet,
}

/// −1 when a CM host is below `e_min` or a device hosts two CMs, otherwise
/// the lowest CM-host energy (100 with no CM at all).
pub fn context_adaptation(
    candidate: &MiddlewareGraph,
    context: &ContextSnapshot,
    e_min: u32,
) -> Result<Score, SelectError> {
    for ip in candidate.hosts() {
        if !context.energy.contains_key(ip) {
            return Err(SelectError::MissingContext(ip.to_owned()));
        }
    }
    let mut cm_hosts = BTreeSet::new();
    let mut worst = 100u32;
    for cm in candidate.channel_managers() {
        if !cm_hosts.insert(cm.ip.as_str()) {
            return Ok(Score::INFEASIBLE);
        }
        let energy = context.energy[&cm.ip];
        if energy < e_min {
            return Ok(Score::INFEASIBLE);
        }
        worst = worst.min(energy);
    }
    Ok(Score::new(worst))
}

/// Number of distinct devices hosting at least one component.
pub fn dispersion(candidate: &MiddlewareGraph) -> usize {
    candidate.hosts().len()
}

/// Components added, removed or moved to go from `current` to `candidate`.
pub fn relative_cost(current: &MiddlewareGraph, candidate: &MiddlewareGraph) -> usize {
    diff(current, candidate).len()
}

#[derive(Debug, Clone, Copy)]
pub struct Selection<'a> {
    /// Position in the candidate set.
    pub index: usize,
    pub graph: &'a MiddlewareGraph,
    pub score: Score,
}

pub fn select<'a>(
    candidates: &'a CandidateSet,
    context: &ContextSnapshot,
    policy: Policy<'_>,
    e_min: u32,
) -> Result<Selection<'a>, SelectError> {
    if candidates.is_empty() {
        return Err(SelectError::EmptyCandidateSet);
    }
    let scores = candidates
        .iter()
        .map(|c| context_adaptation(c, context, e_min))
        .collect::<Result<Vec<_>, _>>()?;
    let best = scores.iter().copied().max().expect("non-empty");
    if !best.is_feasible() {
        return Err(SelectError::NoFeasibleCandidate);
    }
    let top: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();

    let chosen = if top.len() == 1 {
        top[0]
    } else {
        // min_by_key and max_by_key disagree on which tie they return; keep
        // the first in enumeration order either way.
        let keyed: Vec<(usize, i64)> = match policy {
            Policy::Dispersion => top
                .iter()
                .map(|&i| (i, -(dispersion(&candidates.candidates[i]) as i64)))
                .collect(),
            Policy::Distance { current } => top
                .iter()
                .map(|&i| (i, relative_cost(current, &candidates.candidates[i]) as i64))
                .collect(),
        };
        keyed
            .iter()
            .min_by_key(|(i, k)| (*k, *i))
            .expect("non-empty")
            .0
    };
    Ok(Selection {
        index: chosen,
        graph: &candidates.candidates[chosen],
        score: best,
    })
}
