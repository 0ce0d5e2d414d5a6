//! Collaboration to middleware refinement.
//!
//! Senders become event producers and receivers event consumers on the same
//! device; each session gets one channel manager. The CM host is the only
//! free choice, so the candidate set is the cross product, over sessions, of
//! the devices taking part in that session.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{
    CollabKind, CollabVertex, CollaborationGraph, DataType, InvariantError, MiddlewareGraph,
    MwKind, MwVertex,
};
use crate::model::ApplicationModel;

pub const DEFAULT_MAX_CANDIDATES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("component `{component}` is hosted on unknown device `{ip}`")]
    UnresolvedDevice { component: String, ip: String },
    #[error("{count} candidates exceed the limit of {limit}")]
    TooManyCandidates { count: u128, limit: usize },
    #[error(transparent)]
    Invalid(#[from] InvariantError),
}

/// Every deployable middleware graph for one collaboration graph, ordered
/// lexicographically by the CM host of each session (sessions by name).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pub source: CollaborationGraph,
    pub candidates: Vec<MiddlewareGraph>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MiddlewareGraph> {
        self.candidates.iter()
    }
}

/// Sorted, deduplicated ips of the devices hosting a component of `session`.
pub fn cm_host_choices(session: &str, collab: &CollaborationGraph) -> Vec<String> {
    let mut ips: Vec<String> = collab.vertices_in(session).map(|v| v.ip.clone()).collect();
    ips.sort();
    ips.dedup();
    ips
}

/// The terminal a sender or receiver rewrites to.
pub fn realize(v: &CollabVertex) -> MwVertex {
    let (kind, prefix, tag) = match v.kind {
        CollabKind::Sender => (MwKind::EventProducer, "snd:", "ep:"),
        CollabKind::Receiver => (MwKind::EventConsumer, "rcv:", "ec:"),
    };
    let rest = v.id.strip_prefix(prefix).unwrap_or(&v.id);
    MwVertex {
        id: format!("{tag}{rest}"),
        kind,
        data_type: v.data_type,
        session: v.session.clone(),
        ip: v.ip.clone(),
    }
}

pub fn cm_id(session: &str) -> String {
    format!("cm:{session}")
}

pub fn refine(
    collab: &CollaborationGraph,
    model: &ApplicationModel,
) -> Result<CandidateSet, RefineError> {
    refine_with(collab, model, DEFAULT_MAX_CANDIDATES)
}

pub fn refine_with(
    collab: &CollaborationGraph,
    model: &ApplicationModel,
    max_candidates: usize,
) -> Result<CandidateSet, RefineError> {
    collab.validate()?;
    for v in collab.vertices.values() {
        if !model.devices.contains_key(&v.ip) {
            return Err(RefineError::UnresolvedDevice {
                component: v.id.clone(),
                ip: v.ip.clone(),
            });
        }
    }
    if collab.is_empty() {
        return Ok(CandidateSet {
            source: collab.clone(),
            candidates: Vec::new(),
        });
    }

    let fixed: Vec<MwVertex> = collab.vertices.values().map(realize).collect();
    let sessions: Vec<(String, Vec<String>, DataType)> = collab
        .session_names()
        .into_iter()
        .map(|s| {
            let choices = cm_host_choices(&s, collab);
            let dominant = DataType::dominant(
                collab
                    .flows
                    .values()
                    .filter(|f| f.session == s)
                    .map(|f| f.data_type),
            );
            (s, choices, dominant)
        })
        .collect();

    let count = sessions
        .iter()
        .try_fold(1u128, |acc, (_, c, _)| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if count > max_candidates as u128 {
        return Err(RefineError::TooManyCandidates {
            count,
            limit: max_candidates,
        });
    }

    let mut candidates = Vec::with_capacity(count as usize);
    let mut odometer = vec![0usize; sessions.len()];
    loop {
        let cms = sessions
            .iter()
            .zip(&odometer)
            .map(|((s, choices, dt), &i)| MwVertex {
                id: cm_id(s),
                kind: MwKind::ChannelManager,
                data_type: *dt,
                session: s.clone(),
                ip: choices[i].clone(),
            });
        candidates.push(MiddlewareGraph::from_vertices(
            fixed.iter().cloned().chain(cms),
        ));

        // last session turns fastest
        let mut pos = sessions.len();
        loop {
            if pos == 0 {
                return Ok(CandidateSet {
                    source: collab.clone(),
                    candidates,
                });
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < sessions[pos].1.len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// Per-candidate CM placement, handy for reports and tests.
pub fn placements(set: &CandidateSet) -> Vec<BTreeMap<String, String>> {
    set.candidates
        .iter()
        .map(MiddlewareGraph::cm_hosts)
        .collect()
}
