use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{MiddlewareGraph, MwVertex};

/// A component that stays but changes host.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Move {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// Component-level difference between a deployed graph and the next one.
/// Components are identified by logical id, so a host change is a move.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MigrationPlan {
    pub added: Vec<MwVertex>,
    pub removed: Vec<MwVertex>,
    pub moved: Vec<Move>,
}

impl MigrationPlan {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.moved.is_empty()
    }

    /// Number of component operations; the relative cost between two graphs.
    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len() + self.moved.len()
    }

    pub fn summary(&self) -> String {
        if self.is_empty() {
            return "no change".to_owned();
        }
        let mut parts = Vec::new();
        if !self.added.is_empty() {
            parts.push(format!("+{}", kind_counts(&self.added)));
        }
        if !self.removed.is_empty() {
            parts.push(format!("-{}", kind_counts(&self.removed)));
        }
        for m in &self.moved {
            parts.push(format!("move {} {}->{}", m.id, m.from, m.to));
        }
        parts.join("; ")
    }
}

fn kind_counts(vs: &[MwVertex]) -> String {
    use super::MwKind::*;
    let mut out = Vec::new();
    for kind in [ChannelManager, EventProducer, EventConsumer] {
        let n = vs.iter().filter(|v| v.kind == kind).count();
        if n > 0 {
            out.push(format!("{n} {kind}"));
        }
    }
    out.join(" ")
}

impl fmt::Display for MigrationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("plan does not match graph: {0}")]
    PlanMismatch(String),
}

/// Lists what must be added, removed and moved to turn `current` into `next`.
pub fn diff(current: &MiddlewareGraph, next: &MiddlewareGraph) -> MigrationPlan {
    let mut plan = MigrationPlan::default();
    for (id, old) in &current.vertices {
        match next.vertices.get(id) {
            None => plan.removed.push(old.clone()),
            Some(new) if same_but_host(old, new) => {
                if old.ip != new.ip {
                    plan.moved.push(Move {
                        id: id.clone(),
                        from: old.ip.clone(),
                        to: new.ip.clone(),
                    });
                }
            }
            Some(new) => {
                plan.removed.push(old.clone());
                plan.added.push(new.clone());
            }
        }
    }
    for (id, new) in &next.vertices {
        if !current.vertices.contains_key(id) {
            plan.added.push(new.clone());
        }
    }
    plan.added.sort_by(|a, b| a.id.cmp(&b.id));
    plan
}

fn same_but_host(a: &MwVertex, b: &MwVertex) -> bool {
    a.kind == b.kind && a.data_type == b.data_type && a.session == b.session
}

/// Executes a plan against the graph it was computed from. Edges are
/// re-derived from the resulting components.
pub fn apply(plan: &MigrationPlan, graph: &MiddlewareGraph) -> Result<MiddlewareGraph, PlanError> {
    let mut vertices = graph.vertices.clone();
    for gone in &plan.removed {
        if vertices.remove(&gone.id).is_none() {
            return Err(PlanError::PlanMismatch(format!(
                "cannot remove unknown `{}`",
                gone.id
            )));
        }
    }
    for m in &plan.moved {
        let v = vertices
            .get_mut(&m.id)
            .ok_or_else(|| PlanError::PlanMismatch(format!("cannot move unknown `{}`", m.id)))?;
        if v.ip != m.from {
            return Err(PlanError::PlanMismatch(format!(
                "`{}` is on {}, not {}",
                m.id, v.ip, m.from
            )));
        }
        v.ip = m.to.clone();
    }
    for new in &plan.added {
        if vertices.insert(new.id.clone(), new.clone()).is_some() {
            return Err(PlanError::PlanMismatch(format!(
                "`{}` already present",
                new.id
            )));
        }
    }
    Ok(MiddlewareGraph::from_vertices(vertices.into_values()))
}
