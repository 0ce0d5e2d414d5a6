use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{DataType, InvariantError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CollabKind {
    Sender,
    Receiver,
}

impl CollabKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CollabKind::Sender => "sender",
            CollabKind::Receiver => "receiver",
        }
    }
}

impl fmt::Display for CollabKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CollabKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sender" => Ok(CollabKind::Sender),
            "receiver" => Ok(CollabKind::Receiver),
            _ => Err(()),
        }
    }
}

/// Sender or receiver component of a session, hosted on a device.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CollabVertex {
    pub id: String,
    pub kind: CollabKind,
    pub ip: String,
    pub data_type: DataType,
    pub session: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    pub id: String,
    pub data_type: DataType,
    /// Sender component id.
    pub source: String,
    /// Receiver component id.
    pub destination: String,
    pub session: String,
}

/// A named set of flows. Derived from the flows' session labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub name: String,
    pub flows: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollaborationGraph {
    pub vertices: BTreeMap<String, CollabVertex>,
    pub flows: BTreeMap<String, Flow>,
}

impl CollaborationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.flows.is_empty()
    }

    pub fn add_vertex(&mut self, v: CollabVertex) {
        self.vertices.insert(v.id.clone(), v);
    }

    pub fn add_flow(&mut self, f: Flow) {
        self.flows.insert(f.id.clone(), f);
    }

    pub fn sessions(&self) -> BTreeMap<String, Session> {
        let mut out: BTreeMap<String, Session> = BTreeMap::new();
        for flow in self.flows.values() {
            out.entry(flow.session.clone())
                .or_insert_with(|| Session {
                    name: flow.session.clone(),
                    flows: BTreeSet::new(),
                })
                .flows
                .insert(flow.id.clone());
        }
        out
    }

    pub fn session_names(&self) -> BTreeSet<String> {
        self.flows
            .values()
            .map(|f| f.session.clone())
            .chain(self.vertices.values().map(|v| v.session.clone()))
            .collect()
    }

    pub fn vertices_in<'a>(&'a self, session: &'a str) -> impl Iterator<Item = &'a CollabVertex> {
        self.vertices.values().filter(move |v| v.session == session)
    }

    pub fn count(&self, kind: CollabKind) -> usize {
        self.vertices.values().filter(|v| v.kind == kind).count()
    }

    pub fn validate(&self) -> Result<(), InvariantError> {
        for (id, v) in &self.vertices {
            if v.id != *id {
                return Err(InvariantError::new("vertex-key", id.clone()));
            }
        }
        for (id, flow) in &self.flows {
            if flow.id != *id {
                return Err(InvariantError::new("flow-key", id.clone()));
            }
            if flow.source == flow.destination {
                return Err(InvariantError::new("flow-self-loop", id.clone()));
            }
            let src = self
                .vertices
                .get(&flow.source)
                .ok_or_else(|| InvariantError::new("dangling-flow", id.clone()))?;
            let dst = self
                .vertices
                .get(&flow.destination)
                .ok_or_else(|| InvariantError::new("dangling-flow", id.clone()))?;
            if src.kind != CollabKind::Sender || dst.kind != CollabKind::Receiver {
                return Err(InvariantError::new("flow-direction", id.clone()));
            }
            if src.session != flow.session || dst.session != flow.session {
                return Err(InvariantError::new("session-partition", id.clone()));
            }
        }
        Ok(())
    }
}
