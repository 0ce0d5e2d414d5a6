use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{DataType, InvariantError};

/// Event-based communication entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MwKind {
    /// Event producer (EP), realises a sender.
    EventProducer,
    /// Event consumer (EC), realises a receiver.
    EventConsumer,
    /// Channel manager (CM), the per-session broker.
    ChannelManager,
}

impl MwKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MwKind::EventProducer => "EP",
            MwKind::EventConsumer => "EC",
            MwKind::ChannelManager => "CM",
        }
    }
}

impl fmt::Display for MwKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MwKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EP" => Ok(MwKind::EventProducer),
            "EC" => Ok(MwKind::EventConsumer),
            "CM" => Ok(MwKind::ChannelManager),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MwVertex {
    pub id: String,
    pub kind: MwKind,
    /// For a CM, the session's dominant type.
    pub data_type: DataType,
    pub session: String,
    /// Hosting device.
    pub ip: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    Push,
    Pull,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Push => "push",
            LinkKind::Pull => "pull",
        }
    }
}

impl FromStr for LinkKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "push" => Ok(LinkKind::Push),
            "pull" => Ok(LinkKind::Pull),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MwEdge {
    pub from: String,
    pub to: String,
    pub kind: LinkKind,
}

impl MwEdge {
    pub fn id(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MiddlewareGraph {
    pub vertices: BTreeMap<String, MwVertex>,
    pub edges: BTreeSet<MwEdge>,
}

impl MiddlewareGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the graph and wires it: every EP pushes to its session's CM and
    /// every EC pulls from it.
    pub fn from_vertices<I: IntoIterator<Item = MwVertex>>(vertices: I) -> Self {
        let vertices: BTreeMap<String, MwVertex> =
            vertices.into_iter().map(|v| (v.id.clone(), v)).collect();
        let mut managers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for v in vertices
            .values()
            .filter(|v| v.kind == MwKind::ChannelManager)
        {
            managers
                .entry(v.session.as_str())
                .or_default()
                .push(v.id.as_str());
        }
        let mut edges = BTreeSet::new();
        for v in vertices.values() {
            let Some(cms) = managers.get(v.session.as_str()) else {
                continue;
            };
            for cm in cms {
                match v.kind {
                    MwKind::EventProducer => {
                        edges.insert(MwEdge {
                            from: v.id.clone(),
                            to: (*cm).to_owned(),
                            kind: LinkKind::Push,
                        });
                    }
                    MwKind::EventConsumer => {
                        edges.insert(MwEdge {
                            from: (*cm).to_owned(),
                            to: v.id.clone(),
                            kind: LinkKind::Pull,
                        });
                    }
                    MwKind::ChannelManager => {}
                }
            }
        }
        MiddlewareGraph { vertices, edges }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn count(&self, kind: MwKind) -> usize {
        self.vertices.values().filter(|v| v.kind == kind).count()
    }

    pub fn channel_managers(&self) -> impl Iterator<Item = &MwVertex> {
        self.vertices
            .values()
            .filter(|v| v.kind == MwKind::ChannelManager)
    }

    /// Session name to CM host ip.
    pub fn cm_hosts(&self) -> BTreeMap<String, String> {
        self.channel_managers()
            .map(|v| (v.session.clone(), v.ip.clone()))
            .collect()
    }

    /// Distinct devices hosting at least one component.
    pub fn hosts(&self) -> BTreeSet<&str> {
        self.vertices.values().map(|v| v.ip.as_str()).collect()
    }

    pub fn validate(&self) -> Result<(), InvariantError> {
        let mut cm_of: BTreeMap<&str, &str> = BTreeMap::new();
        for (id, v) in &self.vertices {
            if v.id != *id {
                return Err(InvariantError::new("vertex-key", id.clone()));
            }
            if v.kind == MwKind::ChannelManager && cm_of.insert(&v.session, &v.id).is_some() {
                return Err(InvariantError::new("one-CM-per-session", v.session.clone()));
            }
        }
        for v in self.vertices.values() {
            if v.kind != MwKind::ChannelManager && !cm_of.contains_key(v.session.as_str()) {
                return Err(InvariantError::new("one-CM-per-session", v.session.clone()));
            }
        }
        for edge in &self.edges {
            let (Some(from), Some(to)) =
                (self.vertices.get(&edge.from), self.vertices.get(&edge.to))
            else {
                return Err(InvariantError::new("dangling-edge", edge.id()));
            };
            let ok = match edge.kind {
                LinkKind::Push => {
                    from.kind == MwKind::EventProducer && to.kind == MwKind::ChannelManager
                }
                LinkKind::Pull => {
                    from.kind == MwKind::ChannelManager && to.kind == MwKind::EventConsumer
                }
            };
            if !ok {
                return Err(InvariantError::new("edge-kind", edge.id()));
            }
            if from.session != to.session {
                return Err(InvariantError::new("edge-session", edge.id()));
            }
        }
        for v in self.vertices.values() {
            let cm = cm_of.get(v.session.as_str()).copied().unwrap_or_default();
            let wired = match v.kind {
                MwKind::EventProducer => self.edges.contains(&MwEdge {
                    from: v.id.clone(),
                    to: cm.to_owned(),
                    kind: LinkKind::Push,
                }),
                MwKind::EventConsumer => self.edges.contains(&MwEdge {
                    from: cm.to_owned(),
                    to: v.id.clone(),
                    kind: LinkKind::Pull,
                }),
                MwKind::ChannelManager => true,
            };
            if !wired {
                let code = if v.kind == MwKind::EventProducer {
                    "ep-push-edge"
                } else {
                    "ec-pull-edge"
                };
                return Err(InvariantError::new(code, v.id.clone()));
            }
        }
        Ok(())
    }
}
