//! Scenario files: the initial mission, a list of phase-tagged events and
//! engine settings, encoded as JSON.
//!
//! ```json
//! {
//!   "version": 1,
//!   "initial_phase": "phase1",
//!   "config": { "e_min": 60, "policy": "distance" },
//!   "actors": [ { "id": "sup", "role": "supervisor", "ip": "10.193.255.1",
//!                 "energy": 86, "ssid": "control", "group": "team1" } ],
//!   "links": [ ["10.193.255.1", "10.193.255.100"] ],
//!   "events": [ { "phase": "phase2",
//!                 "event": { "kind": "energy_changed", "ip": "10.193.255.143", "energy": 50 } } ]
//! }
//! ```
//!
//! Unknown fields are rejected everywhere.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapt::{EngineConfig, EventKind, MissionEvent};
use crate::model::{
    Actor, ApplicationModel, Device, Group, InvestigatorKind, Role, SignalLink, Violation,
};
use crate::select::PolicyKind;

pub const FORMAT_VERSION: u32 = 1;

/// The five-actor mission with its three phases, as shipped.
pub const ROSACE: &str = include_str!("../fixtures/rosace.scenario");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleName {
    Supervisor,
    FiremanCoordinator,
    RobotCoordinator,
    Investigator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorRecord {
    pub id: String,
    pub role: RoleName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub investigator_kind: Option<InvestigatorKind>,
    pub ip: String,
    pub energy: u32,
    pub ssid: String,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventSpec {
    EnergyChanged {
        ip: String,
        energy: u32,
    },
    ActorArrived {
        actor: ActorRecord,
        #[serde(default)]
        links: Vec<String>,
    },
    ActorDeparted {
        actor: String,
    },
    RoleChanged {
        actor: String,
        role: RoleName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        investigator_kind: Option<InvestigatorKind>,
    },
    LinkChanged {
        a: String,
        b: String,
        up: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub phase: String,
    pub event: EventSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_min: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_phase: Option<String>,
    #[serde(default)]
    pub config: ConfigRecord,
    pub actors: Vec<ActorRecord>,
    #[serde(default)]
    pub links: Vec<[String; 2]>,
    #[serde(default)]
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported scenario version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("invalid scenario: {code} ({subject})")]
    Validation { code: &'static str, subject: String },
}

impl ScenarioError {
    fn violation(v: Violation) -> Self {
        ScenarioError::Validation {
            code: v.code,
            subject: v.subject,
        }
    }

    /// Stable code of a validation failure.
    pub fn code(&self) -> Option<&'static str> {
        match self {
            ScenarioError::Validation { code, .. } => Some(code),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub initial_phase: String,
    pub model: ApplicationModel,
    pub events: Vec<MissionEvent>,
    pub config: ConfigRecord,
}

impl Scenario {
    /// Engine settings from the file, defaults elsewhere.
    pub fn engine_config(&self) -> EngineConfig {
        let mut config = EngineConfig::default();
        if let Some(e_min) = self.config.e_min {
            config.e_min = e_min;
        }
        if let Some(policy) = self.config.policy {
            config.policy = policy;
        }
        config
    }

    /// Phase labels in order, initial phase first. Each event phase is one
    /// contiguous run of events.
    pub fn phases(&self) -> Vec<String> {
        let mut out = vec![self.initial_phase.clone()];
        for e in &self.events {
            if !out.contains(&e.label) {
                out.push(e.label.clone());
            }
        }
        out
    }
}

pub fn rosace() -> Result<Scenario, ScenarioError> {
    parse_scenario(ROSACE)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_file(file)
}

fn role(
    record_role: RoleName,
    kind: Option<InvestigatorKind>,
    who: &str,
) -> Result<Role, ScenarioError> {
    match (record_role, kind) {
        (RoleName::Investigator, Some(k)) => Ok(Role::Investigator(k)),
        (RoleName::Supervisor, None) => Ok(Role::Supervisor),
        (RoleName::FiremanCoordinator, None) => Ok(Role::FiremanCoordinator),
        (RoleName::RobotCoordinator, None) => Ok(Role::RobotCoordinator),
        _ => Err(ScenarioError::Validation {
            code: "investigator-kind",
            subject: who.to_owned(),
        }),
    }
}

fn check_energy(energy: u32, subject: &str) -> Result<(), ScenarioError> {
    if energy > crate::model::MAX_ENERGY {
        return Err(ScenarioError::Validation {
            code: "energy-range",
            subject: subject.to_owned(),
        });
    }
    Ok(())
}

pub fn from_file(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    if file.version != FORMAT_VERSION {
        return Err(ScenarioError::Version(file.version));
    }
    let mut model = ApplicationModel::new();
    for a in &file.actors {
        let role = role(a.role, a.investigator_kind, &a.id)?;
        if model.actors.contains_key(&a.id) {
            return Err(ScenarioError::Validation {
                code: "duplicate-id",
                subject: a.id.clone(),
            });
        }
        if model.devices.contains_key(&a.ip) {
            return Err(ScenarioError::Validation {
                code: "duplicate-id",
                subject: a.ip.clone(),
            });
        }
        model
            .devices
            .insert(a.ip.clone(), Device::new(&a.ip, a.energy, &a.ssid));
        model.actors.insert(
            a.id.clone(),
            Actor {
                id: a.id.clone(),
                role,
                device: a.ip.clone(),
                group: a.group.clone(),
            },
        );
        model
            .groups
            .entry(a.group.clone())
            .or_insert_with(|| Group {
                id: a.group.clone(),
                members: BTreeSet::new(),
            })
            .members
            .insert(a.id.clone());
    }
    for [a, b] in &file.links {
        model.links.insert(SignalLink {
            a: a.clone(),
            b: b.clone(),
        });
        model.links.insert(SignalLink {
            a: b.clone(),
            b: a.clone(),
        });
    }
    if let Some(v) = model.validate().into_iter().next() {
        return Err(ScenarioError::violation(v));
    }

    let initial_phase = file.initial_phase.unwrap_or_else(|| "initial".to_owned());
    let mut seen = vec![initial_phase.as_str()];
    for (i, record) in file.events.iter().enumerate() {
        let continues = i > 0 && file.events[i - 1].phase == record.phase;
        if !continues {
            if seen.contains(&record.phase.as_str()) {
                return Err(ScenarioError::Validation {
                    code: "phase-order",
                    subject: record.phase.clone(),
                });
            }
            seen.push(&record.phase);
        }
    }

    let mut events = Vec::with_capacity(file.events.len());
    for record in file.events {
        let kind = match record.event {
            EventSpec::EnergyChanged { ip, energy } => {
                check_energy(energy, &ip)?;
                EventKind::EnergyChanged { ip, energy }
            }
            EventSpec::ActorArrived { actor, links } => {
                check_energy(actor.energy, &actor.ip)?;
                EventKind::ActorArrived {
                    role: role(actor.role, actor.investigator_kind, &actor.id)?,
                    device: Device::new(&actor.ip, actor.energy, &actor.ssid),
                    actor_id: actor.id,
                    group: actor.group,
                    links,
                }
            }
            EventSpec::ActorDeparted { actor } => EventKind::ActorDeparted { actor_id: actor },
            EventSpec::RoleChanged {
                actor,
                role: r,
                investigator_kind,
            } => EventKind::RoleChanged {
                role: role(r, investigator_kind, &actor)?,
                actor_id: actor,
            },
            EventSpec::LinkChanged { a, b, up } => EventKind::LinkChanged { a, b, up },
        };
        events.push(MissionEvent {
            label: record.phase,
            kind,
        });
    }

    Ok(Scenario {
        initial_phase,
        model,
        events,
        config: file.config,
    })
}
