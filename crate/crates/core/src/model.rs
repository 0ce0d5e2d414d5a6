//! Mission fact base: actors, their roles and devices, groups and radio links.
//!
//! Every operation takes `&self` and returns a fresh [`ApplicationModel`], so a
//! model value can be handed to other threads or kept as a snapshot while the
//! engine moves on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound of the energy percentage.
pub const MAX_ENERGY: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvestigatorKind {
    Fireman,
    Robot,
}

/// Mission role. Investigators carry their kind, so a kind without the
/// investigator role cannot be expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Supervisor,
    FiremanCoordinator,
    RobotCoordinator,
    Investigator(InvestigatorKind),
}

impl Role {
    pub fn is_coordinator(self) -> bool {
        matches!(self, Role::FiremanCoordinator | Role::RobotCoordinator)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Supervisor => f.write_str("supervisor"),
            Role::FiremanCoordinator => f.write_str("fireman coordinator"),
            Role::RobotCoordinator => f.write_str("robot coordinator"),
            Role::Investigator(InvestigatorKind::Fireman) => f.write_str("fireman investigator"),
            Role::Investigator(InvestigatorKind::Robot) => f.write_str("robot investigator"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Device {
    pub ip: String,
    /// Remaining battery, percent.
    pub energy: u32,
    pub ssid: String,
}

impl Device {
    pub fn new(ip: impl Into<String>, energy: u32, ssid: impl Into<String>) -> Self {
        Device {
            ip: ip.into(),
            energy,
            ssid: ssid.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Actor {
    pub id: String,
    pub role: Role,
    /// Ip of the hosting device.
    pub device: String,
    pub group: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Group {
    pub id: String,
    pub members: BTreeSet<String>,
}

/// Directed half of a radio link. The model stores both halves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignalLink {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error("unknown actor `{0}`")]
    UnknownActor(String),
    #[error("energy {0} is outside 0..=100")]
    OutOfRange(u32),
    #[error("a device cannot link to itself (`{0}`)")]
    SelfLink(String),
}

/// One broken invariant, reported by [`ApplicationModel::validate`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    /// Stable machine-readable code, e.g. `energy-range`.
    pub code: &'static str,
    pub subject: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.subject)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApplicationModel {
    pub actors: BTreeMap<String, Actor>,
    /// Keyed by ip.
    pub devices: BTreeMap<String, Device>,
    pub groups: BTreeMap<String, Group>,
    pub links: BTreeSet<SignalLink>,
}

impl ApplicationModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an actor hosted on a new device, creating the group if needed.
    pub fn add_actor(
        &self,
        id: &str,
        role: Role,
        device: Device,
        group_id: &str,
    ) -> Result<Self, ModelError> {
        self.insert_actor(id, role, device, group_id, true)
    }

    /// Like [`add_actor`](Self::add_actor) but refuses to create the group.
    pub fn add_actor_to_existing_group(
        &self,
        id: &str,
        role: Role,
        device: Device,
        group_id: &str,
    ) -> Result<Self, ModelError> {
        self.insert_actor(id, role, device, group_id, false)
    }

    fn insert_actor(
        &self,
        id: &str,
        role: Role,
        device: Device,
        group_id: &str,
        create_group: bool,
    ) -> Result<Self, ModelError> {
        if self.actors.contains_key(id) {
            return Err(ModelError::DuplicateId(id.to_owned()));
        }
        if self.devices.contains_key(&device.ip) {
            return Err(ModelError::DuplicateId(device.ip));
        }
        if !create_group && !self.groups.contains_key(group_id) {
            return Err(ModelError::UnknownGroup(group_id.to_owned()));
        }
        if device.energy > MAX_ENERGY {
            return Err(ModelError::OutOfRange(device.energy));
        }
        let mut next = self.clone();
        let group = next
            .groups
            .entry(group_id.to_owned())
            .or_insert_with(|| Group {
                id: group_id.to_owned(),
                members: BTreeSet::new(),
            });
        group.members.insert(id.to_owned());
        next.actors.insert(
            id.to_owned(),
            Actor {
                id: id.to_owned(),
                role,
                device: device.ip.clone(),
                group: group_id.to_owned(),
            },
        );
        next.devices.insert(device.ip.clone(), device);
        Ok(next)
    }

    pub fn set_energy(&self, ip: &str, energy: u32) -> Result<Self, ModelError> {
        if !self.devices.contains_key(ip) {
            return Err(ModelError::UnknownDevice(ip.to_owned()));
        }
        if energy > MAX_ENERGY {
            return Err(ModelError::OutOfRange(energy));
        }
        let mut next = self.clone();
        next.devices.get_mut(ip).expect("checked above").energy = energy;
        Ok(next)
    }

    /// Removes the actor, its device when no other actor uses it, the links of
    /// that device and the group if it becomes empty.
    pub fn remove_actor(&self, actor_id: &str) -> Result<Self, ModelError> {
        let actor = self
            .actors
            .get(actor_id)
            .ok_or_else(|| ModelError::UnknownActor(actor_id.to_owned()))?;
        let mut next = self.clone();
        next.actors.remove(actor_id);
        if let Some(group) = next.groups.get_mut(&actor.group) {
            group.members.remove(actor_id);
            if group.members.is_empty() {
                next.groups.remove(&actor.group);
            }
        }
        let shared = next
            .actors
            .values()
            .any(|other| other.device == actor.device);
        if !shared {
            next.devices.remove(&actor.device);
            next.links
                .retain(|l| l.a != actor.device && l.b != actor.device);
        }
        Ok(next)
    }

    pub fn set_role(&self, actor_id: &str, role: Role) -> Result<Self, ModelError> {
        if !self.actors.contains_key(actor_id) {
            return Err(ModelError::UnknownActor(actor_id.to_owned()));
        }
        let mut next = self.clone();
        next.actors.get_mut(actor_id).expect("checked above").role = role;
        Ok(next)
    }

    /// Adds a symmetric radio link between two known devices. Linking an
    /// already linked pair is a no-op.
    pub fn connect(&self, a: &str, b: &str) -> Result<Self, ModelError> {
        self.check_link_ends(a, b)?;
        let mut next = self.clone();
        next.links.insert(SignalLink {
            a: a.to_owned(),
            b: b.to_owned(),
        });
        next.links.insert(SignalLink {
            a: b.to_owned(),
            b: a.to_owned(),
        });
        Ok(next)
    }

    pub fn disconnect(&self, a: &str, b: &str) -> Result<Self, ModelError> {
        self.check_link_ends(a, b)?;
        let mut next = self.clone();
        next.links.remove(&SignalLink {
            a: a.to_owned(),
            b: b.to_owned(),
        });
        next.links.remove(&SignalLink {
            a: b.to_owned(),
            b: a.to_owned(),
        });
        Ok(next)
    }

    fn check_link_ends(&self, a: &str, b: &str) -> Result<(), ModelError> {
        for ip in [a, b] {
            if !self.devices.contains_key(ip) {
                return Err(ModelError::UnknownDevice(ip.to_owned()));
            }
        }
        if a == b {
            return Err(ModelError::SelfLink(a.to_owned()));
        }
        Ok(())
    }

    pub fn has_signal_with(&self, a: &str, b: &str) -> bool {
        self.links.contains(&SignalLink {
            a: a.to_owned(),
            b: b.to_owned(),
        }) || self.links.contains(&SignalLink {
            a: b.to_owned(),
            b: a.to_owned(),
        })
    }

    /// Derived from the devices' ssid, never stored.
    pub fn has_same_ssid(&self, a: &str, b: &str) -> bool {
        match (self.devices.get(a), self.devices.get(b)) {
            (Some(da), Some(db)) => da.ssid == db.ssid,
            _ => false,
        }
    }

    pub fn device_of(&self, actor_id: &str) -> Option<&Device> {
        self.actors
            .get(actor_id)
            .and_then(|a| self.devices.get(&a.device))
    }

    /// Empty iff every invariant holds. Violations come back sorted.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |code: &'static str, subject: String| out.push(Violation { code, subject });

        for (ip, device) in &self.devices {
            if device.ip != *ip {
                push("device-key", ip.clone());
            }
            if device.energy > MAX_ENERGY {
                push("energy-range", ip.clone());
            }
        }
        for (id, actor) in &self.actors {
            if actor.id != *id {
                push("actor-key", id.clone());
            }
            if !self.devices.contains_key(&actor.device) {
                push("dangling-device", id.clone());
            }
            match self.groups.get(&actor.group) {
                None => push("dangling-group", id.clone()),
                Some(g) if !g.members.contains(id) => push("group-membership", id.clone()),
                Some(_) => {}
            }
        }
        for (gid, group) in &self.groups {
            for member in &group.members {
                let belongs = self.actors.get(member).is_some_and(|a| a.group == *gid);
                if !belongs {
                    push("group-membership", format!("{gid}/{member}"));
                }
            }
        }
        for link in &self.links {
            let subject = format!("{}<->{}", link.a, link.b);
            if link.a == link.b {
                push("self-link", subject);
                continue;
            }
            if !self.devices.contains_key(&link.a) || !self.devices.contains_key(&link.b) {
                push("dangling-link", subject);
                continue;
            }
            let reverse = SignalLink {
                a: link.b.clone(),
                b: link.a.clone(),
            };
            // report each broken pair once, from its stored half
            if !self.links.contains(&reverse) {
                push("asymmetric-link", subject);
            }
        }
        out.sort();
        out
    }
}
