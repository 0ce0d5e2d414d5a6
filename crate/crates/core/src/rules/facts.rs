use std::collections::{BTreeMap, BTreeSet};

use super::{Predicate, RuleFamily};
use crate::model::{ApplicationModel, Role};

/// Entity naming. Each kind gets its own prefix so ids from different
/// namespaces (actor ids, ips, group ids) never collide in joins.
pub mod entity {
    pub fn node(actor: &str) -> String {
        format!("node:{actor}")
    }

    pub fn role(actor: &str) -> String {
        format!("role:{actor}")
    }

    pub fn device(ip: &str) -> String {
        format!("dev:{ip}")
    }

    pub fn group(id: &str) -> String {
        format!("group:{id}")
    }

    pub fn session(name: &str) -> String {
        format!("session:{name}")
    }

    pub fn actor_of_node(node: &str) -> Option<&str> {
        node.strip_prefix("node:")
    }

    pub fn session_name(session: &str) -> Option<&str> {
        session.strip_prefix("session:")
    }
}

/// Ground atoms indexed by predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactBase {
    by_predicate: BTreeMap<Predicate, BTreeSet<Vec<String>>>,
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Base facts for a model, including the session each hub owns.
    pub fn from_model(model: &ApplicationModel) -> Self {
        use Predicate::*;
        let mut fb = FactBase::new();
        for ip in model.devices.keys() {
            fb.insert(Device, [entity::device(ip)]);
        }
        for actor in model.actors.values() {
            let node = entity::node(&actor.id);
            let role = entity::role(&actor.id);
            fb.insert(Node, [node.clone()]);
            fb.insert(HasRole, [node.clone(), role.clone()]);
            fb.insert(HasHostingDevice, [node, entity::device(&actor.device)]);
            fb.insert(BelongsToGroup, [role.clone(), entity::group(&actor.group)]);
            let class = match actor.role {
                Role::Supervisor => Supervisor,
                Role::FiremanCoordinator => FiremanCoordinator,
                Role::RobotCoordinator => RobotCoordinator,
                Role::Investigator(_) => Investigator,
            };
            fb.insert(class, [role.clone()]);
            if let Some(family) = RuleFamily::hubbed_by(actor.role) {
                let session = entity::session(&family.session_name(&actor.id));
                fb.insert(family.session_predicate(), [role, session]);
            }
        }
        for a in model.devices.values() {
            for b in model.devices.values().filter(|b| b.ssid == a.ssid) {
                fb.insert(HasSameSsid, [entity::device(&a.ip), entity::device(&b.ip)]);
            }
        }
        for link in &model.links {
            fb.insert(
                HasSignalWith,
                [entity::device(&link.a), entity::device(&link.b)],
            );
            fb.insert(
                HasSignalWith,
                [entity::device(&link.b), entity::device(&link.a)],
            );
        }
        for group in model.groups.values() {
            for x in &group.members {
                for y in &group.members {
                    fb.insert(BelongsToSameGroup, [entity::role(x), entity::role(y)]);
                }
            }
        }
        fb
    }

    /// Returns true if the fact is new.
    pub fn insert<I: IntoIterator<Item = String>>(
        &mut self,
        predicate: Predicate,
        args: I,
    ) -> bool {
        self.by_predicate
            .entry(predicate)
            .or_default()
            .insert(args.into_iter().collect())
    }

    pub fn contains(&self, predicate: Predicate, args: &[&str]) -> bool {
        self.by_predicate.get(&predicate).is_some_and(|set| {
            set.iter()
                .any(|f| f.len() == args.len() && f.iter().zip(args).all(|(a, b)| a == b))
        })
    }

    pub fn facts(&self, predicate: Predicate) -> impl Iterator<Item = &[String]> {
        self.by_predicate
            .get(&predicate)
            .into_iter()
            .flatten()
            .map(Vec::as_slice)
    }

    pub fn count(&self, predicate: Predicate) -> usize {
        self.by_predicate.get(&predicate).map_or(0, BTreeSet::len)
    }

    pub fn len(&self) -> usize {
        self.by_predicate.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
