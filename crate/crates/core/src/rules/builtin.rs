use super::Predicate::{self, *};
use super::{atom, Atom, Rule};
use crate::model::Role;

/// Groups rules by the kind of session they populate. Each hub actor (a
/// coordinator or the supervisor) owns one session per family it heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleFamily {
    /// Fireman coordinator with its investigators.
    FiremanCoordInv,
    /// Robot coordinator with its investigators.
    RobotCoordInv,
    /// Supervisor with the coordinators.
    SupervisorCoord,
}

impl RuleFamily {
    pub fn hubbed_by(role: Role) -> Option<RuleFamily> {
        match role {
            Role::FiremanCoordinator => Some(RuleFamily::FiremanCoordInv),
            Role::RobotCoordinator => Some(RuleFamily::RobotCoordInv),
            Role::Supervisor => Some(RuleFamily::SupervisorCoord),
            Role::Investigator(_) => None,
        }
    }

    /// `Firecoor` heading investigators owns `Firecoor_inv_session`; `sup`
    /// heading coordinators owns `sup_coor_session`.
    pub fn session_name(self, hub_actor: &str) -> String {
        match self {
            RuleFamily::FiremanCoordInv | RuleFamily::RobotCoordInv => {
                format!("{hub_actor}_inv_session")
            }
            RuleFamily::SupervisorCoord => format!("{hub_actor}_coor_session"),
        }
    }

    pub fn session_predicate(self) -> Predicate {
        match self {
            RuleFamily::FiremanCoordInv => HasFiremanCordInvSession,
            RuleFamily::RobotCoordInv => HasRobotCordInvSession,
            RuleFamily::SupervisorCoord => HasSupCoordSession,
        }
    }
}

/// Two audio flows, hub to peer and peer to hub, in the hub's session.
fn audio_pair(hub_node: &str, peer_node: &str) -> Vec<Atom> {
    vec![
        atom(AudioFlow, ["?af1"]),
        atom(HasSource, ["?af1", hub_node]),
        atom(HasDestination, ["?af1", peer_node]),
        atom(BelongsToSession, ["?af1", "?s"]),
        atom(AudioFlow, ["?af2"]),
        atom(HasSource, ["?af2", peer_node]),
        atom(HasDestination, ["?af2", hub_node]),
        atom(BelongsToSession, ["?af2", "?s"]),
    ]
}

/// Coordinator with a reachable investigator on the same network and team.
fn coordinator_investigator(id: &str, coordinator: Predicate, session: Predicate) -> Rule {
    Rule {
        id: id.to_owned(),
        body: vec![
            atom(Investigator, ["?inv"]),
            atom(Node, ["?ninv"]),
            atom(Device, ["?dinv"]),
            atom(HasRole, ["?ninv", "?inv"]),
            atom(HasHostingDevice, ["?ninv", "?dinv"]),
            atom(coordinator, ["?coo"]),
            atom(Node, ["?ncoo"]),
            atom(HasRole, ["?ncoo", "?coo"]),
            atom(Device, ["?dcoo"]),
            atom(HasHostingDevice, ["?ncoo", "?dcoo"]),
            atom(HasSameSsid, ["?dinv", "?dcoo"]),
            atom(HasSignalWith, ["?dinv", "?dcoo"]),
            atom(BelongsToSameGroup, ["?inv", "?coo"]),
            atom(DifferentFrom, ["?inv", "?coo"]),
            atom(BelongsToGroup, ["?coo", "?t"]),
            atom(session, ["?coo", "?s"]),
        ],
        creates: vec!["af1".into(), "af2".into()],
        head: audio_pair("?ncoo", "?ninv"),
    }
}

/// Supervisor with a coordinator of its team. The supervisor and
/// coordinators sit on interconnected routers, so no radio facts are needed.
fn supervisor_coordinator(id: &str, coordinator: Predicate) -> Rule {
    Rule {
        id: id.to_owned(),
        body: vec![
            atom(Supervisor, ["?sup"]),
            atom(Node, ["?nsup"]),
            atom(HasRole, ["?nsup", "?sup"]),
            atom(coordinator, ["?coo"]),
            atom(Node, ["?ncoo"]),
            atom(HasRole, ["?ncoo", "?coo"]),
            atom(BelongsToSameGroup, ["?coo", "?sup"]),
            atom(DifferentFrom, ["?coo", "?sup"]),
            atom(HasSupCoordSession, ["?sup", "?s"]),
        ],
        creates: vec!["af1".into(), "af2".into()],
        head: audio_pair("?nsup", "?ncoo"),
    }
}

pub const FIREMAN_COORDINATOR_INVESTIGATOR: &str = "fireman-coordinator-investigator";
pub const ROBOT_COORDINATOR_INVESTIGATOR: &str = "robot-coordinator-investigator";
pub const SUPERVISOR_FIREMAN_COORDINATOR: &str = "supervisor-fireman-coordinator";
pub const SUPERVISOR_ROBOT_COORDINATOR: &str = "supervisor-robot-coordinator";

/// The built-in rule set: coordinator-investigator rules for both teams and
/// the supervisor-coordinator rules.
pub fn builtin_rules() -> Vec<Rule> {
    vec![
        coordinator_investigator(
            FIREMAN_COORDINATOR_INVESTIGATOR,
            FiremanCoordinator,
            HasFiremanCordInvSession,
        ),
        coordinator_investigator(
            ROBOT_COORDINATOR_INVESTIGATOR,
            RobotCoordinator,
            HasRobotCordInvSession,
        ),
        supervisor_coordinator(SUPERVISOR_FIREMAN_COORDINATOR, FiremanCoordinator),
        supervisor_coordinator(SUPERVISOR_ROBOT_COORDINATOR, RobotCoordinator),
    ]
}
