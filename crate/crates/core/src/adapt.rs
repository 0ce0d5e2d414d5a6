//! Event-driven reconfiguration.
//!
//! Each mission event is applied to the model, then resolved at the lowest
//! level that can absorb it: re-selection over the current candidates
//! (middleware), or re-refinement, with re-inference when the actors or
//! their links changed (collaboration). If neither finds a feasible
//! deployment the engine degrades and keeps the last one.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;
use tracing::info;

use crate::graph::{diff, CollaborationGraph, MiddlewareGraph, MigrationPlan};
use crate::model::{ApplicationModel, Device, ModelError, Role};
use crate::refine::{refine_with, CandidateSet, RefineError, DEFAULT_MAX_CANDIDATES};
use crate::rules::{builtin_rules, infer_collaboration_with, Rule, RuleError, DEFAULT_MAX_FIRINGS};
use crate::select::{
    select, ContextSnapshot, Policy, PolicyKind, Score, SelectError, DEFAULT_E_MIN,
};

pub use crate::graph::{apply, PlanError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub e_min: u32,
    /// Tie-break used when adapting; the initial deployment always spreads.
    pub policy: PolicyKind,
    pub max_candidates: usize,
    pub max_firings: usize,
    pub rules: Vec<Rule>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            e_min: DEFAULT_E_MIN,
            policy: PolicyKind::Distance,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            max_firings: DEFAULT_MAX_FIRINGS,
            rules: builtin_rules(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    EnergyChanged {
        ip: String,
        energy: u32,
    },
    ActorArrived {
        actor_id: String,
        role: Role,
        device: Device,
        group: String,
        /// Devices the newcomer has signal with.
        links: Vec<String>,
    },
    ActorDeparted {
        actor_id: String,
    },
    RoleChanged {
        actor_id: String,
        role: Role,
    },
    LinkChanged {
        a: String,
        b: String,
        up: bool,
    },
}

impl EventKind {
    /// Whether the event changes who collaborates with whom, as opposed to
    /// only the resource context.
    pub fn is_structural(&self) -> bool {
        !matches!(self, EventKind::EnergyChanged { .. })
    }

    pub fn apply_to(&self, model: &ApplicationModel) -> Result<ApplicationModel, ModelError> {
        match self {
            EventKind::EnergyChanged { ip, energy } => model.set_energy(ip, *energy),
            EventKind::ActorArrived {
                actor_id,
                role,
                device,
                group,
                links,
            } => {
                let mut next = model.add_actor(actor_id, *role, device.clone(), group)?;
                for peer in links {
                    next = next.connect(&device.ip, peer)?;
                }
                Ok(next)
            }
            EventKind::ActorDeparted { actor_id } => model.remove_actor(actor_id),
            EventKind::RoleChanged { actor_id, role } => model.set_role(actor_id, *role),
            EventKind::LinkChanged { a, b, up: true } => model.connect(a, b),
            EventKind::LinkChanged { a, b, up: false } => model.disconnect(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissionEvent {
    /// Phase tag.
    pub label: String,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Middleware,
    Collaboration,
    Degraded,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Middleware => "middleware",
            Level::Collaboration => "collaboration",
            Level::Degraded => "degraded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Nominal,
    /// No feasible deployment; the last one is kept as is.
    Degraded {
        cause: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub label: String,
    pub level: Level,
    /// Rules were re-run for this event.
    pub reinferred: bool,
    pub plan: String,
    pub cm_hosts: BTreeMap<String, String>,
    pub score: Option<Score>,
    pub cause: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdaptError {
    #[error("event cannot be applied: {0}")]
    Event(#[from] ModelError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Select(#[from] SelectError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineState {
    pub model: ApplicationModel,
    pub collab: CollaborationGraph,
    pub candidates: CandidateSet,
    pub deployed: MiddlewareGraph,
    pub context: ContextSnapshot,
    pub config: EngineConfig,
    pub status: Status,
}

/// Outcome of the escalation ladder for one event.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub level: Level,
    pub reinferred: bool,
    pub collab: CollaborationGraph,
    pub candidates: CandidateSet,
    /// `None` when degraded.
    pub deployed: Option<(MiddlewareGraph, Score)>,
    pub cause: Option<String>,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: EngineState,
    pub plan: MigrationPlan,
    pub trace: Trace,
}

impl EngineState {
    /// First deployment for a model, chosen with the dispersion policy since
    /// nothing is deployed yet.
    pub fn initialize(
        model: ApplicationModel,
        config: EngineConfig,
        label: &str,
    ) -> Result<(EngineState, Trace), AdaptError> {
        let collab = infer_collaboration_with(&model, &config.rules, config.max_firings)?;
        let candidates = refine_with(&collab, &model, config.max_candidates)?;
        let context = ContextSnapshot::from_model(&model);
        let chosen = choose(&candidates, &context, Policy::Dispersion, config.e_min)?;
        let (level, status, deployed, score, cause) = match chosen {
            Some((g, s)) => (Level::Collaboration, Status::Nominal, g, Some(s), None),
            None => {
                let cause = "no feasible channel manager placement".to_owned();
                (
                    Level::Degraded,
                    Status::Degraded {
                        cause: cause.clone(),
                    },
                    MiddlewareGraph::new(),
                    None,
                    Some(cause),
                )
            }
        };
        let trace = Trace {
            label: label.to_owned(),
            level,
            reinferred: true,
            plan: diff(&MiddlewareGraph::new(), &deployed).summary(),
            cm_hosts: deployed.cm_hosts(),
            score,
            cause,
        };
        log_trace(&trace);
        let state = EngineState {
            model,
            collab,
            candidates,
            deployed,
            context,
            config,
            status,
        };
        Ok((state, trace))
    }

    pub fn is_degraded(&self) -> bool {
        matches!(self.status, Status::Degraded { .. })
    }

    /// Current model and context updated for the event; collaboration graph,
    /// candidates and deployment left as they were.
    pub fn with_event_applied(&self, event: &EventKind) -> Result<EngineState, AdaptError> {
        let model = event.apply_to(&self.model)?;
        let context = ContextSnapshot::from_model(&model);
        Ok(EngineState {
            model,
            context,
            ..self.clone()
        })
    }

    /// Runs the escalation ladder on a state whose model already reflects
    /// the event.
    pub fn escalate(&self, structural: bool) -> Result<Resolution, AdaptError> {
        let policy = match self.config.policy {
            PolicyKind::Dispersion => Policy::Dispersion,
            PolicyKind::Distance => Policy::Distance {
                current: &self.deployed,
            },
        };
        if !structural {
            if let Some(found) = choose(&self.candidates, &self.context, policy, self.config.e_min)?
            {
                return Ok(Resolution {
                    level: Level::Middleware,
                    reinferred: false,
                    collab: self.collab.clone(),
                    candidates: self.candidates.clone(),
                    deployed: Some(found),
                    cause: None,
                });
            }
        }
        let collab = if structural {
            infer_collaboration_with(&self.model, &self.config.rules, self.config.max_firings)?
        } else {
            self.collab.clone()
        };
        let candidates = refine_with(&collab, &self.model, self.config.max_candidates)?;
        let found = choose(&candidates, &self.context, policy, self.config.e_min)?;
        let (level, cause) = match found {
            Some(_) => (Level::Collaboration, None),
            None => (
                Level::Degraded,
                Some(format!(
                    "no feasible channel manager placement with e_min {}",
                    self.config.e_min
                )),
            ),
        };
        Ok(Resolution {
            level,
            reinferred: structural,
            collab,
            candidates,
            deployed: found,
            cause,
        })
    }

    /// Applies one event and returns the next state, the migration from the
    /// previous deployment and a trace record.
    pub fn step(&self, event: &MissionEvent) -> Result<StepOutcome, AdaptError> {
        let draft = self.with_event_applied(&event.kind)?;
        let resolution = draft.escalate(event.kind.is_structural())?;
        let (deployed, status, score) = match resolution.deployed {
            Some((g, s)) => (g, Status::Nominal, Some(s)),
            None => (
                self.deployed.clone(),
                Status::Degraded {
                    cause: resolution.cause.clone().unwrap_or_default(),
                },
                None,
            ),
        };
        let plan = diff(&self.deployed, &deployed);
        let trace = Trace {
            label: event.label.clone(),
            level: resolution.level,
            reinferred: resolution.reinferred,
            plan: if resolution.level == Level::Degraded {
                "degraded".to_owned()
            } else {
                plan.summary()
            },
            cm_hosts: deployed.cm_hosts(),
            score,
            cause: resolution.cause,
        };
        log_trace(&trace);
        let state = EngineState {
            collab: resolution.collab,
            candidates: resolution.candidates,
            deployed,
            status,
            ..draft
        };
        Ok(StepOutcome { state, plan, trace })
    }
}

/// Selection with the empty candidate set read as "deploy nothing".
fn choose(
    candidates: &CandidateSet,
    context: &ContextSnapshot,
    policy: Policy<'_>,
    e_min: u32,
) -> Result<Option<(MiddlewareGraph, Score)>, AdaptError> {
    if candidates.is_empty() {
        return Ok(Some((MiddlewareGraph::new(), Score::new(100))));
    }
    match select(candidates, context, policy, e_min) {
        Ok(s) => Ok(Some((s.graph.clone(), s.score))),
        Err(SelectError::NoFeasibleCandidate) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn log_trace(trace: &Trace) {
    let hosts: Vec<String> = trace
        .cm_hosts
        .iter()
        .map(|(s, ip)| format!("{s}@{ip}"))
        .collect();
    info!(
        event = %trace.label,
        level = %trace.level,
        plan = %trace.plan,
        cm_hosts = %hosts.join(","),
        "reconfiguration"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InvestigatorKind;

    fn phase1() -> EngineState {
        let model = crate::scenario::rosace().unwrap().model;
        EngineState::initialize(model, EngineConfig::default(), "phase1")
            .unwrap()
            .0
    }

    fn energy(ip: &str, energy: u32) -> MissionEvent {
        MissionEvent {
            label: "t".into(),
            kind: EventKind::EnergyChanged {
                ip: ip.into(),
                energy,
            },
        }
    }

    fn robot_arrival(state: &EngineState) -> MissionEvent {
        let ssid = state.model.devices["10.193.255.200"].ssid.clone();
        MissionEvent {
            label: "phase3".into(),
            kind: EventKind::ActorArrived {
                actor_id: "robot3".into(),
                role: Role::Investigator(InvestigatorKind::Robot),
                device: Device::new("10.193.255.202", 95, ssid),
                group: "team1".into(),
                links: vec!["10.193.255.200".into()],
            },
        }
    }

    #[test]
    fn initial_deployment() {
        let s = phase1();
        let hosts = s.deployed.cm_hosts();
        assert_eq!(hosts["sup_coor_session"], "10.193.255.100");
        assert_eq!(hosts["Firecoor_inv_session"], "10.193.255.143");
        assert!(!s.is_degraded());
    }

    #[test]
    fn energy_drop_moves_one_cm() {
        let out = phase1().step(&energy("10.193.255.143", 50)).unwrap();
        assert_eq!(out.trace.level, Level::Middleware);
        assert!(!out.trace.reinferred);
        assert!(out.plan.added.is_empty() && out.plan.removed.is_empty());
        assert_eq!(out.plan.moved.len(), 1);
        let m = &out.plan.moved[0];
        assert_eq!(
            (m.id.as_str(), m.from.as_str(), m.to.as_str()),
            (
                "cm:Firecoor_inv_session",
                "10.193.255.143",
                "10.193.255.146"
            )
        );
    }

    #[test]
    fn arrival_adds_robot_session() {
        let s2 = phase1().step(&energy("10.193.255.143", 50)).unwrap().state;
        let out = s2.step(&robot_arrival(&s2)).unwrap();
        assert_eq!(out.trace.level, Level::Collaboration);
        assert!(out.trace.reinferred);
        assert!(out.plan.moved.is_empty() && out.plan.removed.is_empty());
        let kinds: Vec<_> = out.plan.added.iter().map(|v| v.kind.as_str()).collect();
        assert_eq!(kinds.iter().filter(|k| **k == "CM").count(), 1);
        assert_eq!(kinds.iter().filter(|k| **k == "EP").count(), 2);
        assert_eq!(kinds.iter().filter(|k| **k == "EC").count(), 2);
        assert_eq!(
            out.state.deployed.cm_hosts()["Robcoor_inv_session"],
            "10.193.255.202"
        );
    }

    #[test]
    fn redelivered_energy_is_a_noop() {
        let s2 = phase1().step(&energy("10.193.255.143", 50)).unwrap().state;
        let again = s2.step(&energy("10.193.255.143", 50)).unwrap();
        assert!(again.plan.is_empty());
        assert_eq!(again.state.deployed, s2.deployed);
    }

    #[test]
    fn everything_drained_degrades() {
        let mut s = phase1();
        let mut last = None;
        let mut before = s.deployed.clone();
        for ip in [
            "10.193.255.1",
            "10.193.255.100",
            "10.193.255.200",
            "10.193.255.143",
            "10.193.255.146",
        ] {
            before = s.deployed.clone();
            let out = s.step(&energy(ip, 10)).unwrap();
            s = out.state;
            last = Some(out.trace);
        }
        let trace = last.unwrap();
        assert_eq!(trace.level, Level::Degraded);
        assert_eq!(trace.plan, "degraded");
        assert!(s.is_degraded());
        // the last workable deployment stays in place
        assert_eq!(s.deployed, before);
    }

    #[test]
    fn degraded_engine_recovers() {
        let mut s = phase1();
        for ip in [
            "10.193.255.1",
            "10.193.255.100",
            "10.193.255.200",
            "10.193.255.143",
            "10.193.255.146",
        ] {
            s = s.step(&energy(ip, 10)).unwrap().state;
        }
        // one capable host cannot carry both sessions
        let out = s.step(&energy("10.193.255.100", 80)).unwrap();
        assert!(out.state.is_degraded());
        let out = out.state.step(&energy("10.193.255.146", 80)).unwrap();
        assert!(!out.state.is_degraded());
        let hosts = out.state.deployed.cm_hosts();
        assert_eq!(hosts["sup_coor_session"], "10.193.255.100");
        assert_eq!(hosts["Firecoor_inv_session"], "10.193.255.146");
    }

    #[test]
    fn bad_event_is_an_error() {
        let err = phase1().step(&energy("10.9.9.9", 10)).unwrap_err();
        assert!(matches!(
            err,
            AdaptError::Event(ModelError::UnknownDevice(_))
        ));
    }

    #[test]
    fn departure_removes_components() {
        let s = phase1();
        let out = s
            .step(&MissionEvent {
                label: "x".into(),
                kind: EventKind::ActorDeparted {
                    actor_id: "fireman2".into(),
                },
            })
            .unwrap();
        assert_eq!(out.trace.level, Level::Collaboration);
        assert!(!out.plan.removed.is_empty());
        assert!(out
            .state
            .deployed
            .vertices
            .values()
            .all(|v| v.ip != "10.193.255.146"));
    }
}
