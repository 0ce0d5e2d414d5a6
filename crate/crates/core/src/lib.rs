//! Rule-driven collaboration and middleware deployment for mobile
//! response teams.
//!
//! An [`ApplicationModel`] (actors, devices, groups, radio links) is turned
//! by production rules into a [`CollaborationGraph`] of audio sessions. Each
//! collaboration graph refines into a set of candidate [`MiddlewareGraph`]s
//! (producers, consumers, one channel manager per session), and one is
//! selected against the current energy context. [`EngineState::step`] keeps
//! the deployment current as mission events arrive.
//!
//! ```
//! use mission_mesh::{builtin_rules, infer_collaboration, refine, select};
//! use mission_mesh::{ContextSnapshot, Policy, DEFAULT_E_MIN};
//!
//! let model = mission_mesh::scenario::rosace().unwrap().model;
//! let collab = infer_collaboration(&model, &builtin_rules()).unwrap();
//! let candidates = refine(&collab, &model).unwrap();
//! let ctx = ContextSnapshot::from_model(&model);
//! let chosen = select(&candidates, &ctx, Policy::Dispersion, DEFAULT_E_MIN).unwrap();
//! assert_eq!(chosen.score.value(), 90);
//! ```

pub mod adapt;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod refine;
pub mod rules;
pub mod scenario;
pub mod select;

pub use adapt::{
    AdaptError, EngineConfig, EngineState, EventKind, Level, MissionEvent, Status, StepOutcome,
    Trace,
};
pub use graph::{
    apply, diff, CollabKind, CollabVertex, CollaborationGraph, DataType, Flow, InvariantError,
    LinkKind, MiddlewareGraph, MigrationPlan, Move, MwEdge, MwKind, MwVertex, PlanError, Session,
};
pub use model::{
    Actor, ApplicationModel, Device, Group, InvestigatorKind, ModelError, Role, SignalLink,
    Violation,
};
pub use refine::{refine, refine_with, CandidateSet, RefineError};
pub use rules::{builtin_rules, infer_collaboration, infer_collaboration_with, Rule, RuleError};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
pub use select::{
    context_adaptation, select, ContextSnapshot, Policy, PolicyKind, Score, SelectError, Selection,
    DEFAULT_E_MIN,
};
