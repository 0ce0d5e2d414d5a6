//! Forward-chaining production rules over the mission fact base.
//!
//! Rules are conjunctive and negation-free. A rule may mint fresh entities
//! (flows) whose ids are a deterministic function of the rule and the
//! binding, which makes refiring idempotent and the fixpoint finite.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub mod builtin;
mod engine;
mod facts;

pub use builtin::{builtin_rules, RuleFamily};
pub use engine::{
    fire, infer_collaboration, infer_collaboration_with, match_rule, synthesize,
    DEFAULT_MAX_FIRINGS,
};
pub use facts::{entity, FactBase};

/// The closed rule vocabulary. Class predicates are unary, properties binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Investigator,
    FiremanCoordinator,
    RobotCoordinator,
    Supervisor,
    Node,
    Device,
    HasRole,
    HasHostingDevice,
    HasSameSsid,
    HasSignalWith,
    BelongsToSameGroup,
    BelongsToGroup,
    /// Built-in inequality; evaluated, never stored.
    DifferentFrom,
    HasFiremanCordInvSession,
    HasRobotCordInvSession,
    HasSupCoordSession,
    AudioFlow,
    HasSource,
    HasDestination,
    BelongsToSession,
}

impl Predicate {
    pub fn arity(self) -> usize {
        use Predicate::*;
        match self {
            Investigator | FiremanCoordinator | RobotCoordinator | Supervisor | Node | Device
            | AudioFlow => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        use Predicate::*;
        match self {
            Investigator => "Investigator",
            FiremanCoordinator => "FiremanCoordinator",
            RobotCoordinator => "RobotCoordinator",
            Supervisor => "Supervisor",
            Node => "Node",
            Device => "Device",
            HasRole => "hasRole",
            HasHostingDevice => "hasHostingDevice",
            HasSameSsid => "hasSameSSID",
            HasSignalWith => "hasSignalWith",
            BelongsToSameGroup => "belongsToSameGroup",
            BelongsToGroup => "belongsToGroup",
            DifferentFrom => "differentFrom",
            HasFiremanCordInvSession => "hasFiremanCordInvSession",
            HasRobotCordInvSession => "hasRobotCordInvSession",
            HasSupCoordSession => "hasSupCoordSession",
            AudioFlow => "AudioFlow",
            HasSource => "hasSource",
            HasDestination => "hasDestination",
            BelongsToSession => "belongsToSession",
        }
    }

    pub fn is_builtin(self) -> bool {
        self == Predicate::DifferentFrom
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::var)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Shorthand for building atoms: `atom(HasRole, ["?n", "?r"])`. Arguments
/// starting with `?` are variables.
pub fn atom<const N: usize>(predicate: Predicate, args: [&str; N]) -> Atom {
    Atom {
        predicate,
        args: args
            .iter()
            .map(|a| match a.strip_prefix('?') {
                Some(v) => Term::Var(v.to_owned()),
                None => Term::Const((*a).to_owned()),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Atom>,
    /// Variables bound to freshly minted entities when the rule fires.
    pub creates: Vec<String>,
    pub head: Vec<Atom>,
}

impl Rule {
    pub fn check(&self) -> Result<(), RuleError> {
        let malformed = |why: String| RuleError::MalformedRule {
            rule: self.id.clone(),
            why,
        };
        for a in self.body.iter().chain(&self.head) {
            if a.args.len() != a.predicate.arity() {
                return Err(malformed(format!("{a} has arity {}", a.args.len())));
            }
        }
        let bound: BTreeSet<&str> = self
            .body
            .iter()
            .filter(|a| !a.predicate.is_builtin())
            .flat_map(Atom::vars)
            .collect();
        for a in self.body.iter().filter(|a| a.predicate.is_builtin()) {
            if let Some(v) = a.vars().find(|v| !bound.contains(v)) {
                return Err(malformed(format!(
                    "?{v} in {a} is not bound by a positive atom"
                )));
            }
        }
        for c in &self.creates {
            if self.body.iter().flat_map(Atom::vars).any(|v| v == c) {
                return Err(malformed(format!("created ?{c} appears in the body")));
            }
        }
        for a in &self.head {
            if a.predicate.is_builtin() {
                return Err(malformed(format!("{a} cannot be asserted")));
            }
            for v in a.vars() {
                if !bound.contains(v) && !self.creates.iter().any(|c| c == v) {
                    return Err(malformed(format!("head variable ?{v} is unbound")));
                }
            }
        }
        Ok(())
    }

    pub fn body_vars(&self) -> BTreeSet<&str> {
        self.body.iter().flat_map(Atom::vars).collect()
    }
}

/// Variable name to entity. Ordered, so bindings sort by bound ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding(pub BTreeMap<String, String>);

impl Binding {
    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule `{rule}` is malformed: {why}")]
    MalformedRule { rule: String, why: String },
    #[error("no fixpoint after {0} firings")]
    NonTermination(usize),
    #[error("flow entity `{0}` lacks a source, destination or session")]
    IncompleteFlow(String),
}
