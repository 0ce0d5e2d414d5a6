use std::collections::{BTreeMap, BTreeSet};

use tracing::debug;

use super::facts::entity;
use super::{Atom, Binding, FactBase, Predicate, Rule, RuleError, Term};
use crate::graph::{CollabKind, CollabVertex, CollaborationGraph, DataType, Flow};
use crate::model::ApplicationModel;

pub const DEFAULT_MAX_FIRINGS: usize = 10_000;

/// Every binding of the body's variables under which all body atoms hold,
/// sorted by bound ids.
pub fn match_rule(rule: &Rule, facts: &FactBase) -> Result<Vec<Binding>, RuleError> {
    rule.check()?;
    let order = join_order(&rule.body);
    let mut out = Vec::new();
    extend(&order, 0, &mut BTreeMap::new(), facts, &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Greedy static join order: next comes the atom with the most arguments
/// already bound, ties by position. Built-ins run as soon as their variables
/// are bound.
fn join_order(body: &[Atom]) -> Vec<&Atom> {
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut left: Vec<&Atom> = body.iter().filter(|a| !a.predicate.is_builtin()).collect();
    let mut builtins: Vec<&Atom> = body.iter().filter(|a| a.predicate.is_builtin()).collect();
    let mut order = Vec::with_capacity(body.len());
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .max_by_key(|(i, a)| {
                let n = a
                    .args
                    .iter()
                    .filter(|t| t.var().is_none_or(|v| bound.contains(v)))
                    .count();
                (n, std::cmp::Reverse(*i))
            })
            .expect("non-empty");
        let next = left.remove(pos);
        bound.extend(next.vars());
        order.push(next);
        builtins.retain(|b| {
            if b.vars().all(|v| bound.contains(v)) {
                order.push(*b);
                false
            } else {
                true
            }
        });
    }
    order
}

fn resolve<'a>(term: &'a Term, binding: &'a BTreeMap<String, String>) -> Option<&'a str> {
    match term {
        Term::Const(c) => Some(c),
        Term::Var(v) => binding.get(v).map(String::as_str),
    }
}

fn extend(
    order: &[&Atom],
    depth: usize,
    binding: &mut BTreeMap<String, String>,
    facts: &FactBase,
    out: &mut Vec<Binding>,
) {
    let Some(atom) = order.get(depth) else {
        out.push(Binding(binding.clone()));
        return;
    };
    if atom.predicate == Predicate::DifferentFrom {
        let a = resolve(&atom.args[0], binding);
        let b = resolve(&atom.args[1], binding);
        if a != b {
            extend(order, depth + 1, binding, facts, out);
        }
        return;
    }
    'facts: for fact in facts.facts(atom.predicate) {
        let mut fresh = Vec::new();
        for (term, value) in atom.args.iter().zip(fact) {
            match term {
                Term::Const(c) if c != value => {
                    undo(binding, &fresh);
                    continue 'facts;
                }
                Term::Const(_) => {}
                Term::Var(v) => match binding.get(v) {
                    Some(existing) if existing != value => {
                        undo(binding, &fresh);
                        continue 'facts;
                    }
                    Some(_) => {}
                    None => {
                        binding.insert(v.clone(), value.clone());
                        fresh.push(v.clone());
                    }
                },
            }
        }
        extend(order, depth + 1, binding, facts, out);
        undo(binding, &fresh);
    }
}

fn undo(binding: &mut BTreeMap<String, String>, fresh: &[String]) {
    for v in fresh {
        binding.remove(v);
    }
}

/// Asserts the rule's head under `binding`. Created entities get an id
/// derived from the rule, the variable and the binding, so firing the same
/// binding twice adds nothing the second time. Returns the number of new
/// facts.
pub fn fire(rule: &Rule, binding: &Binding, facts: &mut FactBase) -> usize {
    let mut full = binding.0.clone();
    if !rule.creates.is_empty() {
        let key: Vec<&str> = binding.0.values().map(String::as_str).collect();
        let key = key.join(",");
        for var in &rule.creates {
            full.insert(var.clone(), format!("new:{}:{}[{}]", rule.id, var, key));
        }
    }
    let mut added = 0;
    for atom in &rule.head {
        let args: Option<Vec<String>> = atom
            .args
            .iter()
            .map(|t| resolve(t, &full).map(str::to_owned))
            .collect();
        // Rule::check guarantees every head term resolves.
        if let Some(args) = args {
            if facts.insert(atom.predicate, args) {
                added += 1;
            }
        }
    }
    added
}

pub fn infer_collaboration(
    model: &ApplicationModel,
    rules: &[Rule],
) -> Result<CollaborationGraph, RuleError> {
    infer_collaboration_with(model, rules, DEFAULT_MAX_FIRINGS)
}

/// Runs every rule to fixpoint over the model's facts, then builds the
/// collaboration graph from the derived flows. `max_firings` bounds the
/// number of productive firings.
pub fn infer_collaboration_with(
    model: &ApplicationModel,
    rules: &[Rule],
    max_firings: usize,
) -> Result<CollaborationGraph, RuleError> {
    for rule in rules {
        rule.check()?;
    }
    let mut facts = FactBase::from_model(model);
    let mut firings = 0usize;
    loop {
        let mut changed = false;
        for rule in rules {
            for binding in match_rule(rule, &facts)? {
                if fire(rule, &binding, &mut facts) > 0 {
                    firings += 1;
                    changed = true;
                    if firings > max_firings {
                        return Err(RuleError::NonTermination(max_firings));
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    debug!(firings, facts = facts.len(), "rule fixpoint reached");
    synthesize(&facts, model)
}

fn single<'a>(facts: &'a FactBase, predicate: Predicate, subject: &str) -> Option<&'a str> {
    facts
        .facts(predicate)
        .find(|f| f[0] == subject)
        .map(|f| f[1].as_str())
}

struct ActorFlow<'a> {
    session: &'a str,
    source: &'a str,
    destination: &'a str,
    data_type: DataType,
}

/// Builds components from derived flow facts: one sender per (actor,
/// session) that sources a flow, one receiver per incoming flow.
pub fn synthesize(
    facts: &FactBase,
    model: &ApplicationModel,
) -> Result<CollaborationGraph, RuleError> {
    let mut flows: Vec<ActorFlow> = Vec::new();
    for f in facts.facts(Predicate::AudioFlow) {
        let id = f[0].as_str();
        let incomplete = || RuleError::IncompleteFlow(id.to_owned());
        fn hosted<'f>(node: Option<&'f str>, model: &ApplicationModel) -> Option<&'f str> {
            node.and_then(entity::actor_of_node)
                .filter(|a| model.device_of(a).is_some())
        }
        let actor = |node| hosted(node, model).ok_or_else(incomplete);
        let source = actor(single(facts, Predicate::HasSource, id))?;
        let destination = actor(single(facts, Predicate::HasDestination, id))?;
        let session = single(facts, Predicate::BelongsToSession, id)
            .and_then(entity::session_name)
            .ok_or_else(incomplete)?;
        flows.push(ActorFlow {
            session,
            source,
            destination,
            data_type: DataType::Audio,
        });
    }
    flows.sort_by(|a, b| {
        (a.session, a.source, a.destination).cmp(&(b.session, b.source, b.destination))
    });
    flows.dedup_by(|a, b| {
        (a.session, a.source, a.destination) == (b.session, b.source, b.destination)
    });

    let ip = |actor: &str| {
        model
            .device_of(actor)
            .expect("checked in extraction")
            .ip
            .clone()
    };
    let mut graph = CollaborationGraph::new();
    let mut sender_types: BTreeMap<(&str, &str), Vec<DataType>> = BTreeMap::new();
    for f in &flows {
        sender_types
            .entry((f.session, f.source))
            .or_default()
            .push(f.data_type);
    }
    for ((session, actor), types) in &sender_types {
        graph.add_vertex(CollabVertex {
            id: sender_id(session, actor),
            kind: CollabKind::Sender,
            ip: ip(actor),
            data_type: DataType::dominant(types.iter().copied()),
            session: (*session).to_owned(),
        });
    }
    for f in &flows {
        let receiver = receiver_id(f.session, f.destination, f.source);
        let (src_ip, dst_ip) = (ip(f.source), ip(f.destination));
        graph.add_vertex(CollabVertex {
            id: receiver.clone(),
            kind: CollabKind::Receiver,
            ip: dst_ip.clone(),
            data_type: f.data_type,
            session: f.session.to_owned(),
        });
        graph.add_flow(Flow {
            id: format!("{}/{}->{}", f.session, src_ip, dst_ip),
            data_type: f.data_type,
            source: sender_id(f.session, f.source),
            destination: receiver,
            session: f.session.to_owned(),
        });
    }
    Ok(graph)
}

fn sender_id(session: &str, actor: &str) -> String {
    format!("snd:{session}:{actor}")
}

fn receiver_id(session: &str, actor: &str, from: &str) -> String {
    format!("rcv:{session}:{actor}:{from}")
}
