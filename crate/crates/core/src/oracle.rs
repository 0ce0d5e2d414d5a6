//! Reference selection by exhaustive scan.
//!
//! Written set-by-set, straight from the selection procedure, and sharing no
//! code with [`crate::select`] beyond the graph types: scoring, dispersion
//! and migration cost are recomputed here from the raw vertices. The CLI's
//! `oracle` command and the test suites compare the two.

use std::collections::BTreeMap;

use crate::graph::{MiddlewareGraph, MwKind};

#[derive(Debug, Clone, Copy)]
pub enum OraclePolicy<'a> {
    Dispersion,
    Distance(&'a MiddlewareGraph),
}

/// Context score, or `None` when a host has no energy reading.
pub fn score(
    candidate: &MiddlewareGraph,
    energy: &BTreeMap<String, u32>,
    e_min: u32,
) -> Option<i64> {
    let mut cm_ips: Vec<&str> = Vec::new();
    for v in candidate.vertices.values() {
        energy.get(&v.ip)?;
        if v.kind == MwKind::ChannelManager {
            cm_ips.push(&v.ip);
        }
    }
    for (i, a) in cm_ips.iter().enumerate() {
        if cm_ips[i + 1..].contains(a) {
            return Some(-1);
        }
    }
    if cm_ips.iter().any(|ip| energy[*ip] < e_min) {
        return Some(-1);
    }
    Some(
        cm_ips
            .iter()
            .map(|ip| i64::from(energy[*ip]))
            .min()
            .unwrap_or(100),
    )
}

pub fn spread(candidate: &MiddlewareGraph) -> usize {
    let mut ips: Vec<&str> = candidate.vertices.values().map(|v| v.ip.as_str()).collect();
    ips.sort_unstable();
    ips.dedup();
    ips.len()
}

/// Component operations needed to go from `current` to `candidate`: one per
/// added, removed or re-hosted component, two when a kept id changes role.
pub fn migration_cost(current: &MiddlewareGraph, candidate: &MiddlewareGraph) -> usize {
    let mut cost = 0;
    for (id, old) in &current.vertices {
        match candidate.vertices.get(id) {
            None => cost += 1,
            Some(new) => {
                let same_role = old.kind == new.kind
                    && old.session == new.session
                    && old.data_type == new.data_type;
                if !same_role {
                    cost += 2;
                } else if old.ip != new.ip {
                    cost += 1;
                }
            }
        }
    }
    cost + candidate
        .vertices
        .keys()
        .filter(|id| !current.vertices.contains_key(*id))
        .count()
}

/// Index of the selected candidate, or `None` if every candidate is
/// infeasible, the set is empty, or a host lacks context.
pub fn brute_force_select(
    candidates: &[MiddlewareGraph],
    energy: &BTreeMap<String, u32>,
    e_min: u32,
    policy: OraclePolicy<'_>,
) -> Option<usize> {
    let scores: Vec<i64> = candidates
        .iter()
        .map(|c| score(c, energy, e_min))
        .collect::<Option<_>>()?;

    // S1: candidates scoring at least as much as every other
    let s1: Vec<usize> = (0..candidates.len())
        .filter(|&k| scores.iter().all(|&x| scores[k] >= x))
        .collect();
    if s1.is_empty() || scores[s1[0]] < 0 {
        return None;
    }
    if s1.len() == 1 {
        return Some(s1[0]);
    }

    // S2: policy optimum within S1
    let s2: Vec<usize> = match policy {
        OraclePolicy::Dispersion => s1
            .iter()
            .copied()
            .filter(|&k| {
                s1.iter()
                    .all(|&x| spread(&candidates[k]) >= spread(&candidates[x]))
            })
            .collect(),
        OraclePolicy::Distance(current) => s1
            .iter()
            .copied()
            .filter(|&k| {
                s1.iter().all(|&x| {
                    migration_cost(current, &candidates[k])
                        <= migration_cost(current, &candidates[x])
                })
            })
            .collect(),
    };
    // any configuration from S2; the first keeps runs reproducible
    s2.first().copied()
}
