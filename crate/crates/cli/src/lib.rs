//! Scenario runner behind the `mission-mesh` binary.
//!
//! Replays a scenario through the adaptation engine phase by phase, writes
//! a collaboration and a middleware snapshot per phase, and builds the
//! placement report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use mission_mesh::graph::dot::{collaboration_to_dot, middleware_to_dot};
use mission_mesh::graph::graphml::{collaboration_to_graphml, middleware_to_graphml};
use mission_mesh::oracle::{brute_force_select, OraclePolicy};
use mission_mesh::{
    diff, EngineConfig, EngineState, Level, MiddlewareGraph, MissionEvent, PolicyKind, Scenario,
};
use serde::Serialize;

/// Exit code when the run completed but some phase ended degraded.
pub const EXIT_DEGRADED: i32 = 2;
/// Exit code for unreadable or invalid input.
pub const EXIT_INPUT: i32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum SnapshotFormat {
    #[default]
    Graphml,
    Dot,
    Both,
}

impl SnapshotFormat {
    fn graphml(self) -> bool {
        self != SnapshotFormat::Dot
    }

    fn dot(self) -> bool {
        self != SnapshotFormat::Graphml
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Snapshot directory; `None` skips writing files.
    pub out_dir: Option<PathBuf>,
    pub policy: Option<PolicyKind>,
    pub e_min: Option<u32>,
    pub format: SnapshotFormat,
}

impl RunOptions {
    pub fn engine_config(&self, scenario: &Scenario) -> EngineConfig {
        let mut config = scenario.engine_config();
        if let Some(policy) = self.policy {
            config.policy = policy;
        }
        if let Some(e_min) = self.e_min {
            config.e_min = e_min;
        }
        config
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseReport {
    pub phase: String,
    /// Highest escalation level reached while handling the phase, or
    /// degraded if the phase ended without a feasible deployment.
    pub level: Level,
    /// Whether the rules were re-run during the phase.
    pub reinferred: bool,
    pub plan: String,
    pub sessions: Vec<String>,
    pub cm_hosts: BTreeMap<String, String>,
    pub score: Option<i64>,
    pub energies: BTreeMap<String, u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub phases: Vec<PhaseReport>,
}

impl RunReport {
    pub fn degraded(&self) -> bool {
        self.phases.iter().any(|p| p.level == Level::Degraded)
    }

    pub fn exit_code(&self) -> i32 {
        if self.degraded() {
            EXIT_DEGRADED
        } else {
            0
        }
    }

    /// One JSON object per phase, one per line.
    pub fn to_machine(&self) -> String {
        self.phases
            .iter()
            .map(|p| serde_json::to_string(p).expect("report serializes") + "\n")
            .collect()
    }

    /// Placement table followed by the energy of every device per phase.
    pub fn to_table(&self) -> String {
        let mut rows = vec![["phase", "level", "plan", "session", "cm host"].map(String::from)];
        for p in &self.phases {
            let mut first = true;
            let lead = |first: bool| {
                if first {
                    [p.phase.clone(), p.level.to_string(), p.plan.clone()]
                } else {
                    Default::default()
                }
            };
            for (session, host) in &p.cm_hosts {
                let [a, b, c] = lead(first);
                rows.push([a, b, c, session.clone(), host.clone()]);
                first = false;
            }
            if first {
                let [a, b, c] = lead(true);
                rows.push([a, b, c, "-".into(), "-".into()]);
            }
        }
        let mut out = align(&rows);

        let mut ips: Vec<&String> = self.phases.iter().flat_map(|p| p.energies.keys()).collect();
        ips.sort();
        ips.dedup();
        let mut energy = vec![std::iter::once("device".to_owned())
            .chain(self.phases.iter().map(|p| p.phase.clone()))
            .collect::<Vec<_>>()];
        for ip in ips {
            energy.push(
                std::iter::once(ip.clone())
                    .chain(self.phases.iter().map(|p| {
                        p.energies
                            .get(ip)
                            .map_or_else(|| "-".to_owned(), u32::to_string)
                    }))
                    .collect(),
            );
        }
        out.push('\n');
        out.push_str(&align(&energy));
        for p in self.phases.iter().filter(|p| p.cause.is_some()) {
            let _ = writeln!(
                out,
                "\n{}: {}",
                p.phase,
                p.cause.as_deref().unwrap_or_default()
            );
        }
        out
    }
}

fn align<R: AsRef<[String]>>(rows: &[R]) -> String {
    let columns = rows.iter().map(|r| r.as_ref().len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.as_ref().get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.as_ref().iter().enumerate() {
            let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Splits the event list into its contiguous phases.
pub fn phases(events: &[MissionEvent]) -> Vec<(&str, &[MissionEvent])> {
    let mut out: Vec<(&str, &[MissionEvent])> = Vec::new();
    let mut start = 0;
    for i in 1..=events.len() {
        if i == events.len() || events[i].label != events[start].label {
            out.push((&events[start].label, &events[start..i]));
            start = i;
        }
    }
    out
}

fn phase_report(
    phase: &str,
    state: &EngineState,
    before: &MiddlewareGraph,
    level: Level,
    reinferred: bool,
) -> PhaseReport {
    let (plan, cause, score) = match &state.status {
        mission_mesh::Status::Degraded { cause } => {
            ("degraded".to_owned(), Some(cause.clone()), None)
        }
        mission_mesh::Status::Nominal => {
            let score = mission_mesh::context_adaptation(
                &state.deployed,
                &state.context,
                state.config.e_min,
            )
            .ok()
            .map(|s| s.value());
            (diff(before, &state.deployed).summary(), None, score)
        }
    };
    PhaseReport {
        phase: phase.to_owned(),
        level,
        reinferred,
        plan,
        sessions: state.collab.session_names().into_iter().collect(),
        cm_hosts: state.deployed.cm_hosts(),
        score,
        energies: state
            .model
            .devices
            .values()
            .map(|d| (d.ip.clone(), d.energy))
            .collect(),
        cause,
    }
}

fn write_snapshot(
    dir: &Path,
    phase: &str,
    state: &EngineState,
    format: SnapshotFormat,
) -> Result<()> {
    let mut files = Vec::new();
    if format.graphml() {
        files.push((
            format!("collab-{phase}.graphml"),
            collaboration_to_graphml(&state.collab),
        ));
        files.push((
            format!("mw-{phase}.graphml"),
            middleware_to_graphml(&state.deployed),
        ));
    }
    if format.dot() {
        files.push((
            format!("collab-{phase}.dot"),
            collaboration_to_dot(&state.collab),
        ));
        files.push((
            format!("mw-{phase}.dot"),
            middleware_to_dot(&state.deployed),
        ));
    }
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

/// Replays the scenario. Errors are input errors (unwritable output, events
/// that do not apply to the model, oversized inputs); a degraded phase is
/// reported, not an error.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let config = opts.engine_config(scenario);
    let (mut state, trace) =
        EngineState::initialize(scenario.model.clone(), config, &scenario.initial_phase)?;
    let mut report = RunReport::default();
    let initial = phase_report(
        &scenario.initial_phase,
        &state,
        &MiddlewareGraph::new(),
        trace.level,
        trace.reinferred,
    );
    report.phases.push(initial);
    if let Some(dir) = &opts.out_dir {
        write_snapshot(dir, &scenario.initial_phase, &state, opts.format)?;
    }

    for (phase, events) in phases(&scenario.events) {
        let before = state.deployed.clone();
        let mut level = Level::Middleware;
        let mut reinferred = false;
        for event in events {
            let out = state
                .step(event)
                .map_err(|e| anyhow!("phase {phase}: {e}"))?;
            if out.trace.level != Level::Degraded {
                level = level.max(out.trace.level);
            }
            reinferred |= out.trace.reinferred;
            state = out.state;
        }
        if state.is_degraded() {
            level = Level::Degraded;
        }
        report
            .phases
            .push(phase_report(phase, &state, &before, level, reinferred));
        if let Some(dir) = &opts.out_dir {
            write_snapshot(dir, phase, &state, opts.format)?;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub label: String,
    pub candidates: usize,
    pub engine: Option<usize>,
    pub oracle: Option<usize>,
}

impl OracleRow {
    pub fn agrees(&self) -> bool {
        self.engine == self.oracle
    }
}

fn position(state: &EngineState) -> Option<usize> {
    if state.is_degraded() {
        return None;
    }
    state.candidates.iter().position(|c| *c == state.deployed)
}

/// Replays the scenario and, after every step, recomputes the selection by
/// exhaustive scan over the same candidates.
pub fn oracle_check(scenario: &Scenario, opts: &RunOptions) -> Result<Vec<OracleRow>> {
    let config = opts.engine_config(scenario);
    let e_min = config.e_min;
    let adapt_policy = config.policy;
    let (mut state, _) =
        EngineState::initialize(scenario.model.clone(), config, &scenario.initial_phase)?;
    let mut rows = vec![OracleRow {
        label: scenario.initial_phase.clone(),
        candidates: state.candidates.len(),
        engine: position(&state),
        oracle: brute_force_select(
            &state.candidates.candidates,
            &state.context.energy,
            e_min,
            OraclePolicy::Dispersion,
        ),
    }];
    for event in &scenario.events {
        let previous = state.deployed.clone();
        state = state
            .step(event)
            .map_err(|e| anyhow!("phase {}: {e}", event.label))?
            .state;
        let policy = match adapt_policy {
            PolicyKind::Dispersion => OraclePolicy::Dispersion,
            PolicyKind::Distance => OraclePolicy::Distance(&previous),
        };
        rows.push(OracleRow {
            label: event.label.clone(),
            candidates: state.candidates.len(),
            engine: position(&state),
            oracle: brute_force_select(
                &state.candidates.candidates,
                &state.context.energy,
                e_min,
                policy,
            ),
        });
    }
    Ok(rows)
}

/// Reads and parses a scenario file, naming the path in errors.
pub fn load(path: &Path) -> Result<Scenario> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    mission_mesh::parse_scenario(&text).with_context(|| format!("{}", path.display()))
}
