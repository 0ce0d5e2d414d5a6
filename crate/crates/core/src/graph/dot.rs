//! Graphviz export for eyeballing snapshots. Same ordering as GraphML.

use std::fmt::Write;

use super::{CollabKind, CollaborationGraph, MiddlewareGraph, MwKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn collaboration_to_dot(graph: &CollaborationGraph) -> String {
    let mut out = String::from("digraph collaboration {\n  rankdir=LR;\n");
    for v in graph.vertices.values() {
        let shape = match v.kind {
            CollabKind::Sender => "box",
            CollabKind::Receiver => "ellipse",
        };
        let label = format!("{}\\n{} {}\\n{}", v.kind, v.data_type, v.session, v.ip);
        let _ = writeln!(
            out,
            "  {} [shape={shape}, label={}];",
            quote(&v.id),
            quote(&label)
        );
    }
    for f in graph.flows.values() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&f.source),
            quote(&f.destination),
            quote(f.data_type.as_str())
        );
    }
    out.push_str("}\n");
    out
}

pub fn middleware_to_dot(graph: &MiddlewareGraph) -> String {
    let mut out = String::from("digraph middleware {\n  rankdir=LR;\n");
    for v in graph.vertices.values() {
        let shape = match v.kind {
            MwKind::ChannelManager => "doubleoctagon",
            MwKind::EventProducer => "box",
            MwKind::EventConsumer => "ellipse",
        };
        let label = format!("{}\\n{}\\n{}", v.kind, v.session, v.ip);
        let _ = writeln!(
            out,
            "  {} [shape={shape}, label={}];",
            quote(&v.id),
            quote(&label)
        );
    }
    let mut edges: Vec<_> = graph.edges.iter().collect();
    edges.sort_by_key(|e| e.id());
    for e in edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&e.from),
            quote(&e.to),
            quote(e.kind.as_str())
        );
    }
    out.push_str("}\n");
    out
}
