//! GraphML encoding of both graph levels.
//!
//! Nodes carry five data keys (`id`, `kind`, `datatype`, `session`, `ip`).
//! Collaboration edges are flows and carry `e_datatype` and `e_session`;
//! middleware edges carry `e_kind` (`push` or `pull`). The `<graph>` id names
//! the level. Nodes and edges are written sorted by id, so equal graphs give
//! identical bytes.

use std::collections::BTreeMap;

use quick_xml::events::{BytesDecl, BytesText, Event};
use quick_xml::{Reader, Writer};
use thiserror::Error;

use super::{
    CollabKind, CollabVertex, CollaborationGraph, DataType, Flow, InvariantError, LinkKind,
    MiddlewareGraph, MwEdge, MwKind, MwVertex,
};

const NS: &str = "http://graphml.graphdrawing.org/xmlns";
const NODE_KEYS: [&str; 5] = ["id", "kind", "datatype", "session", "ip"];
const COLLAB_EDGE_KEYS: [(&str, &str); 2] = [("e_datatype", "datatype"), ("e_session", "session")];
const MW_EDGE_KEYS: [(&str, &str); 1] = [("e_kind", "kind")];

const COLLABORATION: &str = "collaboration";
const MIDDLEWARE: &str = "middleware";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphMlError {
    #[error("malformed GraphML at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// A required key or attribute is absent; carries its name.
    #[error("missing `{0}`")]
    Schema(String),
    #[error("bad value `{value}` for `{key}`")]
    Value { key: String, value: String },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Either level, as found in a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelGraph {
    Collaboration(CollaborationGraph),
    Middleware(MiddlewareGraph),
}

struct Element {
    id: String,
    source: Option<String>,
    target: Option<String>,
    data: BTreeMap<String, String>,
}

impl Element {
    fn key(&self, key: &str) -> Result<&str, GraphMlError> {
        self.data
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| GraphMlError::Schema(key.to_owned()))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T, GraphMlError> {
        let raw = self.key(key)?;
        raw.parse().map_err(|_| GraphMlError::Value {
            key: key.to_owned(),
            value: raw.to_owned(),
        })
    }
}

pub fn collaboration_to_graphml(graph: &CollaborationGraph) -> String {
    let nodes = graph.vertices.values().map(|v| {
        (
            v.id.as_str(),
            [
                v.id.as_str(),
                v.kind.as_str(),
                v.data_type.as_str(),
                &v.session,
                &v.ip,
            ],
        )
    });
    let edges = graph.flows.values().map(|f| {
        (
            f.id.clone(),
            f.source.as_str(),
            f.destination.as_str(),
            vec![
                ("e_datatype", f.data_type.as_str()),
                ("e_session", f.session.as_str()),
            ],
        )
    });
    render(COLLABORATION, &COLLAB_EDGE_KEYS, nodes, edges.collect())
}

pub fn middleware_to_graphml(graph: &MiddlewareGraph) -> String {
    let nodes = graph.vertices.values().map(|v| {
        (
            v.id.as_str(),
            [
                v.id.as_str(),
                v.kind.as_str(),
                v.data_type.as_str(),
                &v.session,
                &v.ip,
            ],
        )
    });
    let mut edges: Vec<_> = graph
        .edges
        .iter()
        .map(|e| {
            (
                e.id(),
                e.from.as_str(),
                e.to.as_str(),
                vec![("e_kind", e.kind.as_str())],
            )
        })
        .collect();
    edges.sort_by(|a, b| a.0.cmp(&b.0));
    render(MIDDLEWARE, &MW_EDGE_KEYS, nodes, edges)
}

type EdgeRow<'a> = (String, &'a str, &'a str, Vec<(&'static str, &'a str)>);

fn render<'a>(
    level: &str,
    edge_keys: &[(&str, &str)],
    nodes: impl Iterator<Item = (&'a str, [&'a str; 5])>,
    edges: Vec<EdgeRow<'a>>,
) -> String {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    write_document(&mut w, level, edge_keys, nodes, edges).expect("writing to a Vec cannot fail");
    let mut out = String::from_utf8(w.into_inner()).expect("quick-xml writes utf-8");
    out.push('\n');
    out
}

fn write_document<'a>(
    w: &mut Writer<Vec<u8>>,
    level: &str,
    edge_keys: &[(&str, &str)],
    nodes: impl Iterator<Item = (&'a str, [&'a str; 5])>,
    edges: Vec<EdgeRow<'a>>,
) -> quick_xml::Result<()> {
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    w.create_element("graphml")
        .with_attribute(("xmlns", NS))
        .write_inner_content(|w| {
            for key in NODE_KEYS {
                w.create_element("key")
                    .with_attributes([
                        ("id", key),
                        ("for", "node"),
                        ("attr.name", key),
                        ("attr.type", "string"),
                    ])
                    .write_empty()?;
            }
            for (id, name) in edge_keys {
                w.create_element("key")
                    .with_attributes([
                        ("id", *id),
                        ("for", "edge"),
                        ("attr.name", *name),
                        ("attr.type", "string"),
                    ])
                    .write_empty()?;
            }
            w.create_element("graph")
                .with_attributes([("id", level), ("edgedefault", "directed")])
                .write_inner_content(|w| {
                    for (id, values) in nodes {
                        w.create_element("node")
                            .with_attribute(("id", id))
                            .write_inner_content(|w| {
                                for (key, value) in NODE_KEYS.iter().zip(values) {
                                    write_data(w, key, value)?;
                                }
                                Ok::<(), quick_xml::Error>(())
                            })?;
                    }
                    for (id, source, target, data) in &edges {
                        w.create_element("edge")
                            .with_attributes([
                                ("id", id.as_str()),
                                ("source", *source),
                                ("target", *target),
                            ])
                            .write_inner_content(|w| {
                                for (key, value) in data {
                                    write_data(w, key, value)?;
                                }
                                Ok::<(), quick_xml::Error>(())
                            })?;
                    }
                    Ok::<(), quick_xml::Error>(())
                })?;
            Ok::<(), quick_xml::Error>(())
        })?;
    Ok(())
}

fn write_data(w: &mut Writer<Vec<u8>>, key: &str, value: &str) -> quick_xml::Result<()> {
    w.create_element("data")
        .with_attribute(("key", key))
        .write_text_content(BytesText::new(value))?;
    Ok(())
}

/// Parses either level; the `<graph>` id selects which.
pub fn from_graphml(text: &str) -> Result<LevelGraph, GraphMlError> {
    let doc = read_document(text)?;
    match doc.level.as_str() {
        COLLABORATION => build_collaboration(doc).map(LevelGraph::Collaboration),
        MIDDLEWARE => build_middleware(doc).map(LevelGraph::Middleware),
        other => Err(GraphMlError::Value {
            key: "graph".into(),
            value: other.into(),
        }),
    }
}

pub fn collaboration_from_graphml(text: &str) -> Result<CollaborationGraph, GraphMlError> {
    match from_graphml(text)? {
        LevelGraph::Collaboration(g) => Ok(g),
        LevelGraph::Middleware(_) => Err(GraphMlError::Value {
            key: "graph".into(),
            value: MIDDLEWARE.into(),
        }),
    }
}

pub fn middleware_from_graphml(text: &str) -> Result<MiddlewareGraph, GraphMlError> {
    match from_graphml(text)? {
        LevelGraph::Middleware(g) => Ok(g),
        LevelGraph::Collaboration(_) => Err(GraphMlError::Value {
            key: "graph".into(),
            value: COLLABORATION.into(),
        }),
    }
}

fn build_collaboration(doc: Document) -> Result<CollaborationGraph, GraphMlError> {
    let mut graph = CollaborationGraph::new();
    for node in doc.nodes {
        check_node_id(&node)?;
        let v = CollabVertex {
            id: node.id.clone(),
            kind: node.parsed::<CollabKind>("kind")?,
            ip: node.key("ip")?.to_owned(),
            data_type: node.parsed::<DataType>("datatype")?,
            session: node.key("session")?.to_owned(),
        };
        if graph.vertices.insert(v.id.clone(), v).is_some() {
            return Err(InvariantError::new("unique-id", node.id).into());
        }
    }
    for edge in doc.edges {
        let flow = Flow {
            id: edge.id.clone(),
            data_type: edge.parsed::<DataType>("e_datatype")?,
            source: edge
                .source
                .clone()
                .ok_or_else(|| GraphMlError::Schema("source".into()))?,
            destination: edge
                .target
                .clone()
                .ok_or_else(|| GraphMlError::Schema("target".into()))?,
            session: edge.key("e_session")?.to_owned(),
        };
        if graph.flows.insert(flow.id.clone(), flow).is_some() {
            return Err(InvariantError::new("unique-id", edge.id).into());
        }
    }
    graph.validate()?;
    Ok(graph)
}

fn build_middleware(doc: Document) -> Result<MiddlewareGraph, GraphMlError> {
    let mut graph = MiddlewareGraph::new();
    for node in doc.nodes {
        check_node_id(&node)?;
        let v = MwVertex {
            id: node.id.clone(),
            kind: node.parsed::<MwKind>("kind")?,
            data_type: node.parsed::<DataType>("datatype")?,
            session: node.key("session")?.to_owned(),
            ip: node.key("ip")?.to_owned(),
        };
        if graph.vertices.insert(v.id.clone(), v).is_some() {
            return Err(InvariantError::new("unique-id", node.id).into());
        }
    }
    for edge in doc.edges {
        let e = MwEdge {
            from: edge
                .source
                .clone()
                .ok_or_else(|| GraphMlError::Schema("source".into()))?,
            to: edge
                .target
                .clone()
                .ok_or_else(|| GraphMlError::Schema("target".into()))?,
            kind: edge.parsed::<LinkKind>("e_kind")?,
        };
        if !graph.edges.insert(e) {
            return Err(InvariantError::new("unique-id", edge.id).into());
        }
    }
    graph.validate()?;
    Ok(graph)
}

fn check_node_id(node: &Element) -> Result<(), GraphMlError> {
    let id = node.key("id")?;
    if id != node.id {
        return Err(GraphMlError::Value {
            key: "id".into(),
            value: id.to_owned(),
        });
    }
    Ok(())
}

struct Document {
    level: String,
    nodes: Vec<Element>,
    edges: Vec<Element>,
}

enum Open {
    Node,
    Edge,
}

fn read_document(text: &str) -> Result<Document, GraphMlError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let parse_err = |reader: &Reader<&[u8]>, message: String| {
        let (line, column) = line_col(text, reader.error_position() as usize);
        GraphMlError::Parse {
            line,
            column,
            message,
        }
    };

    let mut level: Option<String> = None;
    let mut current: Option<(Open, Element)> = None;
    let mut data_key: Option<String> = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut saw_root = false;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| parse_err(&reader, e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let mut attrs = BTreeMap::new();
                for attr in e.attributes() {
                    let attr = attr.map_err(|err| parse_err(&reader, err.to_string()))?;
                    let value = attr
                        .unescape_value()
                        .map_err(|err| parse_err(&reader, err.to_string()))?
                        .into_owned();
                    attrs.insert(
                        String::from_utf8_lossy(attr.key.as_ref()).into_owned(),
                        value,
                    );
                }
                match e.local_name().as_ref() {
                    b"graphml" => saw_root = true,
                    b"graph" => {
                        level = Some(
                            attrs
                                .remove("id")
                                .ok_or_else(|| GraphMlError::Schema("graph".into()))?,
                        )
                    }
                    tag @ (b"node" | b"edge") => {
                        let id = attrs
                            .remove("id")
                            .ok_or_else(|| GraphMlError::Schema("id".into()))?;
                        let el = Element {
                            id,
                            source: attrs.remove("source"),
                            target: attrs.remove("target"),
                            data: BTreeMap::new(),
                        };
                        let open = if tag == b"node" {
                            Open::Node
                        } else {
                            Open::Edge
                        };
                        if empty {
                            push_element(open, el, &mut nodes, &mut edges);
                        } else {
                            current = Some((open, el));
                        }
                    }
                    b"data" => {
                        let key = attrs
                            .remove("key")
                            .ok_or_else(|| GraphMlError::Schema("key".into()))?;
                        if let Some((_, el)) = current.as_mut() {
                            el.data.insert(key.clone(), String::new());
                        }
                        if !empty {
                            data_key = Some(key);
                        }
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let (Some(key), Some((_, el))) = (&data_key, current.as_mut()) {
                    let value = t
                        .unescape()
                        .map_err(|e| parse_err(&reader, e.to_string()))?;
                    el.data.insert(key.clone(), value.into_owned());
                }
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                b"data" => data_key = None,
                b"node" | b"edge" => {
                    if let Some((open, el)) = current.take() {
                        push_element(open, el, &mut nodes, &mut edges);
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_root {
        return Err(GraphMlError::Schema("graphml".into()));
    }
    let level = level.ok_or_else(|| GraphMlError::Schema("graph".into()))?;
    Ok(Document {
        level,
        nodes,
        edges,
    })
}

fn push_element(open: Open, el: Element, nodes: &mut Vec<Element>, edges: &mut Vec<Element>) {
    match open {
        Open::Node => nodes.push(el),
        Open::Edge => edges.push(el),
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = offset
        - before
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |p| p + 1)
        + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_mw() -> MiddlewareGraph {
        let v = |id: &str, kind, ip: &str| MwVertex {
            id: id.into(),
            kind,
            data_type: DataType::Audio,
            session: "s".into(),
            ip: ip.into(),
        };
        MiddlewareGraph::from_vertices([
            v("ep:s:a", MwKind::EventProducer, "10.0.0.1"),
            v("ec:s:b:a", MwKind::EventConsumer, "10.0.0.2"),
            v("cm:s", MwKind::ChannelManager, "10.0.0.1"),
        ])
    }

    #[test]
    fn empty_graph_is_valid_document() {
        let text = middleware_to_graphml(&MiddlewareGraph::new());
        assert!(!text.contains("<node"));
        assert_eq!(
            middleware_from_graphml(&text).unwrap(),
            MiddlewareGraph::new()
        );
        let text = collaboration_to_graphml(&CollaborationGraph::new());
        assert_eq!(
            collaboration_from_graphml(&text).unwrap(),
            CollaborationGraph::new()
        );
    }

    #[test]
    fn middleware_round_trip() {
        let g = small_mw();
        let text = middleware_to_graphml(&g);
        assert_eq!(middleware_from_graphml(&text).unwrap(), g);
        assert_eq!(text.matches("<node ").count(), 3);
        assert_eq!(text.matches("<edge ").count(), 2);
    }

    #[test]
    fn missing_session_key_is_schema_error() {
        let text = middleware_to_graphml(&small_mw());
        let broken = text.replacen("<data key=\"session\">s</data>", "", 1);
        assert_eq!(
            middleware_from_graphml(&broken).unwrap_err(),
            GraphMlError::Schema("session".into())
        );
    }

    #[test]
    fn two_cms_is_invariant_error() {
        let mut g = small_mw();
        let mut cm2 = g.vertices["cm:s"].clone();
        cm2.id = "cm:s2".into();
        g.vertices.insert(cm2.id.clone(), cm2);
        let text = middleware_to_graphml(&g);
        match middleware_from_graphml(&text).unwrap_err() {
            GraphMlError::Invariant(e) => assert_eq!(e.code, "one-CM-per-session"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_error_has_position() {
        let err = from_graphml("<graphml>\n  <graph id=\"middleware\">\n  </grap>\n</graphml>")
            .unwrap_err();
        match err {
            GraphMlError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn special_characters_are_escaped() {
        let mut g = CollaborationGraph::new();
        for (id, kind) in [("a<&>\"", CollabKind::Sender), ("b'", CollabKind::Receiver)] {
            g.add_vertex(CollabVertex {
                id: id.into(),
                kind,
                ip: "1".into(),
                data_type: DataType::Text,
                session: "s&t".into(),
            });
        }
        g.add_flow(Flow {
            id: "s&t/1->1".into(),
            data_type: DataType::Text,
            source: "a<&>\"".into(),
            destination: "b'".into(),
            session: "s&t".into(),
        });
        let text = collaboration_to_graphml(&g);
        assert_eq!(collaboration_from_graphml(&text).unwrap(), g);
    }
}
