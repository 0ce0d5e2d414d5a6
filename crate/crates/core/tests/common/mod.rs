#![allow(dead_code)]

use mission_mesh::{ApplicationModel, Device, InvestigatorKind, Role};
use proptest::prelude::*;

pub const ROLES: [Role; 5] = [
    Role::Supervisor,
    Role::FiremanCoordinator,
    Role::RobotCoordinator,
    Role::Investigator(InvestigatorKind::Fireman),
    Role::Investigator(InvestigatorKind::Robot),
];

pub fn ip(i: usize) -> String {
    format!("10.0.0.{}", i + 1)
}

/// (role, energy, ssid, group) per actor plus a link bit per unordered pair.
pub type ModelShape = (Vec<(usize, u32, usize, usize)>, Vec<bool>);

pub fn build(shape: &ModelShape) -> ApplicationModel {
    let (actors, links) = shape;
    let mut model = ApplicationModel::new();
    for (i, &(role, energy, ssid, group)) in actors.iter().enumerate() {
        model = model
            .add_actor(
                &format!("a{i}"),
                ROLES[role],
                Device::new(ip(i), energy, format!("net{ssid}")),
                &format!("g{group}"),
            )
            .unwrap();
    }
    let mut bit = links.iter();
    for i in 0..actors.len() {
        for j in i + 1..actors.len() {
            if *bit.next().unwrap_or(&false) {
                model = model.connect(&ip(i), &ip(j)).unwrap();
            }
        }
    }
    model
}

pub fn model_shape(max_actors: usize) -> impl Strategy<Value = ModelShape> {
    (
        prop::collection::vec(
            (0..5usize, 0..=100u32, 0..3usize, 0..2usize),
            0..=max_actors,
        ),
        prop::collection::vec(any::<bool>(), max_actors * max_actors / 2),
    )
}

pub fn arb_model(max_actors: usize) -> impl Strategy<Value = ApplicationModel> {
    model_shape(max_actors).prop_map(|s| build(&s))
}

use mission_mesh::{CollabKind, CollabVertex, CollaborationGraph, DataType, Flow};

/// A hand-built collaboration: up to four hub-and-spoke sessions over up to
/// eight devices, each session with two to four participants.
#[derive(Debug, Clone)]
pub struct Instance {
    pub model: ApplicationModel,
    pub collab: CollaborationGraph,
}

pub fn star_session(graph: &mut CollaborationGraph, session: &str, hub: usize, spokes: &[usize]) {
    let actor = |i: usize| format!("a{i}");
    let sender = |i: usize| format!("snd:{session}:{}", actor(i));
    let receiver = |dst: usize, src: usize| format!("rcv:{session}:{}:{}", actor(dst), actor(src));
    let mut add = |id: String, kind, device: usize| {
        graph.add_vertex(CollabVertex {
            id,
            kind,
            ip: ip(device),
            data_type: DataType::Audio,
            session: session.to_owned(),
        })
    };
    add(sender(hub), CollabKind::Sender, hub);
    for &s in spokes {
        add(sender(s), CollabKind::Sender, s);
        add(receiver(s, hub), CollabKind::Receiver, s);
        add(receiver(hub, s), CollabKind::Receiver, hub);
    }
    for &s in spokes {
        for (src, dst) in [(hub, s), (s, hub)] {
            graph.add_flow(Flow {
                id: format!("{session}/{}->{}", ip(src), ip(dst)),
                data_type: DataType::Audio,
                source: sender(src),
                destination: receiver(dst, src),
                session: session.to_owned(),
            });
        }
    }
}

pub fn arb_instance() -> impl Strategy<Value = Instance> {
    (2..=8usize)
        .prop_flat_map(|devices| {
            (
                Just(devices),
                prop::collection::vec(0..=100u32, devices),
                prop::collection::vec(
                    prop::sample::subsequence((0..devices).collect::<Vec<_>>(), 2..=4.min(devices)),
                    1..=4,
                ),
            )
        })
        .prop_map(|(devices, energies, sessions)| {
            let mut model = ApplicationModel::new();
            for (i, energy) in energies.iter().enumerate().take(devices) {
                model = model
                    .add_actor(
                        &format!("a{i}"),
                        ROLES[3],
                        Device::new(ip(i), *energy, "net"),
                        "g",
                    )
                    .unwrap();
            }
            let mut collab = CollaborationGraph::new();
            for (k, members) in sessions.iter().enumerate() {
                star_session(&mut collab, &format!("s{k}"), members[0], &members[1..]);
            }
            Instance { model, collab }
        })
}

use mission_mesh::{MiddlewareGraph, MwKind, MwVertex};

const TYPES: [DataType; 3] = [DataType::Audio, DataType::Text, DataType::Video];

/// Valid middleware graphs over a small shared id pool, so two draws
/// overlap: kept, moved, retyped, added and removed components all occur.
pub fn arb_middleware() -> impl Strategy<Value = MiddlewareGraph> {
    prop::collection::vec(
        (
            prop::collection::vec(prop::option::of((any::<bool>(), 0..3usize, 0..6usize)), 4),
            0..6usize,
        ),
        3,
    )
    .prop_map(|sessions| {
        let mut vertices = Vec::new();
        for (k, (slots, cm_ip)) in sessions.iter().enumerate() {
            let session = format!("s{k}");
            let mut used = false;
            for (j, slot) in slots.iter().enumerate() {
                let Some((producer, dt, host)) = *slot else {
                    continue;
                };
                used = true;
                vertices.push(MwVertex {
                    id: format!("c:{k}:{j}"),
                    kind: if producer {
                        MwKind::EventProducer
                    } else {
                        MwKind::EventConsumer
                    },
                    data_type: TYPES[dt],
                    session: session.clone(),
                    ip: ip(host),
                });
            }
            if used {
                vertices.push(MwVertex {
                    id: format!("cm:{session}"),
                    kind: MwKind::ChannelManager,
                    data_type: DataType::Audio,
                    session,
                    ip: ip(*cm_ip),
                });
            }
        }
        MiddlewareGraph::from_vertices(vertices)
    })
}
