mod common;

use common::{arb_model, ip, ROLES};
use mission_mesh::{ApplicationModel, Device};
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Add {
        role: usize,
        energy: u32,
        ssid: usize,
        group: usize,
    },
    Energy {
        target: usize,
        energy: u32,
    },
    Remove {
        target: usize,
    },
    Role {
        target: usize,
        role: usize,
    },
    Connect {
        a: usize,
        b: usize,
    },
    Disconnect {
        a: usize,
        b: usize,
    },
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0..5usize, 0..=100u32, 0..3usize, 0..2usize).prop_map(|(role, energy, ssid, group)| {
            Op::Add {
                role,
                energy,
                ssid,
                group,
            }
        }),
        (0..12usize, 0..=120u32).prop_map(|(target, energy)| Op::Energy { target, energy }),
        (0..12usize).prop_map(|target| Op::Remove { target }),
        (0..12usize, 0..5usize).prop_map(|(target, role)| Op::Role { target, role }),
        (0..12usize, 0..12usize).prop_map(|(a, b)| Op::Connect { a, b }),
        (0..12usize, 0..12usize).prop_map(|(a, b)| Op::Disconnect { a, b }),
    ]
}

fn run(model: &ApplicationModel, op: &Op, next_id: &mut usize) -> Option<ApplicationModel> {
    let actor = |i: usize| format!("a{i}");
    match *op {
        Op::Add {
            role,
            energy,
            ssid,
            group,
        } => {
            *next_id += 1;
            model
                .add_actor(
                    &actor(*next_id + 100),
                    ROLES[role],
                    Device::new(ip(*next_id + 100), energy, format!("net{ssid}")),
                    &format!("g{group}"),
                )
                .ok()
        }
        Op::Energy { target, energy } => model.set_energy(&ip(target), energy).ok(),
        Op::Remove { target } => model.remove_actor(&actor(target)).ok(),
        Op::Role { target, role } => model.set_role(&actor(target), ROLES[role]).ok(),
        Op::Connect { a, b } => model.connect(&ip(a), &ip(b)).ok(),
        Op::Disconnect { a, b } => model.disconnect(&ip(a), &ip(b)).ok(),
    }
}

proptest! {
    #[test]
    fn operation_sequences_keep_the_model_valid(
        start in arb_model(8),
        ops in prop::collection::vec(op(), 0..30),
    ) {
        prop_assert!(start.validate().is_empty());
        let mut model = start;
        let mut next_id = 0;
        for op in &ops {
            if let Some(next) = run(&model, op, &mut next_id) {
                model = next;
            }
            prop_assert!(model.validate().is_empty(), "{:?} after {:?}", model.validate(), op);
        }
    }

    #[test]
    fn signal_is_symmetric(model in arb_model(8)) {
        for a in model.devices.keys() {
            for b in model.devices.keys() {
                prop_assert_eq!(model.has_signal_with(a, b), model.has_signal_with(b, a));
            }
        }
    }

    #[test]
    fn energy_round_trip(model in arb_model(8), target in 0..8usize, energy in 0..=100u32) {
        let Some(original) = model.devices.get(&ip(target)).map(|d| d.energy) else {
            return Ok(());
        };
        let back = model
            .set_energy(&ip(target), energy)
            .unwrap()
            .set_energy(&ip(target), original)
            .unwrap();
        prop_assert_eq!(back, model);
    }

    #[test]
    fn out_of_range_energy_is_rejected(model in arb_model(4), energy in 101..1000u32) {
        if let Some(ip) = model.devices.keys().next() {
            prop_assert!(model.set_energy(ip, energy).is_err());
        }
    }
}
