mod common;

use common::{arb_instance, Instance};
use mission_mesh::oracle::{brute_force_select, OraclePolicy};
use mission_mesh::select::relative_cost;
use mission_mesh::{context_adaptation, refine, select, ContextSnapshot, Policy, DEFAULT_E_MIN};
use proptest::prelude::*;
use proptest::sample::Index;

fn policy_pair<'a>(
    dispersion: bool,
    current: &'a mission_mesh::MiddlewareGraph,
) -> (Policy<'a>, OraclePolicy<'a>) {
    if dispersion {
        (Policy::Dispersion, OraclePolicy::Dispersion)
    } else {
        (
            Policy::Distance { current },
            OraclePolicy::Distance(current),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn selected_score_is_maximal(inst in arb_instance(), pick in any::<Index>(), dispersion: bool) {
        let set = refine(&inst.collab, &inst.model).unwrap();
        let ctx = ContextSnapshot::from_model(&inst.model);
        let current = &set.candidates[pick.index(set.len())];
        let (policy, _) = policy_pair(dispersion, current);
        if let Ok(chosen) = select(&set, &ctx, policy, DEFAULT_E_MIN) {
            prop_assert!(chosen.score.is_feasible());
            for c in set.iter() {
                prop_assert!(chosen.score >= context_adaptation(c, &ctx, DEFAULT_E_MIN).unwrap());
            }
        }
    }

    #[test]
    fn distance_choice_is_cheapest_among_best(inst in arb_instance(), pick in any::<Index>()) {
        let set = refine(&inst.collab, &inst.model).unwrap();
        let ctx = ContextSnapshot::from_model(&inst.model);
        let current = &set.candidates[pick.index(set.len())];
        if let Ok(chosen) = select(&set, &ctx, Policy::Distance { current }, DEFAULT_E_MIN) {
            let cost = relative_cost(current, chosen.graph);
            for c in set.iter() {
                if context_adaptation(c, &ctx, DEFAULT_E_MIN).unwrap() == chosen.score {
                    prop_assert!(relative_cost(current, c) >= cost);
                }
            }
        }
    }

    #[test]
    fn agrees_with_the_oracle(
        inst in arb_instance(),
        pick in any::<Index>(),
        dispersion: bool,
        e_min in 0..=100u32,
    ) {
        let Instance { model, collab } = inst;
        let set = refine(&collab, &model).unwrap();
        let ctx = ContextSnapshot::from_model(&model);
        let current = &set.candidates[pick.index(set.len())];
        let (policy, oracle_policy) = policy_pair(dispersion, current);
        let ours = select(&set, &ctx, policy, e_min).ok().map(|s| s.index);
        let theirs = brute_force_select(&set.candidates, &ctx.energy, e_min, oracle_policy);
        prop_assert_eq!(ours, theirs);
    }

    #[test]
    fn uniform_energy_shift_keeps_the_choice(
        inst in arb_instance(),
        shift in 1..=20u32,
        pick in any::<Index>(),
        dispersion: bool,
    ) {
        // keep every device above the threshold and clear of the 100 cap
        let mut model = inst.model.clone();
        for (ip, d) in &inst.model.devices {
            let e = DEFAULT_E_MIN + d.energy % (100 - shift - DEFAULT_E_MIN + 1);
            model = model.set_energy(ip, e).unwrap();
        }
        let mut shifted = model.clone();
        for (ip, d) in &model.devices {
            shifted = shifted.set_energy(ip, d.energy + shift).unwrap();
        }
        let set = refine(&inst.collab, &model).unwrap();
        let current = &set.candidates[pick.index(set.len())];
        let (policy, _) = policy_pair(dispersion, current);
        let before = select(&set, &ContextSnapshot::from_model(&model), policy, DEFAULT_E_MIN)
            .ok()
            .map(|s| s.index);
        let after = select(&set, &ContextSnapshot::from_model(&shifted), policy, DEFAULT_E_MIN)
            .ok()
            .map(|s| s.index);
        prop_assert_eq!(before, after);
    }
}
