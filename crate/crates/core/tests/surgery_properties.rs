mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{
    census, census_of_edge, multiset_difference, random_block, random_chain, random_edge, random_flip,
    random_pairing, random_state, rng, Census,
};
use stablegc::divisor::EdgeId;
use stablegc::family::{build_family, FamilySpec};
use stablegc::report::invariants_report;
use stablegc::scalar;
use stablegc::surgery::{self, ManifoldState, SumPairing, SurgeryError};

fn euler_holds(state: &ManifoldState) -> bool {
    state.euler == 2 - 2 * state.b1 + state.b2plus + state.b2minus
}

/// One random transition, with the expected change in invariants checked
/// against plain arithmetic on the inputs.
fn step(rng: &mut ChaCha8Rng, state: ManifoldState) -> ManifoldState {
    let points = state.graph.crossing_count();
    match rng.gen_range(0..5) {
        0 if points > 0 => {
            let other = random_block(rng);
            let (p, q) = (random_edge(rng, &state), random_edge(rng, &other));
            let out = surgery::connected_sum(&state, p, &other, q, random_pairing(rng)).unwrap();
            assert_eq!(out.euler, state.euler + other.euler - 2);
            assert_eq!(out.b2plus, state.b2plus + other.b2plus);
            assert_eq!(out.graph.crossing_count(), points + other.graph.crossing_count() - 2);
            out
        }
        1 if points >= 2 => {
            let mut pick = state.graph.edges().to_vec();
            pick.shuffle(rng);
            let out = surgery::self_connected_sum(&state, pick[0].id, pick[1].id, random_pairing(rng)).unwrap();
            assert_eq!((out.euler, out.b1), (state.euler - 2, state.b1 + 1));
            assert_eq!(out.graph.crossing_count(), points - 2);
            out
        }
        2 if points > 0 => {
            let e = random_edge(rng, &state);
            let out = surgery::smooth_crossing(&state, e).unwrap();
            assert_eq!((out.euler, out.b1, out.b2plus, out.b2minus), (state.euler, state.b1, state.b2plus, state.b2minus));
            assert_eq!(out.graph.crossing_count(), points - 1);
            out
        }
        3 => random_flip(rng, &state),
        _ => {
            let factor = scalar::rational(rng.gen_range(1..5), rng.gen_range(1..5));
            let scaled = surgery::scale(&state, &factor).unwrap();
            let back = surgery::scale(&scaled, &(scalar::int(1) / factor)).unwrap();
            assert_eq!(back.graph, state.graph);
            state
        }
    }
}

#[test]
fn euler_bookkeeping_after_every_step() {
    let mut rng = rng(2024);
    for _ in 0..200 {
        let mut state = random_block(&mut rng);
        assert!(euler_holds(&state));
        for _ in 0..rng.gen_range(1..=15) {
            state = step(&mut rng, state);
            assert!(euler_holds(&state), "{}", state.label);
            assert_eq!(state.signature(), state.b2plus - state.b2minus);
            assert!(state.graph.validate().is_ok());
        }
    }
}

#[test]
fn canonical_chain_point_counts() {
    for n in 0..=8u32 {
        for m in 0..=8u32 {
            let hat = build_family(&FamilySpec::xhat(n, m, 0)).unwrap();
            assert_eq!(hat.graph.crossing_count(), (n + m + 2) as usize, "n={n} m={m}");
        }
        let x = build_family(&FamilySpec::x(n, 0)).unwrap();
        let expected = if n == 0 { 2 } else { 2 * n as usize + 2 };
        assert_eq!(x.graph.crossing_count(), expected, "n={n}");
    }
}

#[test]
fn straight_sum_parity_against_census() {
    let mut rng = rng(31337);
    let mut checked = 0;
    for _ in 0..600 {
        let blocks = rng.gen_range(1..4);
        let left = random_chain(&mut rng, blocks);
        let blocks = rng.gen_range(1..4);
        let right = random_chain(&mut rng, blocks);
        let (p, q) = (random_edge(&mut rng, &left), random_edge(&mut rng, &right));
        let (cp, cq) = (census_of_edge(&left.graph, p), census_of_edge(&right.graph, q));
        let out = surgery::connected_sum(&left, p, &right, q, SumPairing::Straight).unwrap();
        let mut untouched: Vec<Census> = census(&left.graph);
        untouched.remove(untouched.iter().position(|c| *c == cp).unwrap());
        let mut rest = census(&right.graph);
        rest.remove(rest.iter().position(|c| *c == cq).unwrap());
        untouched.extend(rest);
        let merged = multiset_difference(&census(&out.graph), &untouched).unwrap();
        assert_eq!(merged.len(), 1);
        let product: i8 = merged.iter().map(Census::holonomy).product();
        assert_eq!(product, -cp.holonomy() * cq.holonomy());
        if merged[0].edges > 0 {
            assert_eq!(merged[0].parity, Some(-cp.parity.unwrap() * cq.parity.unwrap()));
            checked += 1;
        }
    }
    assert!(checked > 400);
}

/// Swapped pairings carry no stated rule; the engine's answer must still agree
/// with a recount of the raw edge indices.
#[test]
fn swapped_pairing_recount() {
    let mut rng = rng(99);
    for _ in 0..300 {
        let steps = rng.gen_range(1..8);
        let state = random_state(&mut rng, steps);
        if state.graph.crossing_count() < 2 {
            continue;
        }
        let mut pick = state.graph.edges().to_vec();
        pick.shuffle(&mut rng);
        let out = surgery::self_connected_sum(&state, pick[0].id, pick[1].id, SumPairing::Swapped).unwrap();
        let components = out.graph.components();
        let mut engine: Vec<(usize, Option<i8>)> = (0..components.len())
            .map(|i| {
                let parity = out.graph.parity(stablegc::divisor::ComponentId(i)).unwrap();
                (components[i].edges.len(), parity.map(|s| s.to_i8()))
            })
            .collect();
        let mut oracle: Vec<(usize, Option<i8>)> = census(&out.graph).iter().map(|c| (c.edges, c.parity)).collect();
        engine.sort();
        oracle.sort();
        assert_eq!(engine, oracle);
    }
}

#[test]
fn single_smoothing_preserves_stability() {
    let mut rng = rng(4242);
    for _ in 0..150 {
        let steps = rng.gen_range(0..10);
        let state = random_state(&mut rng, steps);
        for e in state.graph.edges() {
            let out = surgery::smooth_crossing(&state, e.id).unwrap();
            assert_eq!(out.stable(), state.stable());
        }
        assert_eq!(surgery::smooth_all(&state).unwrap().stable(), state.stable());
    }
}

fn without_moduli(state: &ManifoldState) -> serde_json::Value {
    let mut report = serde_json::to_value(invariants_report(state)).unwrap();
    report["label"] = serde_json::Value::Null;
    for point in report["points"].as_array_mut().unwrap() {
        point["param_modulus"] = serde_json::Value::Null;
    }
    report
}

#[test]
fn scale_commutes_with_observables() {
    let mut rng = rng(50);
    for _ in 0..50 {
        let steps = rng.gen_range(0..12);
        let state = random_state(&mut rng, steps);
        let factor = scalar::rational(rng.gen_range(1..9), rng.gen_range(1..9));
        let scaled = surgery::scale(&state, &factor).unwrap();
        assert_eq!(without_moduli(&scaled), without_moduli(&state));
        for (a, b) in state.graph.edges().iter().zip(scaled.graph.edges()) {
            assert_eq!(&a.param_modulus * &factor, b.param_modulus);
        }
        // summing after scaling both sides matches scaling after summing
        if state.graph.crossing_count() > 0 {
            let other = random_block(&mut rng);
            let (p, q) = (random_edge(&mut rng, &state), random_edge(&mut rng, &other));
            let sum_then_scale =
                surgery::scale(&surgery::connected_sum(&state, p, &other, q, SumPairing::Straight).unwrap(), &factor)
                    .unwrap();
            let scaled_other = surgery::scale(&other, &factor).unwrap();
            let scale_then_sum = surgery::connected_sum(&scaled, p, &scaled_other, q, SumPairing::Straight).unwrap();
            assert_eq!(sum_then_scale.graph, scale_then_sum.graph);
        }
    }
    assert!(matches!(
        surgery::scale(&surgery::block_s4(), &scalar::int(0)),
        Err(SurgeryError::NonPositiveScale(_))
    ));
}

#[test]
fn precondition_errors() {
    let s4 = surgery::block_s4();
    let cp2 = surgery::block_cp2();
    let doubled = surgery::scale(&cp2, &scalar::int(2)).unwrap();
    assert!(matches!(
        surgery::connected_sum(&s4, EdgeId(1), &doubled, EdgeId(1), SumPairing::Straight),
        Err(SurgeryError::ParameterMismatch { .. })
    ));
    assert!(matches!(
        surgery::connected_sum(&s4, EdgeId(1), &s4, EdgeId(2), SumPairing::Straight),
        Err(SurgeryError::SameState)
    ));
    assert_eq!(
        surgery::self_connected_sum(&cp2, EdgeId(2), EdgeId(2), SumPairing::Straight),
        Err(SurgeryError::SameEdge(EdgeId(2)))
    );
    assert!(matches!(
        surgery::connected_sum(&s4, EdgeId(9), &cp2, EdgeId(1), SumPairing::Straight),
        Err(SurgeryError::Graph(_))
    ));
    let not_lc = ManifoldState { locally_complex: false, ..cp2.clone() };
    assert_eq!(surgery::smooth_crossing(&not_lc, EdgeId(1)), Err(SurgeryError::NotLocallyComplex));
    assert_eq!(
        surgery::connected_sum(&not_lc, EdgeId(1), &s4, EdgeId(1), SumPairing::Straight),
        Err(SurgeryError::NotLocallyComplex)
    );
}
