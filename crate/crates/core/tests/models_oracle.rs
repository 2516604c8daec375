// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

use oqs_core::lindblad::{exact_step_channel, propagate_exact, propagate_exact_grid, rk4_trajectory};
use oqs_core::models::*;
use oqs_core::solvers::purified_trajectory;

fn all_models() -> Vec<ModelSpec> {
    vec![
        amplitude_damping_model(1.0, 0.0).unwrap(),
        dephasing_model(0.5).unwrap(),
        dissipative_tfim_model(2, 1.0, 0.5, 0.2).unwrap(),
        exciton_transfer_model(&ExcitonParams::chain(3)).unwrap(),
        radical_pair_model(0.5, 1.0, 1.0, 1.0).unwrap(),
        exchange_purification_model(0.5, 1.0, 1.0).unwrap(),
        spin_boson_model(1.0, 0.5, 0.2, 0.1).unwrap(),
    ]
}

#[test]
fn names_match_the_registry() {
    let names: Vec<String> = all_models().into_iter().map(|m| m.name).collect();
    assert_eq!(names, MODEL_NAMES);
}

#[test]
fn rk4_tracks_the_exact_propagator_on_every_model() {
    for m in all_models() {
        let times: Vec<f64> = (0..=10).map(|k| 0.2 * k as f64).collect();
        let exact = propagate_exact_grid(&m.lindbladian, &m.initial_state, &times).unwrap();
        let rk4 = rk4_trajectory(&m.lindbladian, &m.initial_state, 2.0, 0.005, &times).unwrap();
        for (a, b) in exact.iter().zip(&rk4) {
            let (va, vb) = (m.measure(a).unwrap(), m.measure(b).unwrap());
            for (x, y) in va.iter().zip(&vb) {
                assert!((x - y).abs() < 1e-8, "{}: {x} vs {y}", m.name);
            }
        }
    }
}

#[test]
fn composed_step_channels_match_one_long_step() {
    for m in all_models() {
        let step = exact_step_channel(&m.lindbladian, 0.1).unwrap();
        let mut rho = m.initial_state.clone();
        for _ in 0..10 {
            rho = step.apply(&rho).unwrap();
        }
        let direct = propagate_exact(&m.lindbladian, &m.initial_state, 1.0).unwrap();
        assert!(rho.matrix().max_abs_diff(direct.matrix()) < 1e-9, "{}", m.name);
    }
}

#[test]
fn damping_from_the_excited_state() {
    let m = amplitude_damping_model(0.7, 0.0).unwrap();
    let obs = &m.observable("excited_population").unwrap().matrix;
    for k in 0..=20 {
        let t = 0.25 * k as f64;
        let rho = propagate_exact(&m.lindbladian, &m.initial_state, t).unwrap();
        assert!((rho.expectation(obs) - (-0.7 * t).exp()).abs() < 1e-10);
    }
}

#[test]
fn dephasing_keeps_populations_and_shrinks_coherence() {
    let m = dephasing_model(0.3).unwrap();
    let x = &m.observable("x_expectation").unwrap().matrix;
    let mut last = f64::INFINITY;
    for k in 0..=20 {
        let rho = propagate_exact(&m.lindbladian, &m.initial_state, 0.2 * k as f64).unwrap();
        let v = rho.expectation(x);
        assert!(v <= last + 1e-12 && v >= 0.0);
        last = v;
        let diag_gap = (rho.matrix()[(0, 0)] - m.initial_state.matrix()[(0, 0)]).norm();
        assert!(diag_gap < 1e-12);
    }
    assert!(last < 0.5);
}

#[test]
fn exchange_purification_reproduces_the_reduced_dynamics() {
    let m = exchange_purification_model(0.5, 1.0, 1.0).unwrap();
    let p = m.purification.as_ref().unwrap();
    let times: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
    let pure = purified_trajectory(&p.initial, &p.total_hamiltonian, &times).unwrap();
    let exact = propagate_exact_grid(&m.lindbladian, &m.initial_state, &times).unwrap();
    for (a, b) in pure.iter().zip(&exact) {
        // The purified trajectory is already reduced to the system.
        let sb = m.system_state(b).unwrap();
        assert!(a.matrix().max_abs_diff(sb.matrix()) < 1e-9);
    }
}

#[test]
fn radical_pair_yields_sum_to_the_lost_population() {
    let m = radical_pair_model(0.5, 1.0, 1.0, 1.0).unwrap();
    let s = &m.observable("singlet_yield").unwrap().matrix;
    let t = &m.observable("triplet_yield").unwrap().matrix;
    let rho = propagate_exact(&m.lindbladian, &m.initial_state, 40.0).unwrap();
    let (ys, yt) = (rho.expectation(s), rho.expectation(t));
    assert!((0.0..=1.0).contains(&ys) && (0.0..=1.0).contains(&yt));
    assert!((ys + yt - 1.0).abs() < 1e-6, "{ys} + {yt}");
}
