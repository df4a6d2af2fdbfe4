// SPDX-License-Identifier: Apache-2.0

//! Worked cases with closed-form or cross-propagator answers.

use std::f64::consts::{PI, SQRT_2};

use ncvalue::dynamics::{
    hamilton_operator_flow, heisenberg_propagate, leading_block_diff, linspace,
    picture_equivalence_check, realcoord_flow, schrodinger_propagate, Monomial,
    PolynomialHamiltonian, Rk4Config,
};
use ncvalue::models::{build_oscillator, pauli_system};
use ncvalue::tomography::{empirical_moments, estimate_expectation, sample_measurement_stream};
use ncvalue::{expectation, finite_difference_jet, ncvalue, star_product, ProjectiveState, C64};

fn quartic() -> PolynomialHamiltonian {
    PolynomialHamiltonian::new(vec![
        Monomial {
            coeff: 0.5,
            x_power: 0,
            p_power: 2,
        },
        Monomial {
            coeff: 0.25,
            x_power: 4,
            p_power: 0,
        },
    ])
}

fn quartic_gap(n: usize, t: f64, block: usize) -> f64 {
    let sys = build_oscillator(n, 1.0, 1.0, 1.0).unwrap();
    let ham = quartic();
    let h = ham.operator(&sys).unwrap();
    let times = [t];
    let flow = hamilton_operator_flow(&ham, &sys, &times, Rk4Config { dt: 1e-4 }).unwrap();
    let hx = heisenberg_propagate(&h, sys.x(), &times, 1.0).unwrap();
    let hp = heisenberg_propagate(&h, sys.p(), &times, 1.0).unwrap();
    let ops = &flow.points()[0];
    leading_block_diff(&ops.x, hx.points()[0].matrix(), block).max(leading_block_diff(
        &ops.p,
        hp.points()[0].matrix(),
        block,
    ))
}

#[test]
fn quartic_flow_matches_heisenberg_away_from_truncation() {
    // The truncated X^4 has norm of order N^2, so its top-level distortion
    // reaches the low Fock block quickly; compare where it has not arrived.
    assert!(quartic_gap(32, 0.01, 8) <= 1e-6);
    assert!(quartic_gap(64, 0.03, 8) <= 1e-6);
}

#[test]
fn quartic_flow_is_truncation_independent_on_low_block() {
    let ham = quartic();
    let times = [0.05];
    let x_at = |n: usize| {
        let sys = build_oscillator(n, 1.0, 1.0, 1.0).unwrap();
        hamilton_operator_flow(&ham, &sys, &times, Rk4Config { dt: 1e-3 })
            .unwrap()
            .points()[0]
            .x
            .clone()
    };
    assert!(leading_block_diff(&x_at(24), &x_at(48), 8) <= 1e-12);
}

#[test]
fn coherent_state_returns_after_one_period() {
    let sys = build_oscillator(32, 1.0, 1.0, 1.0).unwrap();
    let psi = sys.coherent_state(C64::new(1.0, 0.0)).unwrap();
    let traj = schrodinger_propagate(sys.h(), &psi, &[2.0 * PI], 1.0).unwrap();
    assert!(traj.last().unwrap().fidelity(&psi) >= 1.0 - 1e-6);
}

#[test]
fn realcoord_sigma_z_endpoint() {
    let pauli = pauli_system();
    let plus = ProjectiveState::from_real(&[1.0, 1.0]).unwrap();
    let times = [2.0 * PI];
    let rk = realcoord_flow(&pauli.z, &plus, &times, 1.0, Rk4Config { dt: 1e-3 }).unwrap();
    let exact = schrodinger_propagate(&pauli.z, &plus, &times, 1.0).unwrap();
    assert!(rk.last().unwrap().ray_distance(exact.last().unwrap()) <= 1e-8);
    assert!(rk.meta().max_norm_drift.unwrap() < 1e-12);
}

#[test]
fn realcoord_fock_state_is_periodic() {
    let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let one = sys.fock(1);
    let rk = realcoord_flow(sys.h(), &one, &[2.0 * PI], 1.0, Rk4Config { dt: 1e-3 }).unwrap();
    assert!(rk.last().unwrap().ray_distance(&one) <= 1e-6);
}

#[test]
fn pictures_agree_for_precessing_spin() {
    let pauli = pauli_system();
    let plus = ProjectiveState::from_real(&[1.0, 1.0]).unwrap();
    let times = linspace(0.0, 2.0 * PI, 100);
    let r = picture_equivalence_check(&pauli.z, &pauli.x, &plus, &times, 1.0).unwrap();
    assert!(r.max_zeroth_deviation <= 1e-9);
    // <σx>(t) = cos 2t
    for (t, s) in times.iter().zip(&r.schrodinger) {
        assert!((s.re - (2.0 * t).cos()).abs() <= 1e-12);
    }
    let id = picture_equivalence_check(&pauli.z, &pauli.identity, &plus, &times, 1.0).unwrap();
    assert!(id
        .schrodinger
        .iter()
        .chain(&id.heisenberg)
        .all(|v| (v - C64::new(1.0, 0.0)).norm() <= 1e-14));
}

#[test]
fn pictures_agree_for_coherent_oscillator() {
    let sys = build_oscillator(32, 1.0, 1.0, 1.0).unwrap();
    let psi = sys.coherent_state(C64::new(1.0, 0.0)).unwrap();
    let r = picture_equivalence_check(sys.h(), sys.x(), &psi, &linspace(0.0, 2.0 * PI, 60), 1.0)
        .unwrap();
    assert!(r.max_zeroth_deviation <= 1e-7);
}

#[test]
fn coherent_position_expectation() {
    let sys = build_oscillator(32, 1.0, 1.0, 1.0).unwrap();
    let psi = sys.coherent_state(C64::new(1.0, 0.0)).unwrap();
    assert!((expectation(sys.x(), &psi).unwrap().re - SQRT_2).abs() <= 1e-9);
    assert!(expectation(sys.p(), &psi).unwrap().norm() <= 1e-12);
}

#[test]
fn position_squared_on_ground_state_via_star() {
    for n in [4, 8] {
        let sys = build_oscillator(n, 1.0, 1.0, 1.0).unwrap();
        let u = ncvalue(sys.x(), &sys.fock(0)).unwrap();
        let uu = star_product(&u, &u).unwrap();
        assert!((uu.f() - C64::new(0.5, 0.0)).norm() <= 1e-14);
    }
}

#[test]
fn finite_differences_on_coherent_position() {
    let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let psi = sys.coherent_state(C64::new(1.0, 0.0)).unwrap();
    let fd = finite_difference_jet(sys.x(), &psi, 1e-5).unwrap();
    assert!(fd.max_component_diff(&ncvalue(sys.x(), &psi).unwrap()) <= 1e-7);
}

#[test]
fn sampled_position_moment_on_ground_state() {
    let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let rec = sample_measurement_stream("X", sys.x(), &sys.fock(0), 200_000, 3, 0).unwrap();
    let second = empirical_moments(&rec, 2)[1];
    // standard error of the sample second moment: sqrt(Var(X^2)/shots),
    // Var(X^2) = <X^4> - <X^2>^2 = 3/4 - 1/4
    let stderr = (0.5f64 / 200_000.0).sqrt();
    assert!((second - 0.5).abs() <= 3.0 * stderr, "{second}");
}

#[test]
fn sampled_sigma_x_mean_on_basis_state() {
    let pauli = pauli_system();
    let zero = ProjectiveState::basis(2, 0);
    let rec = sample_measurement_stream("sx", &pauli.x, &zero, 1_000_000, 1, 0).unwrap();
    let (mean, stderr) = estimate_expectation(&rec).unwrap();
    assert!(mean.abs() <= 0.005);
    assert!((stderr - 1e-3).abs() <= 1e-5);
    let moments = empirical_moments(&rec, 4);
    assert_eq!(moments[1], 1.0);
    assert_eq!(moments[3], 1.0);
    assert!(moments[0].abs() <= 0.005);
}
