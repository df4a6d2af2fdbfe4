// SPDX-License-Identifier: Apache-2.0

//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use ncvalue::dynamics::{
    hamilton_operator_flow, heisenberg_propagate, leading_block_diff, linspace,
    picture_equivalence_check, realcoord_flow, schrodinger_propagate, PolynomialHamiltonian,
    Rk4Config,
};
use ncvalue::models::{
    build_oscillator, ehrenfest_trace, expectation_degeneracy_pair, pauli_system,
};
use ncvalue::random::{random_operator, random_state, random_state_on_levels, stream_rng};
use ncvalue::tomography::{
    estimate_expectation, reconstruct_density, reconstruct_density_from_expectations,
    sample_measurement_stream, sample_observables, trace_distance, DensityMatrix,
};
use ncvalue::{
    expectation, finite_difference_jet, multiplicativity_defect, ncvalue, reconstruct_operator,
    star_product, Operator, ProjectiveState, C64,
};
use rayon::prelude::*;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Stream index for trial `k` of dimension `n` in suite `tag`.
fn stream(tag: u64, n: usize, k: usize) -> u64 {
    (tag << 48) | ((n as u64) << 32) | k as u64
}

fn homomorphism() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for n in [2, 3, 4, 8, 16] {
        let err = max_of(
            (0..1000)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream_rng(SEED, stream(1, n, k));
                    let a = random_operator(&mut rng, n);
                    let b = random_operator(&mut rng, n);
                    let psi = random_state(&mut rng, n);
                    let u = ncvalue(&a, &psi).unwrap();
                    let v = ncvalue(&b, &psi).unwrap();
                    let ab = ncvalue(&(&a * &b), &psi).unwrap();
                    star_product(&u, &v).unwrap().max_component_diff(&ab)
                })
                .collect::<Vec<_>>()
                .into_iter(),
        );
        parts.push(format!("N={n}:{err:.1e}"));
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && secs <= 120.0,
        format!("max error {worst:.2e} ({}) in {secs:.1}s", parts.join(" ")),
    )
}

fn associativity() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 3, 4, 8, 16] {
        let err = max_of(
            (0..300)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream_rng(SEED, stream(2, n, k));
                    let psi = random_state(&mut rng, n);
                    let [u, v, w] =
                        [0; 3].map(|_| ncvalue(&random_operator(&mut rng, n), &psi).unwrap());
                    let left = star_product(&star_product(&u, &v).unwrap(), &w).unwrap();
                    let right = star_product(&u, &star_product(&v, &w).unwrap()).unwrap();
                    left.max_component_diff(&right)
                })
                .collect::<Vec<_>>()
                .into_iter(),
        );
        worst = worst.max(err);
    }
    outcome(
        worst <= 1e-8,
        format!("max error {worst:.2e} over 300 triples per dim"),
    )
}

fn no_multiplicative_functional() -> Outcome {
    let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let defect = multiplicativity_defect(sys.x(), sys.p(), &sys.fock(0)).unwrap();
    let fock_err = (defect - C64::new(0.0, 0.5)).norm();
    let anti_err = max_of((0..200).map(|k| {
        let mut rng = stream_rng(SEED, stream(3, 16, k));
        let psi = random_state_on_levels(&mut rng, 16, 15);
        let u = ncvalue(sys.x(), &psi).unwrap();
        let v = ncvalue(sys.p(), &psi).unwrap();
        let anti = star_product(&u, &v).unwrap().f() - star_product(&v, &u).unwrap().f();
        (anti - C64::new(0.0, 1.0)).norm()
    }));
    outcome(
        fock_err <= 1e-10 && anti_err <= 1e-10,
        format!("|defect - i/2| = {fock_err:.1e}; antisymmetric |defect - i| = {anti_err:.1e}"),
    )
}

fn jet_completeness() -> Outcome {
    let worst = max_of(
        (2..=16usize)
            .into_par_iter()
            .map(|n| {
                max_of((0..500).map(|k| {
                    let mut rng = stream_rng(SEED, stream(4, n, k));
                    let a = random_operator(&mut rng, n);
                    let psi = random_state(&mut rng, n);
                    reconstruct_operator(&ncvalue(&a, &psi).unwrap())
                        .unwrap()
                        .max_abs_diff(&a)
                }))
            })
            .collect::<Vec<_>>()
            .into_iter(),
    );
    outcome(
        worst <= 1e-9,
        format!("max entry error {worst:.2e}, 500 cases per dim 2..16"),
    )
}

fn jet_correctness() -> Outcome {
    let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let mut cases = vec![(
        sys.x().clone(),
        sys.coherent_state(C64::new(1.0, 0.0)).unwrap(),
    )];
    for k in 0..20 {
        let n = [2, 3, 4, 8][k % 4];
        let mut rng = stream_rng(SEED, stream(5, n, k));
        cases.push((random_operator(&mut rng, n), random_state(&mut rng, n)));
    }
    let mut abs_worst = 0.0f64;
    let (mut ratio_lo, mut ratio_hi) = (f64::INFINITY, 0.0f64);
    for (a, psi) in &cases {
        let exact = ncvalue(a, psi).unwrap();
        let e = |h: f64| {
            finite_difference_jet(a, psi, h)
                .unwrap()
                .max_component_diff(&exact)
        };
        abs_worst = abs_worst.max(e(1e-5));
        for h in [1e-3, 1e-4, 1e-5] {
            let r = e(h) / e(h / 2.0);
            ratio_lo = ratio_lo.min(r);
            ratio_hi = ratio_hi.max(r);
        }
    }
    outcome(
        abs_worst <= 1e-7 && ratio_lo >= 3.5 && ratio_hi <= 4.5,
        format!(
            "max error at h=1e-5 {abs_worst:.2e}; halving ratios in [{ratio_lo:.3}, {ratio_hi:.3}]"
        ),
    )
}

fn ccr_structure() -> Outcome {
    let worst = max_of([4, 8, 16, 32].into_iter().map(|n| {
        let sys = build_oscillator(n, 1.0, 1.0, 1.0).unwrap();
        sys.ccr_defect().max_abs_diff(&sys.expected_ccr_defect())
    }));
    outcome(
        worst <= 1e-12,
        format!("max entry deviation {worst:.1e}, N in {{4,8,16,32}}"),
    )
}

fn picture_equivalence() -> Outcome {
    let times = linspace(0.0, 2.0 * PI, 100);
    let sys = build_oscillator(32, 1.0, 1.0, 1.0).unwrap();
    let mut rng = stream_rng(SEED, stream(7, 32, 0));
    let psi = random_state_on_levels(&mut rng, 32, 12);
    let osc = max_of([sys.x(), sys.p(), sys.h()].into_iter().map(|a0| {
        picture_equivalence_check(sys.h(), a0, &psi, &times, 1.0)
            .unwrap()
            .max_zeroth_deviation
    }));
    let pauli = pauli_system();
    let h = &pauli.x.scale(C64::new(0.3, 0.0)) + &pauli.z.scale(C64::new(0.7, 0.0));
    let qubit = random_state(&mut rng, 2);
    let spin = max_of(pauli.sigmas().into_iter().map(|a0| {
        picture_equivalence_check(&h, a0, &qubit, &times, 1.0)
            .unwrap()
            .max_zeroth_deviation
    }));

    // RK4 in real coordinates against exact propagation. The initial state
    // spreads over Fock levels 0..9 so that the O(dt^4) error is resolved
    // above rounding at dt = 1e-3 and dt = 5e-4.
    let osc16 = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let psi0 = random_state_on_levels(&mut rng, 16, 10);
    let t_end = [10.0];
    let exact = schrodinger_propagate(osc16.h(), &psi0, &t_end, 1.0).unwrap();
    let exact = exact.last().unwrap();
    let err = |dt: f64| {
        realcoord_flow(osc16.h(), &psi0, &t_end, 1.0, Rk4Config { dt })
            .unwrap()
            .last()
            .unwrap()
            .ray_distance(exact)
    };
    let (e1, e2) = (err(1e-3), err(5e-4));
    let ratio = e1 / e2;
    outcome(
        osc <= 1e-8 && spin <= 1e-8 && e1 <= 1e-8 && (12.0..=20.0).contains(&ratio),
        format!(
            "oscillator {osc:.1e}, Pauli {spin:.1e}; RK4 ray distance {e1:.2e} at dt=1e-3, halving ratio {ratio:.2}"
        ),
    )
}

fn hamilton_equations() -> Outcome {
    let n = 32;
    let sys = build_oscillator(n, 1.0, 1.0, 1.0).unwrap();
    let times = linspace(0.0, 2.0 * PI, 25);
    let ham = PolynomialHamiltonian::harmonic(1.0, 1.0);
    let flow = hamilton_operator_flow(&ham, &sys, &times, Rk4Config { dt: 1e-3 }).unwrap();
    let hx = heisenberg_propagate(sys.h(), sys.x(), &times, 1.0).unwrap();
    let hp = heisenberg_propagate(sys.h(), sys.p(), &times, 1.0).unwrap();
    let block = n - 2;
    let worst = max_of((0..times.len()).map(|k| {
        let ops = &flow.points()[k];
        leading_block_diff(&ops.x, hx.points()[k].matrix(), block).max(leading_block_diff(
            &ops.p,
            hp.points()[k].matrix(),
            block,
        ))
    }));
    outcome(
        worst <= 1e-6,
        format!("max interior ({block}x{block}) entry gap {worst:.2e}"),
    )
}

fn classical_limit() -> Outcome {
    let sys = build_oscillator(32, 1.0, 1.0, 1.0).unwrap();
    let psi = sys.coherent_state(C64::new(1.0, 0.0)).unwrap();
    let times = linspace(0.0, 2.0 * PI, 400);
    let trace = ehrenfest_trace(&sys, &psi, &times).unwrap();
    let worst = max_of(
        times
            .iter()
            .zip(&trace.x_expect)
            .map(|(t, x)| (x - SQRT_2 * t.cos()).abs()),
    );
    outcome(
        worst <= 1e-6,
        format!("max |<X>(t) - sqrt2 cos t| = {worst:.2e}"),
    )
}

fn expectation_degeneracy() -> Outcome {
    let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
    let (_, _, r) = expectation_degeneracy_pair(&sys).unwrap();
    let first = max_of(r.x_expect.iter().chain(&r.p_expect).map(|v| v.abs()));
    let var_gap = ((r.var_x[1] - r.var_x[0]) - 1.0).abs();
    outcome(
        first <= 1e-12 && var_gap <= 1e-9 && r.hess_distance >= 0.5,
        format!(
            "first moments {first:.1e}; Var(X) gap error {var_gap:.1e}; hess distance {:.4}",
            r.hess_distance
        ),
    )
}

fn state_determination() -> Outcome {
    let pauli = pauli_system();
    let observables: Vec<(String, Operator)> =
        [("sx", &pauli.x), ("sy", &pauli.y), ("sz", &pauli.z)]
            .into_iter()
            .map(|(id, o)| (id.to_string(), o.clone()))
            .collect();
    let ops: Vec<Operator> = observables.iter().map(|(_, o)| o.clone()).collect();
    let mut rng = stream_rng(SEED, stream(11, 2, 0));
    let psi = random_state(&mut rng, 2);
    let truth = DensityMatrix::pure(&psi);

    let records = sample_observables(&observables, &psi, 100_000, SEED).unwrap();
    let sampled = reconstruct_density(&ops, &records).unwrap();
    let td = trace_distance(&sampled.rho, &truth).unwrap();

    let exact: Vec<f64> = ops
        .iter()
        .map(|o| expectation(o, &psi).unwrap().re)
        .collect();
    let exact_err = reconstruct_density_from_expectations(&ops, &exact)
        .unwrap()
        .rho
        .max_abs_diff(&truth);

    // RMS error of the sample mean of X over a doubling ladder of shots
    let target = expectation(&pauli.x, &psi).unwrap().re;
    let ladder: Vec<u64> = (0..8).map(|k| 100u64 << k).collect();
    let points: Vec<(f64, f64)> = ladder
        .iter()
        .map(|&shots| {
            let mse = (0..400u64)
                .map(|s| {
                    let rec =
                        sample_measurement_stream("sx", &pauli.x, &psi, shots, SEED, 1000 + s)
                            .unwrap();
                    let (mean, _) = estimate_expectation(&rec).unwrap();
                    (mean - target).powi(2)
                })
                .sum::<f64>()
                / 400.0;
            ((shots as f64).ln(), mse.sqrt().ln())
        })
        .collect();
    let slope = fit_slope(&points);
    outcome(
        td <= 0.05 && exact_err <= 1e-10 && (slope + 0.5).abs() <= 0.1,
        format!(
            "trace distance {td:.4}; exact-input error {exact_err:.1e}; log-log slope {slope:.3}"
        ),
    )
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn uncertainty_bound() -> Outcome {
    let n = 16;
    let sys = build_oscillator(n, 1.0, 1.0, 1.0).unwrap();
    let product = |psi: &ProjectiveState| {
        ncvalue(sys.x(), psi).unwrap().variance() * ncvalue(sys.p(), psi).unwrap().variance()
    };
    let min_product = (0..1000)
        .map(|k| {
            let mut rng = stream_rng(SEED, stream(12, n, k));
            product(&random_state_on_levels(&mut rng, n, n - 2))
        })
        .fold(f64::INFINITY, f64::min);
    let coherent_sys = build_oscillator(32, 1.0, 1.0, 1.0).unwrap();
    let coherent_gap = max_of(
        [
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.5, -1.2),
            C64::new(-1.5, 0.7),
        ]
        .into_iter()
        .map(|alpha| {
            let psi = coherent_sys.coherent_state(alpha).unwrap();
            let vx = ncvalue(coherent_sys.x(), &psi).unwrap().variance();
            let vp = ncvalue(coherent_sys.p(), &psi).unwrap().variance();
            (vx * vp - 0.25).abs()
        }),
    );
    outcome(
        min_product >= 0.25 - 1e-10 && coherent_gap <= 1e-8,
        format!("min Var(X)Var(P) {min_product:.6}; coherent |product - 1/4| {coherent_gap:.1e}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("evaluation homomorphism", homomorphism),
        ("star product associativity", associativity),
        ("no multiplicative functional", no_multiplicative_functional),
        ("jet completeness", jet_completeness),
        ("jet correctness", jet_correctness),
        ("CCR structure", ccr_structure),
        ("picture equivalence", picture_equivalence),
        ("Hamilton operator equations", hamilton_equations),
        ("classical limit", classical_limit),
        ("expectation degeneracy", expectation_degeneracy),
        ("state determination", state_determination),
        ("uncertainty bound", uncertainty_bound),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", k + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
