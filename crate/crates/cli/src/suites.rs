// SPDX-License-Identifier: Apache-2.0

//! The verification suites.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use ncvalue::dynamics::{
    hamilton_operator_flow, heisenberg_propagate, leading_block_diff, linspace,
    picture_equivalence_check, realcoord_flow, schrodinger_propagate, PolynomialHamiltonian,
    Rk4Config,
};
use ncvalue::models::{
    build_oscillator, ehrenfest_trace, expectation_degeneracy_pair, pauli_system,
};
use ncvalue::random::{
    random_hermitian, random_operator, random_state, random_state_on_levels, stream_rng,
};
use ncvalue::tomography::{
    estimate_expectation, gell_mann_basis, reconstruct_density,
    reconstruct_density_from_expectations, sample_measurement_stream, sample_observables,
    trace_distance, DensityMatrix,
};
use ncvalue::{
    expectation, finite_difference_jet, gauge_fix, ncvalue, reconstruct_operator, star_product,
    Operator, ProjectiveState, C64,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{SuiteConfig, Tolerances};
use crate::report::{Checker, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Homomorphism,
    Jets,
    Dynamics,
    Ccr,
    Ehrenfest,
    Degeneracy,
    Tomography,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 7] = [
        Suite::Homomorphism,
        Suite::Jets,
        Suite::Dynamics,
        Suite::Ccr,
        Suite::Ehrenfest,
        Suite::Degeneracy,
        Suite::Tomography,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Homomorphism => "homomorphism",
            Suite::Jets => "jets",
            Suite::Dynamics => "dynamics",
            Suite::Ccr => "ccr",
            Suite::Ehrenfest => "ehrenfest",
            Suite::Degeneracy => "degeneracy",
            Suite::Tomography => "tomography",
            Suite::All => "all",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }

    pub fn describe(self) -> &'static str {
        match self {
            Suite::Homomorphism => {
                "Evaluation at a state as an algebra homomorphism: the star product of the \
                 jets of A and B equals the jet of AB, checked over random operators and \
                 states in every configured dimension, together with associativity and \
                 bilinearity of the star product."
            }
            Suite::Jets => {
                "Jets carry the full observable: reconstruct_operator inverts ncvalue, the \
                 tangency identities hold, the result does not depend on the phase of the \
                 state, and central finite differences agree with the closed form to \
                 second order in the step."
            }
            Suite::Dynamics => {
                "Schrodinger and Heisenberg pictures give the same expectations and jets, \
                 energy is conserved, the real-coordinate RK4 flow is fourth order against \
                 spectral propagation, and the operator Hamilton equations of the \
                 harmonic oscillator match Heisenberg evolution on the interior block."
            }
            Suite::Ccr => {
                "Canonical commutation relations of the truncated oscillator: [X,P] - i hbar \
                 vanishes except for the single top-level entry -i hbar N."
            }
            Suite::Ehrenfest => {
                "Classical limit: quantum expectations of X and P on coherent states follow \
                 the classical harmonic trajectory."
            }
            Suite::Degeneracy => {
                "Expectation values alone do not determine the state: Fock states 0 and 1 \
                 share <X> = <P> = 0 while their jets for X differ in variance and Hessian."
            }
            Suite::Tomography => {
                "State determination from measurements: sampled Pauli statistics \
                 reconstruct a qubit state, exact expectations of a generalized Gell-Mann \
                 set reproduce the projector, and the estimator error falls as \
                 1/sqrt(shots)."
            }
            Suite::All => "Runs every suite and writes one report per suite.",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::INDIVIDUAL
            .into_iter()
            .chain([Suite::All])
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown suite \"{s}\""))
    }
}

/// A report plus CSV (or JSON) side files named relative to the output
/// directory.
pub struct SuiteOutput {
    pub report: SuiteReport,
    pub traces: Vec<(String, String)>,
}

/// Runs one suite. Individual suites return one output; `all` returns one
/// per suite.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<SuiteOutput> {
    match suite {
        Suite::All => Suite::INDIVIDUAL
            .iter()
            .flat_map(|&s| run_suite(s, cfg))
            .collect(),
        s => {
            let mut c = Checker::new();
            let mut traces = Vec::new();
            let tol = cfg.tolerances();
            match s {
                Suite::Homomorphism => homomorphism(cfg, &tol, &mut c),
                Suite::Jets => jets(cfg, &tol, &mut c),
                Suite::Dynamics => dynamics(cfg, &tol, &mut c, &mut traces),
                Suite::Ccr => ccr(cfg, &mut c),
                Suite::Ehrenfest => ehrenfest(cfg, &tol, &mut c, &mut traces),
                Suite::Degeneracy => degeneracy(cfg, &mut c),
                Suite::Tomography => tomography(cfg, &tol, &mut c, &mut traces),
                Suite::All => unreachable!(),
            }
            vec![SuiteOutput {
                report: c.finish(s.name(), cfg),
                traces,
            }]
        }
    }
}

/// ChaCha stream of trial `k` in dimension `n` of a suite.
fn stream(suite: Suite, n: usize, k: usize) -> u64 {
    (suite.tag() << 48) | ((n as u64) << 32) | k as u64
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Per-trial results in trial order, computed in parallel.
fn trials<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

fn record_errors(
    c: &mut Checker,
    suite: Suite,
    cfg: &SuiteConfig,
    n: usize,
    errors: &[(usize, String)],
) {
    for (k, msg) in errors {
        c.case(
            format!("{}/N={n}/trial={k}", suite.name()),
            json!({ "dim": n, "trial": k, "seed": cfg.seed, "stream": stream(suite, n, *k) }),
            msg.clone(),
        );
    }
}

fn homomorphism(cfg: &SuiteConfig, tol: &Tolerances, c: &mut Checker) {
    let suite = Suite::Homomorphism;
    let (mut star, mut assoc, mut linear) = (0.0f64, 0.0f64, 0.0f64);
    for &n in &cfg.dims {
        let results = trials(cfg.trials, |k| -> Result<[f64; 3], String> {
            let mut rng = stream_rng(cfg.seed, stream(suite, n, k));
            let a = random_operator(&mut rng, n);
            let b = random_operator(&mut rng, n);
            let d = random_operator(&mut rng, n);
            let psi = random_state(&mut rng, n);
            let e = |r: ncvalue::Result<f64>| r.map_err(|e| e.to_string());
            let u = ncvalue(&a, &psi).map_err(|e| e.to_string())?;
            let v = ncvalue(&b, &psi).map_err(|e| e.to_string())?;
            let w = ncvalue(&d, &psi).map_err(|e| e.to_string())?;
            let star_err = e((|| {
                Ok(star_product(&u, &v)?.max_component_diff(&ncvalue(&(&a * &b), &psi)?))
            })())?;
            let assoc_err = e((|| {
                let left = star_product(&star_product(&u, &v)?, &w)?;
                let right = star_product(&u, &star_product(&v, &w)?)?;
                Ok(left.max_component_diff(&right))
            })())?;
            let alpha = C64::new(0.6, -1.3);
            let linear_err = e((|| {
                let left = star_product(&u.scale(alpha).add(&w)?, &v)?;
                let right = star_product(&u, &v)?
                    .scale(alpha)
                    .add(&star_product(&w, &v)?)?;
                Ok(left.max_component_diff(&right))
            })())?;
            Ok([star_err, assoc_err, linear_err])
        });
        let mut worst = [0.0f64; 3];
        let mut errors = Vec::new();
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => {
                    if !(v[0] <= tol.star && v[1] <= tol.star && v[2] <= tol.jet) {
                        errors.push((
                            k,
                            format!(
                                "errors star {:.3e} assoc {:.3e} linear {:.3e}",
                                v[0], v[1], v[2]
                            ),
                        ));
                    }
                    for i in 0..3 {
                        worst[i] = worst[i].max(v[i]);
                    }
                }
                Err(msg) => errors.push((k, msg)),
            }
        }
        record_errors(c, suite, cfg, n, &errors);
        c.record(&format!("max_star_error_N{n}"), worst[0]);
        star = star.max(worst[0]);
        assoc = assoc.max(worst[1]);
        linear = linear.max(worst[2]);
    }
    c.at_most("max_star_error", star, tol.star);
    c.at_most("max_assoc_error", assoc, tol.star);
    c.at_most("max_bilinearity_error", linear, tol.jet);
}

fn jets(cfg: &SuiteConfig, tol: &Tolerances, c: &mut Checker) {
    let suite = Suite::Jets;
    let mut worst = [0.0f64; 3];
    for &n in &cfg.dims {
        let results = trials(cfg.trials, |k| -> ncvalue::Result<[f64; 3]> {
            let mut rng = stream_rng(cfg.seed, stream(suite, n, k));
            let a = random_operator(&mut rng, n);
            let psi = random_state(&mut rng, n);
            let theta: f64 = 2.0 * PI * (k as f64 + 0.5) / cfg.trials as f64;
            let v = ncvalue(&a, &psi)?;
            let recon = reconstruct_operator(&v)?.max_abs_diff(&a);
            let rotated = gauge_fix(psi.amplitudes() * C64::from_polar(1.0, theta))?;
            let phase = reconstruct_operator(&ncvalue(&a, &rotated)?)?.max_abs_diff(&a);
            Ok([recon, v.tangency_residual(), phase])
        });
        let mut errors = Vec::new();
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => {
                    if !v.iter().all(|&e| e <= tol.jet) {
                        errors.push((
                            k,
                            format!(
                                "reconstruction {:.3e} tangency {:.3e} phase {:.3e}",
                                v[0], v[1], v[2]
                            ),
                        ));
                    }
                    for i in 0..3 {
                        worst[i] = worst[i].max(v[i]);
                    }
                }
                Err(e) => errors.push((k, e.to_string())),
            }
        }
        record_errors(c, suite, cfg, n, &errors);
    }
    c.at_most("max_reconstruction_error", worst[0], tol.jet);
    c.at_most("max_tangency_residual", worst[1], tol.jet);
    c.at_most("max_phase_covariance_error", worst[2], tol.jet);

    // finite differences are O(N^4) per case; keep them to small dims
    let fd_dims: Vec<usize> = cfg.dims.iter().copied().filter(|&n| n <= 8).collect();
    let fd_dims = if fd_dims.is_empty() { vec![2] } else { fd_dims };
    let cases = cfg.trials.min(10);
    let (mut abs, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
    for &n in &fd_dims {
        let results = trials(cases, |k| -> ncvalue::Result<(f64, f64)> {
            let mut rng = stream_rng(cfg.seed, stream(suite, n, 1 << 20 | k));
            let a = random_operator(&mut rng, n);
            let psi = random_state(&mut rng, n);
            let exact = ncvalue(&a, &psi)?;
            let err = |h: f64| -> ncvalue::Result<f64> {
                Ok(finite_difference_jet(&a, &psi, h)?.max_component_diff(&exact))
            };
            let e = err(1e-5)?;
            Ok((e, e / err(5e-6)?))
        });
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok((e, ratio)) => {
                    abs = abs.max(e);
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
                Err(e) => record_errors(c, suite, cfg, n, &[(1 << 20 | k, e.to_string())]),
            }
        }
    }
    c.at_most("max_fd_error_h1e-5", abs, 1e-7);
    c.within("min_fd_halving_ratio", lo, 3.5, 4.5);
    c.within("max_fd_halving_ratio", hi, 3.5, 4.5);
}

fn dynamics(
    cfg: &SuiteConfig,
    tol: &Tolerances,
    c: &mut Checker,
    traces: &mut Vec<(String, String)>,
) {
    let suite = Suite::Dynamics;
    let times = linspace(0.0, 2.0 * PI, 20);
    let mut worst = [0.0f64; 3];
    for &n in &cfg.dims {
        let results = trials(cfg.trials, |k| -> ncvalue::Result<[f64; 3]> {
            let mut rng = stream_rng(cfg.seed, stream(suite, n, k));
            let h = random_hermitian(&mut rng, n);
            let a = random_operator(&mut rng, n);
            let psi = random_state(&mut rng, n);
            let report = picture_equivalence_check(&h, &a, &psi, &times, cfg.hbar)?;
            let traj = schrodinger_propagate(&h, &psi, &times, cfg.hbar)?;
            let e0 = expectation(&h, &psi)?;
            let drift = traj
                .points()
                .iter()
                .map(|p| expectation(&h, p).map(|e| (e - e0).norm()))
                .collect::<ncvalue::Result<Vec<_>>>()?;
            Ok([
                report.max_zeroth_deviation,
                report.max_jet_deviation,
                max_of(drift.into_iter()),
            ])
        });
        let mut errors = Vec::new();
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => {
                    if !v.iter().all(|&e| e <= tol.dynamics) {
                        errors.push((
                            k,
                            format!("picture {:.3e} jet {:.3e} energy {:.3e}", v[0], v[1], v[2]),
                        ));
                    }
                    for i in 0..3 {
                        worst[i] = worst[i].max(v[i]);
                    }
                }
                Err(e) => errors.push((k, e.to_string())),
            }
        }
        record_errors(c, suite, cfg, n, &errors);
    }
    c.at_most("max_picture_deviation", worst[0], tol.dynamics);
    c.at_most("max_picture_jet_deviation", worst[1], tol.dynamics);
    c.at_most("max_energy_drift", worst[2], tol.dynamics);

    if let Err(e) = dynamics_fixed(cfg, tol, c, traces) {
        c.case("dynamics/fixed".into(), json!({}), e.to_string());
    }
}

fn dynamics_fixed(
    cfg: &SuiteConfig,
    tol: &Tolerances,
    c: &mut Checker,
    traces: &mut Vec<(String, String)>,
) -> ncvalue::Result<()> {
    let pauli = pauli_system();
    let plus = ProjectiveState::from_real(&[1.0, 1.0])?;
    let grid = linspace(0.0, 2.0 * PI, 101);
    let rk = realcoord_flow(&pauli.z, &plus, &grid, cfg.hbar, Rk4Config { dt: 1e-3 })?;
    let exact = schrodinger_propagate(&pauli.z, &plus, &grid, cfg.hbar)?;
    let endpoint = rk
        .last()
        .expect("nonempty")
        .ray_distance(exact.last().expect("nonempty"));
    c.at_most("rk4_sigma_z_endpoint_ray_distance", endpoint, 1e-8);
    let mut csv = Vec::new();
    rk.write_state_csv(&mut csv)?;
    traces.push((
        "dynamics_sigma_z_rk4.csv".into(),
        String::from_utf8(csv).expect("utf8"),
    ));

    let picture = picture_equivalence_check(&pauli.z, &pauli.x, &plus, &grid, cfg.hbar)?;
    c.at_most(
        "sigma_z_picture_deviation",
        picture.max_zeroth_deviation,
        1e-9,
    );
    let mut text = String::from("t,schrodinger_re,schrodinger_im,heisenberg_re,heisenberg_im\n");
    for ((t, s), h) in grid
        .iter()
        .zip(&picture.schrodinger)
        .zip(&picture.heisenberg)
    {
        writeln!(
            text,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            t, s.re, s.im, h.re, h.im
        )
        .expect("string write");
    }
    traces.push(("dynamics_picture.csv".into(), text));

    // RK4 order against spectral propagation; the state spreads over Fock
    // levels 0..9 so the dt^4 error is above rounding at both steps
    let osc = build_oscillator(16, cfg.hbar, cfg.mass, cfg.omega)?;
    let mut rng = stream_rng(cfg.seed, stream(Suite::Dynamics, 16, 1 << 30));
    let psi0 = random_state_on_levels(&mut rng, 16, 10);
    let t_end = [10.0 / cfg.omega];
    let exact = schrodinger_propagate(osc.h(), &psi0, &t_end, cfg.hbar)?;
    let exact = exact.last().expect("nonempty").clone();
    let err = |dt: f64| -> ncvalue::Result<f64> {
        Ok(realcoord_flow(
            osc.h(),
            &psi0,
            &t_end,
            cfg.hbar,
            Rk4Config { dt: dt / cfg.omega },
        )?
        .last()
        .expect("nonempty")
        .ray_distance(&exact))
    };
    let e1 = err(1e-3)?;
    c.at_most("rk4_oscillator_error_dt1e-3", e1, 1e-8);
    c.within("rk4_halving_ratio", e1 / err(5e-4)?, 12.0, 20.0);

    let n = 32;
    let sys = build_oscillator(n, cfg.hbar, cfg.mass, cfg.omega)?;
    let times = linspace(0.0, 2.0 * PI / cfg.omega, 13);
    let ham = PolynomialHamiltonian::harmonic(cfg.mass, cfg.omega);
    let flow = hamilton_operator_flow(
        &ham,
        &sys,
        &times,
        Rk4Config {
            dt: 1e-3 / cfg.omega,
        },
    )?;
    let hx = heisenberg_propagate(sys.h(), sys.x(), &times, cfg.hbar)?;
    let hp = heisenberg_propagate(sys.h(), sys.p(), &times, cfg.hbar)?;
    let gap = max_of((0..times.len()).map(|k| {
        let ops = &flow.points()[k];
        leading_block_diff(&ops.x, hx.points()[k].matrix(), n - 2).max(leading_block_diff(
            &ops.p,
            hp.points()[k].matrix(),
            n - 2,
        ))
    }));
    c.at_most("hamilton_flow_interior_gap", gap, tol.trunc);
    Ok(())
}

fn ccr(cfg: &SuiteConfig, c: &mut Checker) {
    let mut sizes: Vec<usize> = cfg.dims.iter().copied().filter(|&n| n >= 4).collect();
    if sizes.is_empty() {
        sizes.push(4);
    }
    for n in sizes {
        let sys = match build_oscillator(n, cfg.hbar, cfg.mass, cfg.omega) {
            Ok(s) => s,
            Err(e) => {
                c.case(format!("ccr/N={n}"), json!({ "dim": n }), e.to_string());
                continue;
            }
        };
        let defect = sys.ccr_defect();
        let top = defect.entry(n - 1, n - 1);
        let interior = max_of(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i.max(j) <= n - 2)
                .map(|(i, j)| defect.entry(i, j).norm()),
        );
        let bound = 1e-12 * cfg.hbar.max(1.0);
        c.record(&format!("defect_top_re_N{n}"), top.re);
        c.record(&format!("defect_top_im_N{n}"), top.im);
        c.at_most(&format!("interior_max_N{n}"), interior, bound);
        c.at_most(
            &format!("defect_deviation_N{n}"),
            defect.max_abs_diff(&sys.expected_ccr_defect()),
            bound,
        );
    }
}

fn ehrenfest(
    cfg: &SuiteConfig,
    tol: &Tolerances,
    c: &mut Checker,
    traces: &mut Vec<(String, String)>,
) {
    let suite = Suite::Ehrenfest;
    let n = 32;
    let sys = match build_oscillator(n, cfg.hbar, cfg.mass, cfg.omega) {
        Ok(s) => s,
        Err(e) => {
            c.case("ehrenfest/build".into(), json!({}), e.to_string());
            return;
        }
    };
    let times = linspace(0.0, 2.0 * PI / cfg.omega, 201);
    let run = |alpha: C64| -> ncvalue::Result<ncvalue::models::EhrenfestTrace> {
        let psi = sys.coherent_state(alpha)?;
        ehrenfest_trace(&sys, &psi, &times)
    };
    match run(C64::new(1.0, 0.0)) {
        Ok(trace) => {
            c.at_most(
                "coherent_alpha1_position_deviation",
                trace.max_position_deviation(),
                tol.trunc,
            );
            c.at_most(
                "coherent_alpha1_momentum_deviation",
                trace.max_momentum_deviation(),
                tol.trunc,
            );
            let mut csv = Vec::new();
            if trace.write_csv(&mut csv).is_ok() {
                traces.push((
                    "ehrenfest.csv".into(),
                    String::from_utf8(csv).expect("utf8"),
                ));
            }
        }
        Err(e) => c.case(
            "ehrenfest/alpha=1".into(),
            json!({ "alpha": [1.0, 0.0] }),
            e.to_string(),
        ),
    }
    // random seeds with |alpha|^2 <= N/8
    let radius = (n as f64 / 8.0).sqrt();
    let results = trials(cfg.trials.min(50), |k| {
        let mut rng = stream_rng(cfg.seed, stream(suite, n, k));
        let z = random_state(&mut rng, 2).amplitudes()[1];
        let alpha = z * radius;
        (
            alpha,
            run(alpha).map(|t| t.max_position_deviation().max(t.max_momentum_deviation())),
        )
    });
    let mut worst = 0.0f64;
    for (k, (alpha, r)) in results.into_iter().enumerate() {
        match r {
            Ok(e) => {
                if !(e <= tol.trunc) {
                    c.case(
                        format!("ehrenfest/trial={k}"),
                        json!({ "alpha": [alpha.re, alpha.im], "trial": k, "seed": cfg.seed }),
                        format!("deviation {e:.3e}"),
                    );
                }
                worst = worst.max(e);
            }
            Err(e) => c.case(
                format!("ehrenfest/trial={k}"),
                json!({ "alpha": [alpha.re, alpha.im], "trial": k, "seed": cfg.seed }),
                e.to_string(),
            ),
        }
    }
    c.at_most("max_random_coherent_deviation", worst, tol.trunc);
}

fn degeneracy(cfg: &SuiteConfig, c: &mut Checker) {
    let sys = match build_oscillator(16, cfg.hbar, cfg.mass, cfg.omega) {
        Ok(s) => s,
        Err(e) => {
            c.case("degeneracy/build".into(), json!({}), e.to_string());
            return;
        }
    };
    match expectation_degeneracy_pair(&sys) {
        Ok((_, _, r)) => {
            let first = max_of(r.x_expect.iter().chain(&r.p_expect).map(|v| v.abs()));
            c.at_most("max_first_moment", first, 1e-12);
            c.record("var_x_fock0", r.var_x[0]);
            c.record("var_x_fock1", r.var_x[1]);
            let expected_gap = cfg.hbar / (cfg.mass * cfg.omega);
            c.at_most(
                "var_x_gap_error",
                ((r.var_x[1] - r.var_x[0]) - expected_gap).abs(),
                1e-9,
            );
            c.at_least("hess_distance", r.hess_distance, 0.5);
            c.at_most(
                "max_reconstruction_error",
                r.reconstruction_error[0].max(r.reconstruction_error[1]),
                1e-9,
            );
        }
        Err(e) => c.case("degeneracy/pair".into(), json!({}), e.to_string()),
    }
}

fn tomography(
    cfg: &SuiteConfig,
    tol: &Tolerances,
    c: &mut Checker,
    traces: &mut Vec<(String, String)>,
) {
    if let Err(e) = tomography_inner(cfg, tol, c, traces) {
        c.case(
            "tomography".into(),
            json!({ "seed": cfg.seed }),
            e.to_string(),
        );
    }
}

fn tomography_inner(
    cfg: &SuiteConfig,
    tol: &Tolerances,
    c: &mut Checker,
    traces: &mut Vec<(String, String)>,
) -> ncvalue::Result<()> {
    let suite = Suite::Tomography;
    let pauli = pauli_system();
    let named: Vec<(String, Operator)> = [("sx", &pauli.x), ("sy", &pauli.y), ("sz", &pauli.z)]
        .into_iter()
        .map(|(id, o)| (id.to_string(), o.clone()))
        .collect();
    let ops: Vec<Operator> = named.iter().map(|(_, o)| o.clone()).collect();
    let mut rng = stream_rng(cfg.seed, stream(suite, 2, 0));
    let psi = random_state(&mut rng, 2);
    let truth = DensityMatrix::pure(&psi);
    let records = sample_observables(&named, &psi, 100_000, cfg.seed)?;
    let rec = reconstruct_density(&ops, &records)?;
    let td = trace_distance(&rec.rho, &truth)?;
    c.at_most("qubit_trace_distance_1e5_shots", td, 0.05);
    c.record("qubit_condition_number", rec.condition_number);
    let matrix: Vec<Vec<[f64; 2]>> = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| {
                    let z = rec.rho.matrix()[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let side = json!({
        "kind": "reconstruction",
        "rho": matrix,
        "trace_distance": td,
        "condition_number": rec.condition_number,
        "residual": rec.residual,
        "records": records,
    });
    traces.push((
        "tomography_reconstruction.json".into(),
        serde_json::to_string_pretty(&side).expect("serializes") + "\n",
    ));

    // exact inputs through the generalized Gell-Mann set
    let mut exact_worst = 0.0f64;
    for &d in cfg.dims.iter().filter(|&&d| d <= 8) {
        let basis: Vec<Operator> = gell_mann_basis(d).into_iter().map(|(_, o)| o).collect();
        for k in 0..cfg.trials.min(20) {
            let mut rng = stream_rng(cfg.seed, stream(suite, d, 1 + k));
            let s = random_state(&mut rng, d);
            let e = basis
                .iter()
                .map(|o| expectation(o, &s).map(|z| z.re))
                .collect::<ncvalue::Result<Vec<_>>>()?;
            let r = reconstruct_density_from_expectations(&basis, &e)?;
            exact_worst = exact_worst.max(r.rho.max_abs_diff(&DensityMatrix::pure(&s)));
        }
    }
    c.at_most("exact_input_reconstruction_error", exact_worst, tol.spec);

    // RMS error of the X estimator over a shots-doubling ladder
    let target = expectation(&pauli.x, &psi)?.re;
    let repeats = 200u64;
    let points = (0..7)
        .map(|j| {
            let shots = 100u64 << j;
            let mse = (0..repeats)
                .map(|s| {
                    let rec =
                        sample_measurement_stream("sx", &pauli.x, &psi, shots, cfg.seed, 1000 + s)?;
                    Ok((estimate_expectation(&rec)?.0 - target).powi(2))
                })
                .sum::<ncvalue::Result<f64>>()?
                / repeats as f64;
            Ok(((shots as f64).ln(), mse.sqrt().ln()))
        })
        .collect::<ncvalue::Result<Vec<_>>>()?;
    c.within("estimator_loglog_slope", fit_slope(&points), -0.6, -0.4);
    Ok(())
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
