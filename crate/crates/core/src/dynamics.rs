// SPDX-License-Identifier: Apache-2.0

//! Time evolution under a time-independent Hamiltonian.
//!
//! Three descriptions are provided and checked against each other:
//!
//! - states moved by `U(t) = exp(-iHt/ħ)` ([`schrodinger_propagate`]),
//! - operators moved by `U(t)† A U(t)` ([`heisenberg_propagate`]),
//! - Hamilton's equations in the real coordinates `(q_n, s_n)`, integrated
//!   by fixed-step RK4 without any matrix exponential ([`realcoord_flow`]).
//!
//! The spectral propagator is the exact reference.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    max_abs_diff, same_dim, spectral_decompose, Operator, ProjectiveState, Spectrum, C64,
};
use crate::models::OscillatorSystem;
use crate::ncgeom::{expectation, ncvalue};
use crate::tolerance::{MAX_NORM_DRIFT, TOL_DYN, TOL_TRUNC};

/// Propagator tag and parameters attached to a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryMeta {
    pub propagator: String,
    pub hbar: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Largest `| |z| - 1 |` seen before renormalization (RK4 state flows).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_norm_drift: Option<f64>,
    pub tol_dyn: f64,
    pub tol_trunc: f64,
}

impl TrajectoryMeta {
    fn new(propagator: &str, hbar: f64) -> Self {
        Self {
            propagator: propagator.to_string(),
            hbar,
            dt: None,
            max_norm_drift: None,
            tol_dyn: TOL_DYN,
            tol_trunc: TOL_TRUNC,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<P> {
    times: Vec<f64>,
    points: Vec<P>,
    meta: TrajectoryMeta,
}

impl<P> Trajectory<P> {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&P> {
        self.points.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &P)> {
        self.times.iter().copied().zip(self.points.iter())
    }
}

impl Trajectory<ProjectiveState> {
    /// CSV with a `# {meta}` first line, then `t,re_0,im_0,...`.
    pub fn write_state_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.meta)?)?;
        let n = self.points.first().map_or(0, |p| p.dim());
        let mut header = vec!["t".to_string()];
        for k in 0..n {
            header.push(format!("re_{k}"));
            header.push(format!("im_{k}"));
        }
        writeln!(w, "{}", header.join(","))?;
        for (t, p) in self.iter() {
            let mut row = vec![format!("{t:.17e}")];
            for z in p.amplitudes().iter() {
                row.push(format!("{:.17e}", z.re));
                row.push(format!("{:.17e}", z.im));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// CSV of selected expectation values (real parts) along the trajectory.
    pub fn write_observables_csv<W: Write>(
        &self,
        mut w: W,
        observables: &[(&str, &Operator)],
    ) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.meta)?)?;
        let mut header = vec!["t"];
        header.extend(observables.iter().map(|(name, _)| *name));
        writeln!(w, "{}", header.join(","))?;
        for (t, p) in self.iter() {
            let mut row = vec![format!("{t:.17e}")];
            for (_, a) in observables {
                row.push(format!("{:.17e}", expectation(a, p)?.re));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty()
        || times.iter().any(|t| !t.is_finite())
        || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidTimes);
    }
    Ok(())
}

fn validate_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "hbar must be positive, got {hbar}"
        )))
    }
}

/// `exp(-iHt/ħ)` through the eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    spectrum: Spectrum,
    hbar: f64,
}

impl SpectralPropagator {
    pub fn new(h: &Operator, hbar: f64) -> Result<Self> {
        validate_hbar(hbar)?;
        Ok(Self {
            spectrum: spectral_decompose(h)?,
            hbar,
        })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.eigenvalues.len()
    }

    pub fn unitary(&self, t: f64) -> Operator {
        let hbar = self.hbar;
        Operator::wrap(
            self.spectrum
                .apply_fn(|lambda| C64::from_polar(1.0, -lambda * t / hbar)),
        )
    }

    pub fn evolve_state(&self, psi0: &ProjectiveState, t: f64) -> Result<ProjectiveState> {
        same_dim(self.dim(), psi0.dim())?;
        ProjectiveState::from_vector(self.unitary(t).matrix() * psi0.amplitudes())
    }

    pub fn evolve_operator(&self, a0: &Operator, t: f64) -> Result<Operator> {
        same_dim(self.dim(), a0.dim())?;
        let u = self.unitary(t);
        Ok(Operator::wrap(
            u.matrix().adjoint() * a0.matrix() * u.matrix(),
        ))
    }
}

pub fn schrodinger_propagate(
    h: &Operator,
    psi0: &ProjectiveState,
    times: &[f64],
    hbar: f64,
) -> Result<Trajectory<ProjectiveState>> {
    validate_times(times)?;
    same_dim(h.dim(), psi0.dim())?;
    let prop = SpectralPropagator::new(h, hbar)?;
    let points = times
        .iter()
        .map(|&t| prop.evolve_state(psi0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        points,
        meta: TrajectoryMeta::new("spectral-schrodinger", hbar),
    })
}

pub fn heisenberg_propagate(
    h: &Operator,
    a0: &Operator,
    times: &[f64],
    hbar: f64,
) -> Result<Trajectory<Operator>> {
    validate_times(times)?;
    same_dim(h.dim(), a0.dim())?;
    let prop = SpectralPropagator::new(h, hbar)?;
    let points = times
        .iter()
        .map(|&t| prop.evolve_operator(a0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        points,
        meta: TrajectoryMeta::new("spectral-heisenberg", hbar),
    })
}

/// Fixed-step RK4 settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rk4Config {
    pub dt: f64,
}

impl Rk4Config {
    /// `dt = min(1e-3, t_end / 1e4)`.
    pub fn default_for(t_end: f64) -> Self {
        Self {
            dt: 1e-3f64.min(t_end / 1e4),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dt > 0.0 && self.dt.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "RK4 step must be positive, got {}",
                self.dt
            )))
        }
    }

    /// Steps of equal length covering `span`, none longer than `dt`.
    fn steps(&self, span: f64) -> (usize, f64) {
        let n = ((span / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, span / n as f64)
    }
}

/// State of an ODE integrated by [`rk4_step`].
pub trait Rk4State: Clone {
    /// `self + a·k`.
    fn axpy(&self, a: f64, k: &Self) -> Self;
}

impl Rk4State for DVector<f64> {
    fn axpy(&self, a: f64, k: &Self) -> Self {
        self + k * a
    }
}

pub fn rk4_step<S: Rk4State>(y: &S, dt: f64, rhs: &impl Fn(&S) -> S) -> S {
    let k1 = rhs(y);
    let k2 = rhs(&y.axpy(0.5 * dt, &k1));
    let k3 = rhs(&y.axpy(0.5 * dt, &k2));
    let k4 = rhs(&y.axpy(dt, &k3));
    y.axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4)
}

/// Gradient of `ℋ(q, s) = <z|H|z> / (2ħ)` with `z = q + i s`.
///
/// Returns `(∂ℋ/∂q, ∂ℋ/∂s) = (Re Hz, Im Hz) / ħ` for Hermitian `H`.
pub fn hamiltonian_gradient(
    h: &DMatrix<C64>,
    q: &[f64],
    s: &[f64],
    hbar: f64,
) -> (Vec<f64>, Vec<f64>) {
    let z = DVector::from_fn(q.len(), |k, _| C64::new(q[k], s[k]));
    let w = h * z;
    (
        w.iter().map(|c| c.re / hbar).collect(),
        w.iter().map(|c| c.im / hbar).collect(),
    )
}

/// Hamilton's equations `dq/dt = ∂ℋ/∂s`, `ds/dt = -∂ℋ/∂q` integrated by RK4.
///
/// The state is renormalized after every step; the largest drift before
/// renormalization is stored in the trajectory meta. Integration starts from
/// `psi0` at `t = 0`; all requested times must be nonnegative.
pub fn realcoord_flow(
    h: &Operator,
    psi0: &ProjectiveState,
    times: &[f64],
    hbar: f64,
    cfg: Rk4Config,
) -> Result<Trajectory<ProjectiveState>> {
    validate_times(times)?;
    if times[0] < 0.0 {
        return Err(Error::InvalidTimes);
    }
    validate_hbar(hbar)?;
    cfg.validate()?;
    same_dim(h.dim(), psi0.dim())?;
    let deviation = h.hermiticity_deviation();
    if !h.is_hermitian() {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.dim();
    let hm = h.matrix().clone();
    let rhs = |y: &DVector<f64>| {
        let (q, s) = y.as_slice().split_at(n);
        let (dh_dq, dh_ds) = hamiltonian_gradient(&hm, q, s, hbar);
        DVector::from_iterator(
            2 * n,
            dh_ds.into_iter().chain(dh_dq.into_iter().map(|x| -x)),
        )
    };
    let mut y = DVector::from_iterator(2 * n, psi0.q().into_iter().chain(psi0.s()));
    let mut t_cur = 0.0;
    let mut max_drift: f64 = 0.0;
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - t_cur;
        if span > 0.0 {
            let (steps, dt) = cfg.steps(span);
            for k in 0..steps {
                y = rk4_step(&y, dt, &rhs);
                let norm = y.norm();
                let drift = (norm - 1.0).abs();
                max_drift = max_drift.max(drift);
                if !(drift <= MAX_NORM_DRIFT) {
                    return Err(Error::Divergence {
                        time: t_cur + (k + 1) as f64 * dt,
                        drift,
                    });
                }
                y /= norm;
            }
        }
        t_cur = t;
        let z = DVector::from_fn(n, |k, _| C64::new(y[k], y[n + k]));
        points.push(ProjectiveState::from_vector(z)?);
    }
    let mut meta = TrajectoryMeta::new("rk4-realcoord", hbar);
    meta.dt = Some(cfg.dt);
    meta.max_norm_drift = Some(max_drift);
    Ok(Trajectory {
        times: times.to_vec(),
        points,
        meta,
    })
}

/// Per-time comparison of Schrödinger and Heisenberg descriptions.
#[derive(Clone, Debug, Serialize)]
pub struct PictureReport {
    pub times: Vec<f64>,
    /// `<ψ(t)|A0|ψ(t)>`.
    pub schrodinger: Vec<C64>,
    /// `<ψ0|A(t)|ψ0>`.
    pub heisenberg: Vec<C64>,
    pub max_zeroth_deviation: f64,
    /// Largest jet-component gap between `ncvalue(A0, ψ(t))` and the
    /// Heisenberg jet at `ψ0` transported by `U(t)`.
    pub max_jet_deviation: f64,
}

pub fn picture_equivalence_check(
    h: &Operator,
    a0: &Operator,
    psi0: &ProjectiveState,
    times: &[f64],
    hbar: f64,
) -> Result<PictureReport> {
    let states = schrodinger_propagate(h, psi0, times, hbar)?;
    let ops = heisenberg_propagate(h, a0, times, hbar)?;
    let prop = SpectralPropagator::new(h, hbar)?;
    let mut report = PictureReport {
        times: times.to_vec(),
        schrodinger: Vec::with_capacity(times.len()),
        heisenberg: Vec::with_capacity(times.len()),
        max_zeroth_deviation: 0.0,
        max_jet_deviation: 0.0,
    };
    for ((&t, psi_t), a_t) in times.iter().zip(states.points()).zip(ops.points()) {
        let s_side = ncvalue(a0, psi_t)?;
        let h_side = ncvalue(a_t, psi0)?.transport(&prop.unitary(t))?;
        report.max_zeroth_deviation = report
            .max_zeroth_deviation
            .max((s_side.f() - h_side.f()).norm());
        report.max_jet_deviation = report
            .max_jet_deviation
            .max(s_side.max_component_diff(&h_side))
            .max(s_side.base().max_abs_diff(h_side.base()));
        report.schrodinger.push(s_side.f());
        report.heisenberg.push(h_side.f());
    }
    Ok(report)
}

/// One term `coeff · X^x_power · P^p_power` of a polynomial Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub x_power: u32,
    pub p_power: u32,
}

/// Polynomial in `X` and `P`. Only separable forms `T(P) + V(X)` can be
/// flowed; see [`PolynomialHamiltonian::separate`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialHamiltonian {
    pub terms: Vec<Monomial>,
}

/// `T(P) + V(X)` as `(power, coefficient)` lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Separable {
    pub kinetic: Vec<(u32, f64)>,
    pub potential: Vec<(u32, f64)>,
    pub constant: f64,
}

impl PolynomialHamiltonian {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    /// `P²/2m + mω²X²/2`.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        Self::new(vec![
            Monomial {
                coeff: 0.5 / mass,
                x_power: 0,
                p_power: 2,
            },
            Monomial {
                coeff: 0.5 * mass * omega * omega,
                x_power: 2,
                p_power: 0,
            },
        ])
    }

    /// Rejects any term containing both `X` and `P`: their operator
    /// derivatives depend on an ordering convention.
    pub fn separate(&self) -> Result<Separable> {
        let mut out = Separable {
            kinetic: Vec::new(),
            potential: Vec::new(),
            constant: 0.0,
        };
        for m in &self.terms {
            match (m.x_power, m.p_power) {
                (0, 0) => out.constant += m.coeff,
                (0, p) => out.kinetic.push((p, m.coeff)),
                (x, 0) => out.potential.push((x, m.coeff)),
                _ => {
                    return Err(Error::MixedMonomial {
                        coeff: m.coeff,
                        x_power: m.x_power,
                        p_power: m.p_power,
                    })
                }
            }
        }
        Ok(out)
    }

    /// The operator `T(P) + V(X)` built from the system's matrices.
    pub fn operator(&self, sys: &OscillatorSystem) -> Result<Operator> {
        let sep = self.separate()?;
        let n = sys.n();
        let mut m = DMatrix::<C64>::identity(n, n) * C64::new(sep.constant, 0.0);
        m += poly_eval(&sep.kinetic, sys.p().matrix());
        m += poly_eval(&sep.potential, sys.x().matrix());
        Ok(Operator::wrap(m))
    }
}

fn poly_eval(terms: &[(u32, f64)], x: &DMatrix<C64>) -> DMatrix<C64> {
    let n = x.nrows();
    let max = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let mut out = DMatrix::zeros(n, n);
    let mut power = DMatrix::identity(n, n);
    for k in 0..=max {
        for &(p, c) in terms {
            if p == k {
                out += &power * C64::new(c, 0.0);
            }
        }
        if k < max {
            power = &power * x;
        }
    }
    out
}

fn poly_derivative(terms: &[(u32, f64)]) -> Vec<(u32, f64)> {
    terms
        .iter()
        .filter(|t| t.0 > 0)
        .map(|&(p, c)| (p - 1, c * p as f64))
        .collect()
}

/// The pair `(X(t), P(t))` carried by the operator Hamilton flow.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseOperators {
    pub x: DMatrix<C64>,
    pub p: DMatrix<C64>,
}

impl Rk4State for PhaseOperators {
    fn axpy(&self, a: f64, k: &Self) -> Self {
        let a = C64::new(a, 0.0);
        PhaseOperators {
            x: &self.x + &k.x * a,
            p: &self.p + &k.p * a,
        }
    }
}

impl PhaseOperators {
    pub fn x_operator(&self) -> Operator {
        Operator::wrap(self.x.clone())
    }

    pub fn p_operator(&self) -> Operator {
        Operator::wrap(self.p.clone())
    }
}

/// Integrates `dX/dt = T'(P)`, `dP/dt = -V'(X)` entrywise with RK4, starting
/// from the system's `X`, `P` at `t = 0`.
pub fn hamilton_operator_flow(
    ham: &PolynomialHamiltonian,
    sys: &OscillatorSystem,
    times: &[f64],
    cfg: Rk4Config,
) -> Result<Trajectory<PhaseOperators>> {
    validate_times(times)?;
    if times[0] < 0.0 {
        return Err(Error::InvalidTimes);
    }
    cfg.validate()?;
    let sep = ham.separate()?;
    let dt_kinetic = poly_derivative(&sep.kinetic);
    let dv_potential = poly_derivative(&sep.potential);
    let rhs = |y: &PhaseOperators| PhaseOperators {
        x: poly_eval(&dt_kinetic, &y.p),
        p: -poly_eval(&dv_potential, &y.x),
    };
    let mut y = PhaseOperators {
        x: sys.x().matrix().clone(),
        p: sys.p().matrix().clone(),
    };
    let mut t_cur = 0.0;
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - t_cur;
        if span > 0.0 {
            let (steps, dt) = cfg.steps(span);
            for _ in 0..steps {
                y = rk4_step(&y, dt, &rhs);
            }
        }
        t_cur = t;
        points.push(y.clone());
    }
    let mut meta = TrajectoryMeta::new("rk4-hamilton-operator", sys.hbar());
    meta.dt = Some(cfg.dt);
    Ok(Trajectory {
        times: times.to_vec(),
        points,
        meta,
    })
}

/// Largest entry of `a - b` over the leading `block × block` corner.
pub fn leading_block_diff(a: &DMatrix<C64>, b: &DMatrix<C64>, block: usize) -> f64 {
    let ab = a.view((0, 0), (block, block)).into_owned();
    let bb = b.view((0, 0), (block, block)).into_owned();
    max_abs_diff(&ab, &bb)
}

/// Evenly spaced grid of `count` points on `[start, end]`.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (end - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;
    use crate::models::{build_oscillator, pauli_system};

    #[test]
    fn stationary_eigenstate() {
        let p = pauli_system();
        let up = ProjectiveState::basis(2, 0);
        let traj = schrodinger_propagate(&p.z, &up, &[0.0, PI], 1.0).unwrap();
        assert!(traj.last().unwrap().ray_distance(&up) < 1e-15);
    }

    #[test]
    fn sigma_x_rotation() {
        let p = pauli_system();
        let up = ProjectiveState::basis(2, 0);
        let traj = schrodinger_propagate(&p.x, &up, &[FRAC_PI_4, FRAC_PI_2], 1.0).unwrap();
        let quarter = &traj.points()[0];
        let expected =
            ProjectiveState::from_slice(&[C64::new(1.0, 0.0), C64::new(0.0, -1.0)]).unwrap();
        assert!(quarter.max_abs_diff(&expected) < 1e-15);
        assert!((quarter.fidelity(&up) - 0.5).abs() < 1e-15);
        let half = &traj.points()[1];
        assert!(half.ray_distance(&ProjectiveState::basis(2, 1)) < 1e-15);
    }

    #[test]
    fn schrodinger_rejects_bad_input() {
        let p = pauli_system();
        let lowering = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let up = ProjectiveState::basis(2, 0);
        assert!(matches!(
            schrodinger_propagate(&lowering, &up, &[1.0], 1.0),
            Err(Error::NotHermitian { .. })
        ));
        assert!(schrodinger_propagate(&p.x, &ProjectiveState::basis(3, 0), &[1.0], 1.0).is_err());
        assert!(matches!(
            schrodinger_propagate(&p.x, &up, &[1.0, 1.0], 1.0),
            Err(Error::InvalidTimes)
        ));
    }

    #[test]
    fn spin_precession() {
        // A(t) = cos 2t σx - sin 2t σy for H = σz
        let p = pauli_system();
        let traj = heisenberg_propagate(&p.z, &p.x, &[FRAC_PI_4, FRAC_PI_2], 1.0).unwrap();
        assert!(traj.points()[0].max_abs_diff(&p.y.scale(C64::new(-1.0, 0.0))) < 1e-15);
        assert!(traj.points()[1].max_abs_diff(&p.x.scale(C64::new(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn hamiltonian_is_conserved_in_heisenberg_picture() {
        let sys = build_oscillator(8, 1.0, 1.0, 1.0).unwrap();
        let traj = heisenberg_propagate(sys.h(), sys.h(), &linspace(0.0, 3.0, 5), 1.0).unwrap();
        for a in traj.points() {
            assert!(a.max_abs_diff(sys.h()) < 1e-12);
        }
    }

    #[test]
    fn oscillator_position_rotates_into_momentum() {
        let sys = build_oscillator(16, 1.0, 1.0, 1.0).unwrap();
        let traj = heisenberg_propagate(sys.h(), sys.x(), &[FRAC_PI_2], 1.0).unwrap();
        let x = traj.points()[0].matrix();
        assert!(leading_block_diff(x, sys.p().matrix(), 14) < TOL_TRUNC);
    }

    #[test]
    fn realcoord_identity_is_stationary() {
        let psi = ProjectiveState::from_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let traj = realcoord_flow(
            &Operator::identity(2),
            &psi,
            &linspace(0.0, 2.0, 5),
            1.0,
            Rk4Config { dt: 1e-2 },
        )
        .unwrap();
        for p in traj.points() {
            assert!(p.ray_distance(&psi) < 1e-13);
        }
    }

    #[test]
    fn realcoord_diverges_with_huge_step() {
        let p = pauli_system();
        let up = ProjectiveState::basis(2, 0);
        let big = p.x.scale(C64::new(100.0, 0.0));
        let res = realcoord_flow(&big, &up, &[1.0], 1.0, Rk4Config { dt: 0.5 });
        assert!(matches!(res, Err(Error::Divergence { .. })));
    }

    #[test]
    fn mixed_monomials_rejected() {
        let sys = build_oscillator(4, 1.0, 1.0, 1.0).unwrap();
        let ham = PolynomialHamiltonian::new(vec![Monomial {
            coeff: 1.0,
            x_power: 1,
            p_power: 1,
        }]);
        assert!(matches!(
            hamilton_operator_flow(&ham, &sys, &[0.1], Rk4Config { dt: 1e-2 }),
            Err(Error::MixedMonomial { .. })
        ));
    }

    #[test]
    fn free_particle_momentum_is_constant() {
        let sys = build_oscillator(8, 1.0, 1.0, 1.0).unwrap();
        let ham = PolynomialHamiltonian::new(vec![Monomial {
            coeff: 0.5,
            x_power: 0,
            p_power: 2,
        }]);
        let traj =
            hamilton_operator_flow(&ham, &sys, &linspace(0.0, 1.0, 3), Rk4Config { dt: 1e-2 })
                .unwrap();
        for y in traj.points() {
            assert_eq!(&y.p, sys.p().matrix());
        }
    }

    #[test]
    fn state_csv_layout() {
        let p = pauli_system();
        let up = ProjectiveState::basis(2, 0);
        let traj = schrodinger_propagate(&p.x, &up, &[0.0, 1.0], 1.0).unwrap();
        let mut buf = Vec::new();
        traj.write_state_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {\"propagator\":\"spectral-schrodinger\""));
        assert_eq!(lines[1], "t,re_0,im_0,re_1,im_1");
        assert_eq!(lines.len(), 4);
        let mut buf = Vec::new();
        traj.write_observables_csv(&mut buf, &[("z", &p.z)])
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1), Some("t,z"));
    }
}
