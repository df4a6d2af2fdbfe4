// SPDX-License-Identifier: Apache-2.0

//! Model systems: the Fock-truncated harmonic oscillator and the Pauli
//! algebra.
//!
//! The truncated ladder operator `a` has `a[n-1][n] = √n` for `n < N`. Its
//! commutator is `[a, a†] = I - N|N-1><N-1|`, so the position and momentum
//! built from it satisfy `[X, P] = iħ(I - N|N-1><N-1|)` exactly: canonical
//! on every level but the top one.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dynamics::schrodinger_propagate;
use crate::error::{Error, Result};
use crate::hilbert::{commutator, kron, Operator, ProjectiveState, C64, I, ONE, ZERO};
use crate::ncgeom::{expectation, ncvalue, reconstruct_operator};

const MIN_LEVELS: usize = 4;
const COHERENT_MAX_DEFICIT: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct OscillatorSystem {
    n: usize,
    hbar: f64,
    mass: f64,
    omega: f64,
    a: Operator,
    x: Operator,
    p: Operator,
    h: Operator,
}

pub fn build_oscillator(n: usize, hbar: f64, mass: f64, omega: f64) -> Result<OscillatorSystem> {
    if n < MIN_LEVELS {
        return Err(Error::DimTooSmall(n, MIN_LEVELS));
    }
    for (name, v) in [("hbar", hbar), ("mass", mass), ("omega", omega)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let a = Operator::wrap(DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    }));
    let ad = a.adjoint();
    let x_scale = (hbar / (2.0 * mass * omega)).sqrt();
    let p_scale = (hbar * mass * omega / 2.0).sqrt();
    let x = (&a + &ad).scale(C64::new(x_scale, 0.0));
    let p = (&ad - &a).scale(I * p_scale);
    let kinetic = (&p * &p).scale(C64::new(0.5 / mass, 0.0));
    let potential = (&x * &x).scale(C64::new(0.5 * mass * omega * omega, 0.0));
    let h = &kinetic + &potential;
    Ok(OscillatorSystem {
        n,
        hbar,
        mass,
        omega,
        a,
        x,
        p,
        h,
    })
}

impl OscillatorSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Lowering operator.
    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn x(&self) -> &Operator {
        &self.x
    }

    pub fn p(&self) -> &Operator {
        &self.p
    }

    pub fn h(&self) -> &Operator {
        &self.h
    }

    pub fn fock(&self, k: usize) -> ProjectiveState {
        ProjectiveState::basis(self.n, k)
    }

    /// `[X, P] - iħI`.
    pub fn ccr_defect(&self) -> Operator {
        let c = commutator(&self.x, &self.p).expect("same dimension");
        &c - &Operator::identity(self.n).scale(I * self.hbar)
    }

    /// The defect predicted by the truncation, `-iħN|N-1><N-1|`.
    pub fn expected_ccr_defect(&self) -> Operator {
        let mut m = DMatrix::zeros(self.n, self.n);
        m[(self.n - 1, self.n - 1)] = -I * (self.hbar * self.n as f64);
        Operator::wrap(m)
    }

    /// Truncated coherent state `Σ_{n<N} e^{-|α|²/2} α^n/√(n!) |n>`,
    /// renormalized.
    pub fn coherent_state(&self, alpha: C64) -> Result<ProjectiveState> {
        let mut coeff = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        let mut v = DVector::zeros(self.n);
        for k in 0..self.n {
            if k > 0 {
                coeff *= alpha / (k as f64).sqrt();
            }
            v[k] = coeff;
        }
        let deficit = 1.0 - v.norm_squared();
        if alpha.norm_sqr() > self.n as f64 / 4.0 || deficit > COHERENT_MAX_DEFICIT {
            return Err(Error::AlphaTooLarge {
                deficit: deficit.max(0.0),
            });
        }
        ProjectiveState::from_vector(v)
    }

    /// Classical oscillator flow from `(x0, p0)`.
    pub fn classical_flow(&self, x0: f64, p0: f64, t: f64) -> (f64, f64) {
        let (m, w) = (self.mass, self.omega);
        let (s, c) = (w * t).sin_cos();
        (x0 * c + p0 / (m * w) * s, p0 * c - m * w * x0 * s)
    }
}

/// Two states with equal first moments of `X` and `P` but different jets.
#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyReport {
    pub x_expect: [f64; 2],
    pub p_expect: [f64; 2],
    pub var_x: [f64; 2],
    /// `‖hess_X(|0>) - hess_X(|1>)‖_F`, both in the Fock basis.
    pub hess_distance: f64,
    /// Entrywise error of `reconstruct_operator(ncvalue(X, ·))` against `X`.
    pub reconstruction_error: [f64; 2],
}

pub fn expectation_degeneracy_pair(
    sys: &OscillatorSystem,
) -> Result<(ProjectiveState, ProjectiveState, DegeneracyReport)> {
    let s0 = sys.fock(0);
    let s1 = sys.fock(1);
    let jx0 = ncvalue(&sys.x, &s0)?;
    let jx1 = ncvalue(&sys.x, &s1)?;
    let jp0 = ncvalue(&sys.p, &s0)?;
    let jp1 = ncvalue(&sys.p, &s1)?;
    let hess_distance = (jx0.hess() - jx1.hess()).norm();
    let report = DegeneracyReport {
        x_expect: [jx0.f().re, jx1.f().re],
        p_expect: [jp0.f().re, jp1.f().re],
        var_x: [jx0.variance(), jx1.variance()],
        hess_distance,
        reconstruction_error: [
            reconstruct_operator(&jx0)?.max_abs_diff(&sys.x),
            reconstruct_operator(&jx1)?.max_abs_diff(&sys.x),
        ],
    };
    Ok((s0, s1, report))
}

/// Quantum expectations next to the classical flow seeded at `t = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct EhrenfestTrace {
    pub times: Vec<f64>,
    pub x_expect: Vec<f64>,
    pub p_expect: Vec<f64>,
    pub x_cl: Vec<f64>,
    pub p_cl: Vec<f64>,
}

impl EhrenfestTrace {
    pub fn max_position_deviation(&self) -> f64 {
        self.x_expect
            .iter()
            .zip(&self.x_cl)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_momentum_deviation(&self) -> f64 {
        self.p_expect
            .iter()
            .zip(&self.p_cl)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Columns `t,qx_expect,p_expect,x_cl,p_cl`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,qx_expect,p_expect,x_cl,p_cl")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.times[k], self.x_expect[k], self.p_expect[k], self.x_cl[k], self.p_cl[k]
            )?;
        }
        Ok(())
    }
}

/// `psi0` is taken at `t = 0`; the classical flow starts from its first
/// moments.
pub fn ehrenfest_trace(
    sys: &OscillatorSystem,
    psi0: &ProjectiveState,
    times: &[f64],
) -> Result<EhrenfestTrace> {
    let traj = schrodinger_propagate(&sys.h, psi0, times, sys.hbar)?;
    let x0 = expectation(&sys.x, psi0)?.re;
    let p0 = expectation(&sys.p, psi0)?.re;
    let mut out = EhrenfestTrace {
        times: times.to_vec(),
        x_expect: Vec::with_capacity(times.len()),
        p_expect: Vec::with_capacity(times.len()),
        x_cl: Vec::with_capacity(times.len()),
        p_cl: Vec::with_capacity(times.len()),
    };
    for (t, psi) in traj.iter() {
        out.x_expect.push(expectation(&sys.x, psi)?.re);
        out.p_expect.push(expectation(&sys.p, psi)?.re);
        let (x, p) = sys.classical_flow(x0, p0, t);
        out.x_cl.push(x);
        out.p_cl.push(p);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PauliSystem {
    pub identity: Operator,
    pub x: Operator,
    pub y: Operator,
    pub z: Operator,
}

pub fn pauli_system() -> PauliSystem {
    let m = |e: [C64; 4]| Operator::wrap(DMatrix::from_row_slice(2, 2, &e));
    PauliSystem {
        identity: Operator::identity(2),
        x: m([ZERO, ONE, ONE, ZERO]),
        y: m([ZERO, -I, I, ZERO]),
        z: m([ONE, ZERO, ZERO, -ONE]),
    }
}

impl PauliSystem {
    pub fn sigmas(&self) -> [&Operator; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Largest entrywise violation of `σ_i σ_j = δ_ij I + i ε_ijk σ_k`.
    pub fn algebra_residual(&self) -> f64 {
        let s = self.sigmas();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let lhs = s[i] * s[j];
                let rhs = if i == j {
                    self.identity.clone()
                } else {
                    let k = 3 - i - j;
                    let sign = if (i + 1) % 3 == j { 1.0 } else { -1.0 };
                    s[k].scale(I * sign)
                };
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
        worst
    }
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` on factor `site` of a product space with
/// factor dimensions `dims`.
pub fn embed(op: &Operator, site: usize, dims: &[usize]) -> Result<Operator> {
    if site >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {} factors",
            dims.len()
        )));
    }
    if dims[site] != op.dim() {
        return Err(Error::DimMismatch {
            expected: dims[site],
            found: op.dim(),
        });
    }
    let factor = |k: usize| {
        if k == site {
            op.clone()
        } else {
            Operator::identity(dims[k])
        }
    };
    Ok((1..dims.len()).fold(factor(0), |acc, k| kron(&acc, &factor(k))))
}
