// SPDX-License-Identifier: Apache-2.0

//! Noncommutative values as 2-jets of expectation functions.
//!
//! For an operator `A` the expectation function on rays is
//! `f_A(z, z̄) = (z̄·A·z) / (z̄·z)`, with `z` and `z̄` treated as independent
//! variables. An [`NCValue`] stores, at the gauge-fixed unit representative
//! `ψ` of a ray:
//!
//! - `f = f_A(ψ)`,
//! - `grad_z[m] = ∂f/∂z_m` (a covector, equal to `(ψ†A Q)_m`),
//! - `grad_zbar[n] = ∂f/∂z̄_n` (a vector, equal to `(Q A ψ)_n`),
//! - `hess[n][m] = ∂²f/∂z̄_n ∂z_m` (equal to `Q (A - f) Q`),
//!
//! where `Q = I - |ψ><ψ|`. Since `f_A` is homogeneous of degree zero in `z`
//! and in `z̄`, the jet obeys the tangency identities
//! `grad_z·z = 0`, `z̄·grad_zbar = 0`, `hess·z = 0`, `z̄·hess = 0`.
//!
//! Splitting `A = PAP + QAP + PAQ + QAQ` shows that the four blocks are
//! exactly `f P`, `grad_zbar ψ†`, `ψ grad_z`, `hess + f Q`, so a jet carries
//! the whole operator. The star product below multiplies those blocks
//! without ever forming the operators.

mod fd;

pub use fd::{finite_difference_jet, finite_difference_real_jet};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{
    complement_projector, max_abs_diff, same_dim, MaxModulus, Operator, ProjectiveState, C64, I,
    ZERO,
};
use crate::tolerance::{TOL_JET, TOL_NORM};

/// Second-order jet of an expectation function at a state.
#[derive(Clone, Debug, PartialEq)]
pub struct NCValue {
    base: ProjectiveState,
    f: C64,
    grad_z: DVector<C64>,
    grad_zbar: DVector<C64>,
    hess: DMatrix<C64>,
}

impl NCValue {
    /// Assembles a jet from components. Only shapes and finiteness are
    /// checked here; see [`NCValue::tangency_residual`].
    pub fn new(
        base: ProjectiveState,
        f: C64,
        grad_z: DVector<C64>,
        grad_zbar: DVector<C64>,
        hess: DMatrix<C64>,
    ) -> Result<Self> {
        let n = base.dim();
        same_dim(n, grad_z.len())?;
        same_dim(n, grad_zbar.len())?;
        same_dim(n, hess.nrows())?;
        same_dim(n, hess.ncols())?;
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !finite(&f)
            || !grad_z.iter().all(finite)
            || !grad_zbar.iter().all(finite)
            || !hess.iter().all(finite)
        {
            return Err(Error::NonFinite("jet components"));
        }
        Ok(Self {
            base,
            f,
            grad_z,
            grad_zbar,
            hess,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &ProjectiveState {
        &self.base
    }

    pub fn f(&self) -> C64 {
        self.f
    }

    pub fn grad_z(&self) -> &DVector<C64> {
        &self.grad_z
    }

    pub fn grad_zbar(&self) -> &DVector<C64> {
        &self.grad_zbar
    }

    pub fn hess(&self) -> &DMatrix<C64> {
        &self.hess
    }

    /// Largest violation of the four tangency identities.
    pub fn tangency_residual(&self) -> f64 {
        let z = self.base.amplitudes();
        let zbar = z.map(|c| c.conj());
        let a = self.grad_z.dot(z).norm();
        let b = zbar.dot(&self.grad_zbar).norm();
        let c = (&self.hess * z).max_modulus();
        let d = (self.hess.transpose() * &zbar).max_modulus();
        a.max(b).max(c).max(d)
    }

    /// Largest modulus over all jet components (not the base) of
    /// `self - other`.
    pub fn max_component_diff(&self, other: &NCValue) -> f64 {
        let f = (self.f - other.f).norm();
        let g = (&self.grad_z - &other.grad_z).max_modulus();
        let gb = (&self.grad_zbar - &other.grad_zbar).max_modulus();
        let h = max_abs_diff(&self.hess, &other.hess);
        f.max(g).max(gb).max(h)
    }

    pub fn scale(&self, c: C64) -> NCValue {
        NCValue {
            base: self.base.clone(),
            f: self.f * c,
            grad_z: &self.grad_z * c,
            grad_zbar: &self.grad_zbar * c,
            hess: &self.hess * c,
        }
    }

    pub fn add(&self, other: &NCValue) -> Result<NCValue> {
        check_same_base(self, other)?;
        Ok(NCValue {
            base: self.base.clone(),
            f: self.f + other.f,
            grad_z: &self.grad_z + &other.grad_z,
            grad_zbar: &self.grad_zbar + &other.grad_zbar,
            hess: &self.hess + &other.hess,
        })
    }

    /// `Σ_n |∂f/∂z_n|²`, the variance of a Hermitian source in the state.
    pub fn variance(&self) -> f64 {
        self.grad_z.norm_squared()
    }

    /// The jet of `U A U†` at the gauge-fixed image of the base under a
    /// unitary `U`.
    pub fn transport(&self, u: &Operator) -> Result<NCValue> {
        same_dim(self.dim(), u.dim())?;
        let w = u.matrix() * self.base.amplitudes();
        let new_base = ProjectiveState::from_vector(w.clone())?;
        // new_base = phase · w with |phase| = 1
        let phase = w.dotc(new_base.amplitudes()) / w.norm_squared();
        let um = u.matrix();
        let grad_zbar = um * &self.grad_zbar * phase;
        let grad_z = um.map(|c| c.conj()) * &self.grad_z * phase.conj();
        let hess = um * &self.hess * um.adjoint();
        NCValue::new(new_base, self.f, grad_z, grad_zbar, hess)
    }

    /// The same jet in real coordinates `q_n = Re z_n`, `s_n = Im z_n`.
    ///
    /// The pure second derivatives `∂²f/∂z∂z` and `∂²f/∂z̄∂z̄` are not stored;
    /// at a unit base they follow from the gradients and the base:
    /// `∂²f/∂z_n∂z_m = -(g_m z̄_n + g_n z̄_m)` with `g = grad_z`, and the
    /// conjugate-side analogue with `grad_zbar` and `z`.
    pub fn real_jet(&self) -> RealJet {
        let n = self.dim();
        let z = self.base.amplitudes();
        let g = &self.grad_z;
        let gb = &self.grad_zbar;
        let hb = &self.hess;
        let fzz = |a: usize, b: usize| -(g[b] * z[a].conj() + g[a] * z[b].conj());
        let fzbzb = |a: usize, b: usize| -(gb[b] * z[a] + gb[a] * z[b]);

        let mut hessian = DMatrix::from_element(2 * n, 2 * n, ZERO);
        for a in 0..n {
            for b in 0..n {
                let zz = fzz(a, b);
                let bb = fzbzb(a, b);
                let mixed_ab = hb[(a, b)];
                let mixed_ba = hb[(b, a)];
                hessian[(a, b)] = zz + mixed_ba + mixed_ab + bb;
                let qs = I * (zz + mixed_ab - mixed_ba - bb);
                hessian[(a, n + b)] = qs;
                hessian[(n + b, a)] = qs;
                hessian[(n + a, n + b)] = -(zz - mixed_ba - mixed_ab + bb);
            }
        }
        RealJet {
            f: self.f,
            grad_q: DVector::from_fn(n, |k, _| g[k] + gb[k]),
            grad_s: DVector::from_fn(n, |k, _| I * (g[k] - gb[k])),
            hessian,
        }
    }
}

/// A jet expressed through derivatives in `(q_0..q_{N-1}, s_0..s_{N-1})`.
///
/// Entries are complex because `f_A` is complex for non-Hermitian `A`; for
/// Hermitian sources they are real up to rounding.
#[derive(Clone, Debug)]
pub struct RealJet {
    pub f: C64,
    pub grad_q: DVector<C64>,
    pub grad_s: DVector<C64>,
    /// `2N × 2N` Hessian, `q` block first.
    pub hessian: DMatrix<C64>,
}

impl RealJet {
    pub fn max_component_diff(&self, other: &RealJet) -> f64 {
        let f = (self.f - other.f).norm();
        let q = (&self.grad_q - &other.grad_q).max_modulus();
        let s = (&self.grad_s - &other.grad_s).max_modulus();
        let h = max_abs_diff(&self.hessian, &other.hessian);
        f.max(q).max(s).max(h)
    }
}

fn check_dims(a: &Operator, psi: &ProjectiveState) -> Result<()> {
    same_dim(a.dim(), psi.dim())
}

fn check_same_base(u: &NCValue, v: &NCValue) -> Result<()> {
    same_dim(u.dim(), v.dim())?;
    let deviation = u.base.max_abs_diff(&v.base);
    if deviation > TOL_NORM {
        return Err(Error::BaseMismatch { deviation });
    }
    Ok(())
}

/// `<ψ|A|ψ>` at the unit representative.
pub fn expectation(a: &Operator, psi: &ProjectiveState) -> Result<C64> {
    check_dims(a, psi)?;
    let z = psi.amplitudes();
    Ok(z.dotc(&(a.matrix() * z)))
}

/// The analytic 2-jet of `f_A` at `psi`.
pub fn ncvalue(a: &Operator, psi: &ProjectiveState) -> Result<NCValue> {
    check_dims(a, psi)?;
    let z = psi.amplitudes();
    let am = a.matrix();
    let az = am * z;
    let f = z.dotc(&az);
    let grad_zbar = &az - z * f;
    // row ψ†A, stored as a plain (unconjugated) vector
    let za: DVector<C64> = (z.adjoint() * am).transpose();
    let grad_z = za - z.map(|c| c.conj()) * f;
    let q = complement_projector(z);
    let n = a.dim();
    let shifted = am - DMatrix::<C64>::identity(n, n) * f;
    let hess = &q * shifted * &q;
    NCValue::new(psi.clone(), f, grad_z, grad_zbar, hess)
}

/// Rebuilds the operator from its jet:
/// `A = f I + grad_zbar ψ† + ψ grad_z + hess`.
pub fn reconstruct_operator(v: &NCValue) -> Result<Operator> {
    let residual = v.tangency_residual();
    if residual > TOL_JET {
        return Err(Error::JetInvariant { residual });
    }
    let n = v.dim();
    let z = v.base.amplitudes();
    let m = DMatrix::<C64>::identity(n, n) * v.f
        + &v.grad_zbar * z.adjoint()
        + z * v.grad_z.transpose()
        + &v.hess;
    Operator::from_matrix(m)
}

/// The star product of two jets at the same state.
///
/// With `c = grad_zbar`, `r = grad_z` and `H = hess` for each factor:
///
/// ```text
/// f   = f_u f_v + r_u·c_v
/// c   = f_v c_u + f_u c_v + H_u c_v
/// r   = f_u r_v + f_v r_u + r_u H_v
/// H   = c_u r_v + H_u H_v + f_v H_u + f_u H_v - (r_u·c_v) Q
/// ```
pub fn star_product(u: &NCValue, v: &NCValue) -> Result<NCValue> {
    check_same_base(u, v)?;
    let z = u.base.amplitudes();
    let cross = u.grad_z.dot(&v.grad_zbar);
    let f = u.f * v.f + cross;
    let grad_zbar = &u.grad_zbar * v.f + &v.grad_zbar * u.f + &u.hess * &v.grad_zbar;
    let grad_z = &v.grad_z * u.f + &u.grad_z * v.f + v.hess.transpose() * &u.grad_z;
    let q = complement_projector(z);
    let hess =
        &u.grad_zbar * v.grad_z.transpose() + &u.hess * &v.hess + &u.hess * v.f + &v.hess * u.f
            - q * cross;
    NCValue::new(u.base.clone(), f, grad_z, grad_zbar, hess)
}

/// `<AB> - <A><B>`, the failure of expectation values to multiply.
pub fn multiplicativity_defect(a: &Operator, b: &Operator, psi: &ProjectiveState) -> Result<C64> {
    same_dim(a.dim(), b.dim())?;
    let ab = a.product(b)?;
    Ok(expectation(&ab, psi)? - expectation(a, psi)? * expectation(b, psi)?)
}

/// `((u⋆v).f - (v⋆u).f) / (iħ)`.
pub fn poisson_bracket(u: &NCValue, v: &NCValue, hbar: f64) -> Result<C64> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    let uv = star_product(u, v)?;
    let vu = star_product(v, u)?;
    Ok((uv.f - vu.f) / (I * hbar))
}

/// `((u⋆v).f + (v⋆u).f) / 2`, the symmetric part of the product at order zero.
pub fn jordan_product_value(u: &NCValue, v: &NCValue) -> Result<C64> {
    check_same_base(u, v)?;
    let sym = u.grad_z.dot(&v.grad_zbar) + v.grad_z.dot(&u.grad_zbar);
    Ok(u.f * v.f + sym * 0.5)
}
