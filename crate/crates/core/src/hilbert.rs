// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional states and operators.
//!
//! [`Operator`] wraps a dense complex matrix and remembers whether it is
//! Hermitian. [`ProjectiveState`] is the gauge-fixed unit representative of a
//! ray: unit norm, with the first component of modulus above
//! [`GAUGE_EPS`](crate::tolerance::GAUGE_EPS) real and positive.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{GAUGE_EPS, TOL_HERM, TOL_NORM, TOL_SPEC};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense complex square matrix, `dim >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    /// Validates `entries` (row-major) as a `dim`×`dim` operator.
    pub fn new(dim: usize, entries: &[Vec<C64>]) -> Result<Self> {
        if entries.len() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: entries.len(),
            });
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != entries.len() {
                return Err(Error::NonSquare {
                    rows: entries.len(),
                    row,
                    cols: r.len(),
                });
            }
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| entries[i][j]);
        Self::from_matrix(m)
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                row: 0,
                cols: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(Error::DimTooSmall(m.nrows(), 2));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(Self::wrap(m))
    }

    /// Wraps a matrix already known to be square and finite.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        let hermitian = hermiticity_deviation(&m) <= TOL_HERM;
        Self { m, hermitian }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let entries: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::new(rows.len(), &entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::wrap(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::wrap(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// `|a><b|` for two vectors of equal length.
    pub fn outer(a: &DVector<C64>, b: &DVector<C64>) -> Self {
        Self::wrap(a * b.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.m)
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.m.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::wrap(&self.m * c)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.m, &other.m)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn product(&self, other: &Operator) -> Result<Operator> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self::wrap(&self.m * &other.m))
    }

    pub fn powi(&self, k: u32) -> Operator {
        let mut out = DMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            out = &out * &self.m;
        }
        Self::wrap(out)
    }

    /// `(AB + BA) / 2`.
    pub fn jordan(&self, other: &Operator) -> Result<Operator> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self::wrap(
            (&self.m * &other.m + &other.m * &self.m) * C64::new(0.5, 0.0),
        ))
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        same_dim(self.dim(), v.len())?;
        Ok(&self.m * v)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.product(rhs).expect("operator dimensions differ")
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        Operator::wrap(&self.m + &rhs.m)
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        Operator::wrap(&self.m - &rhs.m)
    }
}

/// `AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    same_dim(a.dim(), b.dim())?;
    Ok(Operator::wrap(&a.m * &b.m - &b.m * &a.m))
}

/// Kronecker product `a ⊗ b`, used to compose independent degrees of freedom.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator::wrap(a.m.kronecker(&b.m))
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> DVector<C64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let c = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= c;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.apply_fn(|l| C64::new(l, 0.0))
    }
}

pub fn spectral_decompose(a: &Operator) -> Result<Spectrum> {
    let deviation = a.hermiticity_deviation();
    if deviation > TOL_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (&a.m + a.m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Phase convention for ray representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// Unit norm; first component with modulus above `GAUGE_EPS` is real and
    /// positive.
    FirstNonzeroRealPositive,
}

/// Gauge-fixed unit vector representing a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveState {
    amps: DVector<C64>,
}

impl ProjectiveState {
    pub fn from_vector(v: DVector<C64>) -> Result<Self> {
        gauge_fix(v)
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        gauge_fix(DVector::from_column_slice(v))
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        gauge_fix(DVector::from_iterator(
            v.len(),
            v.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = ONE;
        Self { amps: v }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn gauge(&self) -> Gauge {
        Gauge::FirstNonzeroRealPositive
    }

    /// Real parts `q_n = Re z_n`.
    pub fn q(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.re).collect()
    }

    /// Imaginary parts `s_n = Im z_n`.
    pub fn s(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.im).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ProjectiveState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amps, &self.amps)
    }

    pub fn fidelity(&self, other: &ProjectiveState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Sine of the Fubini–Study angle, computed as the norm of the component
    /// of `other` orthogonal to `self` so that it stays accurate near zero.
    pub fn ray_distance(&self, other: &ProjectiveState) -> f64 {
        let overlap = self.inner(other);
        (&other.amps - &self.amps * overlap).norm()
    }

    pub fn max_abs_diff(&self, other: &ProjectiveState) -> f64 {
        (&self.amps - &other.amps)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// True if `amps` already satisfies the gauge invariants bit-for-bit.
    fn is_canonical(v: &DVector<C64>) -> bool {
        if (v.norm() - 1.0).abs() > TOL_NORM {
            return false;
        }
        match v.iter().find(|z| z.norm() > GAUGE_EPS) {
            Some(p) => p.im == 0.0 && p.re > 0.0,
            None => false,
        }
    }
}

/// Normalizes `v` and removes its global phase.
pub fn gauge_fix(v: DVector<C64>) -> Result<ProjectiveState> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("state amplitudes"));
    }
    if ProjectiveState::is_canonical(&v) {
        return Ok(ProjectiveState { amps: v });
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut amps = v.unscale(norm);
    let pivot = amps
        .iter()
        .position(|z| z.norm() > GAUGE_EPS)
        .ok_or(Error::ZeroVector)?;
    let p = amps[pivot];
    let phase = p.conj() / p.norm();
    for z in amps.iter_mut() {
        *z *= phase;
    }
    amps[pivot] = C64::new(p.norm(), 0.0);
    Ok(ProjectiveState { amps })
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, found })
    }
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `I - |psi><psi|`.
pub(crate) fn complement_projector(psi: &DVector<C64>) -> DMatrix<C64> {
    let n = psi.len();
    DMatrix::identity(n, n) - psi * psi.adjoint()
}

/// Checks `A = V Λ V†` and `V V† = I`; returns the larger residual.
pub fn spectral_residual(a: &Operator, spec: &Spectrum) -> f64 {
    let n = a.dim();
    let recon = max_abs_diff(&spec.reconstruct(), &a.m);
    let ortho = max_abs_diff(
        &(&spec.eigenvectors * spec.eigenvectors.adjoint()),
        &DMatrix::identity(n, n),
    );
    recon.max(ortho)
}

/// Whether a residual from [`spectral_residual`] is within contract.
pub fn spectral_ok(residual: f64) -> bool {
    residual <= TOL_SPEC
}

/// Largest entry modulus of a complex matrix or vector.
pub trait MaxModulus {
    fn max_modulus(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>> MaxModulus
    for nalgebra::Matrix<C64, R, C, S>
{
    fn max_modulus(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
