// SPDX-License-Identifier: Apache-2.0

//! Absolute tolerances shared by the library, the suites and the tests.
//!
//! All values are absolute bounds on the largest entry (or component) of a
//! difference, in double precision at dimensions up to 64.

/// Hermiticity test: `max |A[i][j] - conj(A[j][i])|`.
pub const TOL_HERM: f64 = 1e-10;

/// Eigendecomposition reconstruction and orthonormality.
pub const TOL_SPEC: f64 = 1e-10;

/// Unit norm of state vectors.
pub const TOL_NORM: f64 = 1e-12;

/// Components below this modulus are skipped when choosing the gauge pivot.
pub const GAUGE_EPS: f64 = 1e-9;

/// Jet components and tangency identities.
pub const TOL_JET: f64 = 1e-9;

/// Star-product identities (homomorphism, associativity).
pub const TOL_STAR: f64 = 1e-8;

/// Exact (spectral) dynamics and cross-picture identities.
pub const TOL_DYN: f64 = 1e-8;

/// Agreement on the interior Fock block of a truncated oscillator.
pub const TOL_TRUNC: f64 = 1e-6;

/// RK4 integrations abort when `| |z| - 1 |` exceeds this before renormalization.
pub const MAX_NORM_DRIFT: f64 = 1e-3;
