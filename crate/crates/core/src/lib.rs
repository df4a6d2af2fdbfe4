// SPDX-License-Identifier: Apache-2.0

//! Noncommutative values of quantum observables.
//!
//! The value of an observable `A` at a pure state `ψ` is taken to be the
//! second-order jet of its expectation function
//! `f_A(z, z̄) = (z̄·A·z) / (z̄·z)` at the gauge-fixed representative of `ψ`.
//! Jets at a common state multiply by a star product that reproduces the
//! operator product exactly, so evaluation at a state becomes an algebra
//! homomorphism even though the plain expectation value is not.
//!
//! Modules:
//!
//! - [`hilbert`]: dense complex operators, gauge-fixed states, spectra.
//! - [`ncgeom`]: jets ([`NCValue`]), the star product, brackets, and a
//!   finite-difference oracle.
//! - [`dynamics`]: Schrödinger, Heisenberg and real phase-space flows.
//! - [`models`]: the truncated oscillator and the Pauli algebra.
//! - [`tomography`]: simulated projective measurements and state
//!   reconstruction.
//! - [`io`]: JSON file formats.

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod models;
pub mod ncgeom;
pub mod random;
pub mod tolerance;
pub mod tomography;

pub use error::{Error, Result};
pub use hilbert::{
    commutator, gauge_fix, kron, spectral_decompose, Operator, ProjectiveState, Spectrum, C64,
};
pub use io::{load, save, JsonFile};
pub use ncgeom::{
    expectation, finite_difference_jet, jordan_product_value, multiplicativity_defect, ncvalue,
    poisson_bracket, reconstruct_operator, star_product, NCValue,
};
