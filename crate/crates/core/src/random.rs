// SPDX-License-Identifier: Apache-2.0

//! Seeded random operators and states for property suites.
//!
//! Every generator is a ChaCha stream selected by `(seed, stream)`, so trials
//! can be replayed individually and run in any order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{Operator, ProjectiveState, C64};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ProjectiveState {
    random_state_on_levels(rng, dim, dim)
}

/// Random pure state supported on the first `levels` basis vectors.
pub fn random_state_on_levels<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    levels: usize,
) -> ProjectiveState {
    loop {
        let v = DVector::from_fn(dim, |k, _| {
            if k < levels {
                gaussian(rng)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        if let Ok(s) = ProjectiveState::from_vector(v) {
            return s;
        }
    }
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn random_general<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    Operator::wrap(DMatrix::from_fn(dim, dim, |_, _| gaussian(rng)))
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    Operator::wrap((&g + g.adjoint()) * C64::new(0.5, 0.0))
}

/// Hermitian or general with equal probability.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    if rng.random_bool(0.5) {
        random_hermitian(rng, dim)
    } else {
        random_general(rng, dim)
    }
}
