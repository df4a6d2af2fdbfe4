// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::hilbert::Operator;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NonSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("dimension {0} is too small (need at least {1})")]
    DimTooSmall(usize, usize),

    #[error("non-finite number in {0}")]
    NonFinite(&'static str),

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("values live at different states (base deviation {deviation:.3e})")]
    BaseMismatch { deviation: f64 },

    #[error("jet violates tangency identities (residual {residual:.3e})")]
    JetInvariant { residual: f64 },

    #[error("finite-difference step {0:e} outside [1e-8, 1e-3]")]
    StepOutOfRange(f64),

    #[error("time grid must be finite and strictly increasing")]
    InvalidTimes,

    #[error("integrator diverged at t={time}: norm drift {drift:.3e}")]
    Divergence { time: f64, drift: f64 },

    #[error("Hamiltonian term {coeff}·X^{x_power}·P^{p_power} mixes X and P")]
    MixedMonomial {
        coeff: f64,
        x_power: u32,
        p_power: u32,
    },

    #[error("coherent amplitude too large for truncation (norm deficit {deficit:.3e})")]
    AlphaTooLarge { deficit: f64 },

    #[error("observable set is not informationally complete: rank {rank} of {needed}")]
    IncompleteObservables {
        rank: usize,
        needed: usize,
        deficient: Vec<Operator>,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
