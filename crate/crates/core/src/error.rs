// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix {rows}x{cols} exceeds the dense size cap of {max}")]
    TooLarge { rows: usize, cols: usize, max: usize },

    #[error("non-finite entry in matrix or vector")]
    NonFinite,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e} > tol {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary (defect {defect:.3e} > tol {tol:.1e})")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("eigenvalue {eigenvalue:.3e} below -{tol:.1e}; operator is not positive semidefinite")]
    NotPositive { eigenvalue: f64, tol: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid Lindbladian: {0}")]
    InvalidLindbladian(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time step {dt} too large: {reason}")]
    StepTooLarge { dt: f64, reason: String },

    #[error("post-selected branch vanishes (probability {probability:.3e})")]
    VanishingBranch { probability: f64 },

    #[error("operator annihilates the input state")]
    Annihilated,

    #[error("linear system is singular beyond regularization (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("padding subspace populated ({population:.3e})")]
    PaddingLeak { population: f64 },
}
