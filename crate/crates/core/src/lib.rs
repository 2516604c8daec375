// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation toolkit for open-quantum-system dynamics.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: dense complex kernels (Kronecker products, matrix
//!   exponential, SVD, PSD square roots, partial traces, vectorization).
//! * [`channels`]: density matrices and Kraus channels with CPTP checks.
//! * [`lindblad`]: GKSL generators and the exact/RK4 classical oracle.
//! * [`dilation`]: Sz.-Nagy, Stinespring, SVD and LCU unitary embeddings.
//! * [`circuit`]: a statevector emulator with ancilla post-selection, used to
//!   run channels through their dilations.
//! * [`solvers`]: Monte Carlo mixed-unitary sampling, purification, QITE on
//!   the vectorized Lindbladian and variational evolution.
//! * [`models`]: benchmark systems (amplitude damping, dephasing, dissipative
//!   TFIM, exciton transfer, radical pair, exchange purification, two-level
//!   spin-boson).

pub mod channels;
pub mod circuit;
pub mod dilation;
pub mod error;
pub mod lindblad;
pub mod models;
pub mod numerics;
pub mod rng;
pub mod solvers;
pub mod testing;

pub use channels::{DensityMatrix, KrausChannel};
pub use error::{Error, Result};
pub use lindblad::{Lindbladian, Superoperator};
pub use numerics::{ComplexMatrix, ComplexVector};
