// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Evolution strategies beyond direct dilation: Monte Carlo sampling of
//! mixed-unitary channels, purification, QITE and variational evolution.

pub mod monte_carlo;
pub mod pauli;
pub mod purification;
pub mod qite;
pub mod variational;

pub use monte_carlo::{mc_estimate, mc_observables, McEstimate, MixedUnitaryChannel};
pub use pauli::{pauli_basis, PauliString};
pub use purification::{purified_evolve, purified_trajectory, purify, PurifiedState};
pub use qite::{qite_basis, qite_evolve};
pub use variational::{variational_evolve, Ansatz, EomScheme, EomVariant, Gate, VariationalTrajectory};
