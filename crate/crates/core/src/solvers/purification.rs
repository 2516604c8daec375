// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Purified evolution: a pure system-bath state under a total Hamiltonian,
//! reduced to the system at each output time. No post-selection is involved.

use rayon::prelude::*;

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::numerics::{
    c, expm, kron, partial_trace, sqrtm_psd, ComplexMatrix, ComplexVector, DEFAULT_TOL,
};

/// `|Ψ^{SB}⟩` on `system ⊗ bath`, system as the more significant factor.
#[derive(Clone, Debug, PartialEq)]
pub struct PurifiedState {
    system_dim: usize,
    bath_dim: usize,
    state: ComplexVector,
}

impl PurifiedState {
    pub fn new(system_dim: usize, bath_dim: usize, state: ComplexVector) -> Result<Self> {
        if state.dim() != system_dim * bath_dim {
            return Err(Error::Dimension(format!(
                "{}-dimensional vector for a {system_dim}x{bath_dim} register",
                state.dim()
            )));
        }
        let n = state.norm();
        if (n - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("purified state norm {n}")));
        }
        Ok(Self {
            system_dim,
            bath_dim,
            state,
        })
    }

    /// `|s⟩ ⊗ |b⟩`.
    pub fn product(system: &ComplexVector, bath: &ComplexVector) -> Result<Self> {
        let v = kron(&col(system), &col(bath))?;
        Self::new(system.dim(), bath.dim(), ComplexVector::wrap(v.column(0).into_owned()))
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_dim
    }

    pub fn state(&self) -> &ComplexVector {
        &self.state
    }

    pub fn reduced(&self) -> Result<DensityMatrix> {
        reduce(&self.state, self.system_dim, self.bath_dim)
    }
}

fn col(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::wrap(nalgebra::DMatrix::from_column_slice(v.dim(), 1, v.as_slice()))
}

fn reduce(v: &ComplexVector, ds: usize, db: usize) -> Result<DensityMatrix> {
    let full = ComplexMatrix::outer(v, v);
    let rs = partial_trace(&full, &[ds, db], &[0])?;
    DensityMatrix::symmetrized(&rs, 1e-10)
}

/// Canonical purification `Σⱼ (√ρ|j⟩) ⊗ |j⟩` with a bath copy of the system
/// space; equal to `Σᵢ √ωᵢ |ψᵢ⟩|ψᵢ*⟩` in the eigenbasis of `ρ`.
pub fn purify(rho: &DensityMatrix) -> Result<PurifiedState> {
    let d = rho.dim();
    let root = sqrtm_psd(rho.matrix(), 1e-9)?;
    let mut amps = Vec::with_capacity(d * d);
    for s in 0..d {
        for b in 0..d {
            amps.push(root.get(s, b));
        }
    }
    let v = ComplexVector::wrap(amps.into());
    let n = v.norm();
    PurifiedState::new(d, d, v.scale(c(1.0 / n, 0.0)))
}

fn check_hamiltonian(psi: &PurifiedState, h: &ComplexMatrix) -> Result<()> {
    let n = psi.state.dim();
    if h.rows() != n || h.cols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} Hamiltonian for a {n}-dimensional register",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > DEFAULT_TOL {
        return Err(Error::NotHermitian {
            defect,
            tol: DEFAULT_TOL,
        });
    }
    Ok(())
}

/// `Tr_B(e^{−iHt}|Ψ⟩⟨Ψ|e^{iHt})`.
pub fn purified_evolve(psi0: &PurifiedState, h_total: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    Ok(purified_trajectory(psi0, h_total, &[t])?.remove(0))
}

/// Reduced system states at each of `times`.
pub fn purified_trajectory(psi0: &PurifiedState, h_total: &ComplexMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    check_hamiltonian(psi0, h_total)?;
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be non-negative")));
    }
    let h = h_total.hermitian_part();
    times
        .par_iter()
        .map(|&t| {
            let u = expm(&h.scale(c(0.0, -t)))?;
            let v = u.apply(&psi0.state);
            reduce(&v, psi0.system_dim, psi0.bath_dim)
        })
        .collect()
}
