// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum imaginary-time-style evolution of the vectorized density matrix.
//!
//! Each step replaces the normalized non-unitary update
//! `e^{𝓛dt}|ρ⟩ / ‖e^{𝓛dt}|ρ⟩‖` by a unitary `e^{−iQdt}` with
//! `Q = Σ xᵢσᵢ` fitted in least squares:
//!
//! ```text
//! A_ij = Re⟨r|σᵢσⱼ|r⟩,   b_i = −Im⟨r|σᵢ𝓛|r⟩ / c,   c = ‖(I + dt𝓛)|r⟩‖,
//! (A + λI) x = b.
//! ```
//!
//! The vector norm is not physical; every recorded state is the Hermitian
//! part of the devectorized vector rescaled to unit trace.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::pauli::{pauli_basis, PauliString};
use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::lindblad::{superoperator, Lindbladian};
use crate::numerics::{
    c, devectorize, eigh, expm, next_pow2, solve_regularized_spd, vectorize, ComplexMatrix, ComplexVector,
};

pub const DEFAULT_LAMBDA: f64 = 1e-8;

/// Largest per-step weight a truncated basis may push into padding levels
/// before the run is rejected. The weight is projected out after each step.
pub const PADDING_LEAK_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Most negative eigenvalue clipped from each reconstructed state (0 when
    /// the fitted state was already positive). Truncated bases can leave
    /// small negative eigenvalues.
    pub clipped: Vec<f64>,
    /// Squared weight removed from padding levels at each step.
    pub leaked: Vec<f64>,
}

/// Zero-pads a Lindbladian to `p` levels; the padding block is dynamically
/// inert.
pub fn pad_lindbladian(lind: &Lindbladian, p: usize) -> Result<Lindbladian> {
    if p == lind.dim() {
        return Ok(lind.clone());
    }
    let h = lind.hamiltonian().pad_to(p, c(0.0, 0.0));
    let jumps = lind
        .jumps()
        .iter()
        .map(|j| (j.operator.pad_to(p, c(0.0, 0.0)), j.rate))
        .collect();
    Lindbladian::new(h, jumps)
}

/// Number of qubits of the vectorized register for a `d`-level system.
pub fn register_qubits(d: usize) -> usize {
    2 * next_pow2(d).1
}

/// Full Pauli basis on the vectorized register, or the strings of weight
/// `≤ max_weight`.
pub fn qite_basis(d: usize, max_weight: Option<u32>) -> Result<Vec<PauliString>> {
    pauli_basis(register_qubits(d), max_weight)
}

pub fn steps_for(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt {dt} must be positive")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t {t} must be non-negative")));
    }
    let n = (t / dt).round();
    if (n * dt - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}

/// Sum `Σ xᵢσᵢ` as a dense matrix.
fn pauli_sum(basis: &[PauliString], x: &DVector<f64>, dim: usize) -> ComplexMatrix {
    let mut q = DMatrix::zeros(dim, dim);
    for (p, &w) in basis.iter().zip(x.iter()) {
        if w == 0.0 {
            continue;
        }
        let m = p.to_matrix();
        q += m.inner() * c(w, 0.0);
    }
    ComplexMatrix::wrap(q)
}

/// Evolves `ρ₀` for `t` in steps of `dt`; state `k` is at time `k·dt`.
pub fn qite_evolve(
    lind: &Lindbladian,
    rho0: &DensityMatrix,
    t: f64,
    dt: f64,
    basis: &[PauliString],
    lambda_reg: f64,
) -> Result<Trajectory> {
    if lind.dim() != rho0.dim() {
        return Err(Error::Dimension(format!(
            "dimension-{} state for a dimension-{} model",
            rho0.dim(),
            lind.dim()
        )));
    }
    if !(lambda_reg >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda {lambda_reg} must be ≥ 0")));
    }
    let n_steps = steps_for(t, dt)?;
    let d = lind.dim();
    let (p, _) = next_pow2(d);
    let nq = register_qubits(d);
    if let Some(bad) = basis.iter().find(|s| s.n_qubits != nq) {
        return Err(Error::Dimension(format!(
            "Pauli string {bad} on {} qubits; the vectorized register has {nq}",
            bad.n_qubits
        )));
    }
    let padded = pad_lindbladian(lind, p)?;
    let gen = superoperator(&padded)?.matrix().clone();
    let big = p * p;
    let rho_p = rho0.matrix().pad_to(p, c(0.0, 0.0));
    let v0 = vectorize(&rho_p)?;
    let mut r = v0.normalized();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut clipped = vec![0.0];
    let mut leaked = vec![0.0];
    for k in 1..=n_steps {
        let lr = gen.apply(&r);
        let cnorm = (&r + &lr.scale(c(dt, 0.0))).norm();
        let cols: Vec<ComplexVector> = basis.par_iter().map(|s| s.apply(&r)).collect();
        let g = DMatrix::from_fn(big, cols.len(), |i, j| cols[j].as_slice()[i]);
        let gram = g.adjoint() * &g;
        let a = gram.map(|z| z.re);
        let proj = g.adjoint() * lr.inner();
        let b = proj.map(|z| -z.im / cnorm);
        let x = solve_regularized_spd(&a, &b, lambda_reg)?;
        let q = pauli_sum(basis, &x, big);
        let u = expm(&q.scale(c(0.0, -dt)))?;
        let (next, leak) = drop_padding(&u.apply(&r), d, p);
        if leak > PADDING_LEAK_TOL {
            return Err(Error::PaddingLeak { population: leak });
        }
        r = next;
        times.push(k as f64 * dt);
        let (state, neg) = state_from_vectorized(&r, d)?;
        states.push(state);
        clipped.push(neg);
        leaked.push(leak);
    }
    Ok(Trajectory {
        times,
        states,
        clipped,
        leaked,
    })
}

/// Zeroes the vectorized entries `(i, j)` with `i ≥ d` or `j ≥ d`, returning
/// the renormalized vector and the removed squared weight.
fn drop_padding(r: &ComplexVector, d: usize, p: usize) -> (ComplexVector, f64) {
    if d == p {
        return (r.normalized(), 0.0);
    }
    let mut v = r.as_slice().to_vec();
    let total = r.norm_sqr();
    let mut leak = 0.0;
    for (idx, z) in v.iter_mut().enumerate() {
        let (i, j) = (idx % p, idx / p);
        if i >= d || j >= d {
            leak += z.norm_sqr();
            *z = c(0.0, 0.0);
        }
    }
    (ComplexVector::wrap(v.into()).normalized(), leak / total)
}

/// Hermitian part of `devec(r)` at unit trace, with negative eigenvalues
/// clipped (and reported) so the result is a valid state.
/// Density matrix carried by a (padded, unnormalized) vectorized state:
/// top-left `d×d` block, Hermitian part, unit trace, negative eigenvalues
/// clipped. Also returns the most negative eigenvalue removed (0 if none).
pub fn state_from_vectorized(r: &ComplexVector, d: usize) -> Result<(DensityMatrix, f64)> {
    let m = devectorize(r)?;
    let tr = m.block(0, 0, d, d).trace().re;
    if !(tr.abs() > 1e-300) {
        return Err(Error::InvalidState("fitted state has zero trace".into()));
    }
    let h = m.block(0, 0, d, d).hermitian_part().scale_real(1.0 / tr);
    let eig = eigh(&h, 1e-9)?;
    let lo = eig.values[0];
    if lo >= 0.0 {
        return Ok((DensityMatrix::hermitized(&h, 1e-9)?, 0.0));
    }
    let fixed = eig.map(|x| c(x.max(0.0), 0.0));
    Ok((DensityMatrix::hermitized(&fixed, 1e-9)?, lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::propagate_exact_grid;
    use crate::numerics::paulis;

    fn amp_damp() -> Lindbladian {
        Lindbladian::new(ComplexMatrix::zeros(2, 2), vec![(paulis::sigma_minus(), 1.0)]).unwrap()
    }

    fn max_dev(lind: &Lindbladian, rho0: &DensityMatrix, t: f64, dt: f64) -> f64 {
        let basis = qite_basis(lind.dim(), None).unwrap();
        let traj = qite_evolve(lind, rho0, t, dt, &basis, DEFAULT_LAMBDA).unwrap();
        let exact = propagate_exact_grid(lind, rho0, &traj.times).unwrap();
        traj.states
            .iter()
            .zip(&exact)
            .map(|(a, b)| a.matrix().max_abs_diff(b.matrix()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_generator_is_constant() {
        let l = Lindbladian::closed(ComplexMatrix::zeros(2, 2)).unwrap();
        let rho = crate::testing::random_density(1, 2);
        let basis = qite_basis(2, None).unwrap();
        let traj = qite_evolve(&l, &rho, 0.1, 0.01, &basis, DEFAULT_LAMBDA).unwrap();
        assert_eq!(traj.states.len(), 11);
        for s in &traj.states {
            assert!(s.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn amplitude_damping_population() {
        let basis = qite_basis(2, None).unwrap();
        assert_eq!(basis.len(), 16);
        let traj = qite_evolve(&amp_damp(), &DensityMatrix::basis(2, 1), 1.0, 0.01, &basis, DEFAULT_LAMBDA).unwrap();
        assert!(traj.clipped.iter().all(|&x| x == 0.0));
        let p = traj.states.last().unwrap().population(1);
        assert!((p - (-1.0f64).exp()).abs() < 1e-2, "population {p}");
    }

    #[test]
    fn first_order_convergence() {
        let l = amp_damp();
        let rho0 = DensityMatrix::basis(2, 1);
        let e1 = max_dev(&l, &rho0, 1.0, 0.02);
        let e2 = max_dev(&l, &rho0, 1.0, 0.01);
        let slope = (e1 / e2).log2();
        assert!((slope - 1.0).abs() <= 0.2, "slope {slope} ({e1}, {e2})");
    }

    #[test]
    fn padded_three_level_model() {
        let mut h = ComplexMatrix::zeros(3, 3);
        h.set_block(0, 1, &ComplexMatrix::identity(1).scale_real(0.5));
        h.set_block(1, 0, &ComplexMatrix::identity(1).scale_real(0.5));
        let mut l = ComplexMatrix::zeros(3, 3);
        l.set_block(2, 1, &ComplexMatrix::identity(1));
        let lind = Lindbladian::new(h, vec![(l, 0.5)]).unwrap();
        let basis = qite_basis(3, Some(2)).unwrap();
        let traj = qite_evolve(&lind, &DensityMatrix::basis(3, 0), 0.2, 0.01, &basis, DEFAULT_LAMBDA).unwrap();
        assert_eq!(traj.states.last().unwrap().dim(), 3);
        assert!(traj.clipped.iter().all(|&x| x > -1e-3));
    }

    #[test]
    fn rejects_bad_inputs() {
        let basis = qite_basis(2, None).unwrap();
        let l = amp_damp();
        let rho = DensityMatrix::basis(2, 1);
        assert!(qite_evolve(&l, &rho, 1.0, 0.0, &basis, DEFAULT_LAMBDA).is_err());
        assert!(qite_evolve(&l, &rho, 1.0, 0.3, &basis, DEFAULT_LAMBDA).is_err());
        let wrong = pauli_basis(1, None).unwrap();
        assert!(qite_evolve(&l, &rho, 0.1, 0.01, &wrong, DEFAULT_LAMBDA).is_err());
    }
}
