// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Eigen- and singular-value decompositions, PSD square roots and small
//! linear solves.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64 as C64;

use super::matrix::{c, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Default tolerance for Hermiticity and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ComplexVector {
        ComplexVector::wrap(self.vectors.column(k).into_owned())
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.vectors.inner();
        let d: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * d[j]);
        ComplexMatrix::wrap(scaled * v.adjoint())
    }
}

/// Symmetrizes `h` and diagonalizes it. Fails if `h` is further than
/// `tol` from Hermitian.
pub fn eigh(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    require_square(h)?;
    let defect = h.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    let sym = h.hermitian_part().into_inner();
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = h.rows();
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::wrap(vectors),
    })
}

/// Singular value decomposition `M = U Σ V†` with `sigma` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v_dagger: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    require_square(m)?;
    let n = m.rows();
    let dec = SVD::new(m.inner().clone(), true, true);
    let (u, vt) = match (dec.u, dec.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => unreachable!("SVD requested with both factors"),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let sigma = order.iter().map(|&k| dec.singular_values[k]).collect();
    let u = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    let vt = DMatrix::from_fn(n, n, |i, j| vt[(order[i], j)]);
    Ok(Svd {
        u: ComplexMatrix::wrap(u),
        sigma,
        v_dagger: ComplexMatrix::wrap(vt),
    })
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    if m.is_hermitian(1e-14) {
        let sym = m.hermitian_part().into_inner();
        return SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
    }
    let sv = m.inner().singular_values();
    sv.iter().cloned().fold(0.0, f64::max)
}

/// Hermitian PSD square root. Eigenvalues in `[-tol, 0)` are clipped to zero.
pub fn sqrtm_psd(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h, tol)?;
    if let Some(&lo) = eig.values.first() {
        if lo < -tol {
            return Err(Error::NotPositive { eigenvalue: lo, tol });
        }
    }
    Ok(eig.map(|x| c(x.max(0.0).sqrt(), 0.0)))
}

/// `‖U†U − I‖` measured as the largest entrywise deviation.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = &u.adjoint() * u;
    g.max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

pub fn require_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

/// Solves `(A + λI) x = b` for symmetric positive semidefinite real `A`.
///
/// Cholesky is tried first; a pivoted LU is the fallback. The result is
/// rejected when the diagonal ratio of the factor indicates a condition
/// number beyond `1e14`.
pub fn solve_regularized_spd(a: &DMatrix<f64>, b: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "system {}x{} with rhs {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let mut reg = a.clone();
    for i in 0..n {
        reg[(i, i)] += lambda;
    }
    if let Some(ch) = reg.clone().cholesky() {
        let l = ch.l();
        let diag: Vec<f64> = (0..n).map(|i| l[(i, i)]).collect();
        let hi = diag.iter().cloned().fold(0.0, f64::max);
        let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if lo > 0.0 { (hi / lo).powi(2) } else { f64::INFINITY };
        if condition > 1e14 || !condition.is_finite() {
            return Err(Error::Singular { condition });
        }
        return Ok(ch.solve(b));
    }
    let lu = reg.clone().lu();
    match lu.solve(b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => Ok(x),
        _ => Err(Error::Singular {
            condition: f64::INFINITY,
        }),
    }
}

/// Solves the real least-squares problem `min ‖A x − b‖² + λ‖x‖²` through
/// its regularized normal equations.
pub fn least_squares_regularized(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    lambda: f64,
) -> Result<DVector<f64>> {
    let at = a.transpose();
    solve_regularized_spd(&(&at * a), &(&at * b), lambda)
}
