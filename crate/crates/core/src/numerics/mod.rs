// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra.
//!
//! Conventions used by every other module:
//!
//! * `kron(a, b)` puts `a` on the more significant index:
//!   entry `(i·b.rows + k, j·b.cols + l) = a(i,j)·b(k,l)`.
//! * Vectorization stacks columns, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
//! * Tensor-factor lists (`dims`) are ordered most significant first, the
//!   same order `kron` composes them.

mod decomp;
mod expm;
mod matrix;

pub use decomp::{
    eigh, least_squares_regularized, require_square, solve_regularized_spd, spectral_norm,
    sqrtm_psd, svd, unitarity_defect, HermitianEigen, Svd, DEFAULT_TOL,
};
pub use expm::{expm, expm_general};
pub use matrix::{c, paulis, ComplexMatrix, ComplexVector, I, MAX_DIM, ONE, ZERO};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(cc)) if r <= MAX_DIM && cc <= MAX_DIM => Ok(ComplexMatrix::wrap(a.kronecker(b.inner()))),
        _ => Err(Error::TooLarge {
            rows: a.rows().saturating_mul(b.rows()),
            cols: a.cols().saturating_mul(b.cols()),
            max: MAX_DIM,
        }),
    }
}

/// Kronecker product of a list, left to right.
pub fn kron_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut it = factors.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty Kronecker product".into()))?
        .clone();
    it.try_fold(first, |acc, f| kron(&acc, f))
}

/// `op` acting on factor `site` of a register of `n` factors of dimension `local`.
pub fn embed_site(op: &ComplexMatrix, site: usize, n: usize) -> Result<ComplexMatrix> {
    let local = op.rows();
    let factors: Vec<ComplexMatrix> = (0..n)
        .map(|k| if k == site { op.clone() } else { ComplexMatrix::identity(local) })
        .collect();
    kron_all(&factors)
}

/// Reduced matrix over the factors listed in `keep`.
///
/// `dims` lists the tensor factors most significant first; `keep` holds
/// factor positions into `dims`. The kept factors appear in the output in
/// their original (ascending position) order.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    require_square(rho)?;
    let total: usize = dims.iter().product();
    if total != rho.rows() {
        return Err(Error::Dimension(format!(
            "factor dims {:?} multiply to {} but matrix is {}x{}",
            dims,
            total,
            rho.rows(),
            rho.cols()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "kept factor {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();

    // Stride of each factor in the full index.
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    let offset = |positions: &[usize], sizes: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for p in (0..positions.len()).rev() {
            off += (idx % sizes[p]) * strides[positions[p]];
            idx /= sizes[p];
        }
        off
    };
    let kept_off: Vec<usize> = (0..dk).map(|i| offset(&kept, &kept_dims, i)).collect();
    let traced_off: Vec<usize> = (0..dt).map(|i| offset(&traced, &traced_dims, i)).collect();

    let m = rho.inner();
    let out = DMatrix::from_fn(dk, dk, |i, j| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[i] + t, kept_off[j] + t)])
            .sum::<C64>()
    });
    Ok(ComplexMatrix::wrap(out))
}

/// Column-stacking vectorization: entry `(i, j)` lands at index `j·d + i`.
pub fn vectorize(rho: &ComplexMatrix) -> Result<ComplexVector> {
    require_square(rho)?;
    Ok(ComplexVector::wrap(DVector::from_column_slice(
        rho.inner().as_slice(),
    )))
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &ComplexVector) -> Result<ComplexMatrix> {
    let d = integer_sqrt(v.dim()).ok_or_else(|| {
        Error::Dimension(format!("vector length {} is not a perfect square", v.dim()))
    })?;
    Ok(ComplexMatrix::wrap(DMatrix::from_column_slice(
        d,
        d,
        v.as_slice(),
    )))
}

pub fn integer_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Smallest power of two `≥ n`, and its exponent.
pub fn next_pow2(n: usize) -> (usize, usize) {
    let mut p = 1usize;
    let mut k = 0usize;
    while p < n {
        p <<= 1;
        k += 1;
    }
    (p, k)
}

/// `tr(op · ρ)` as a real number (imaginary part discarded).
pub fn expectation(op: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    let a = op.inner();
    let b = rho.inner();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc.re
}

/// Unitary whose first columns are the given orthonormal columns.
///
/// Remaining columns are filled greedily from the standard basis vector with
/// the largest residual after projecting out the current span, so the result
/// is deterministic.
pub fn complete_unitary(isometry: &ComplexMatrix) -> ComplexMatrix {
    let n = isometry.rows();
    let k = isometry.cols();
    let mut cols: Vec<DVector<C64>> = (0..k).map(|j| isometry.column(j).into_owned()).collect();
    let residual = |cols: &[DVector<C64>], mut v: DVector<C64>| {
        for _ in 0..2 {
            for q in cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        v
    };
    while cols.len() < n {
        let best = (0..n)
            .map(|e| {
                let mut basis = DVector::zeros(n);
                basis[e] = ONE;
                residual(&cols, basis)
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("n > 0");
        let norm = best.norm();
        cols.push(best / c(norm, 0.0));
    }
    ComplexMatrix::wrap(DMatrix::from_columns(&cols))
}
