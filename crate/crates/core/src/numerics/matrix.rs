// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and vectors.
//!
//! Both types wrap `nalgebra` storage and reject non-finite entries at
//! construction. Read access goes through `Deref` to the underlying
//! `DMatrix`/`DVector`, so all of nalgebra's inspection API is available.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest row or column count any constructed matrix may have.
///
/// Twelve qubits of system, or the superoperator of a six-qubit system.
pub const MAX_DIM: usize = 4096;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn all_finite<'a>(mut it: impl Iterator<Item = &'a C64>) -> bool {
    it.all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let e: Vec<C64> = entries.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &e)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() > MAX_DIM || m.ncols() > MAX_DIM {
            return Err(Error::TooLarge {
                rows: m.nrows(),
                cols: m.ncols(),
                max: MAX_DIM,
            });
        }
        if !all_finite(m.iter()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Wraps storage produced by arithmetic on already-validated operands.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert!(all_finite(m.iter()));
        Self(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &ComplexVector, b: &ComplexVector) -> Self {
        Self(&a.0 * b.0.adjoint())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows())
            .map(|i| self.0.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols())
            .map(|j| self.0.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in max_abs_diff");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * c(0.5, 0.0))
    }

    /// Copies the `rows × cols` block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        self.0
            .view_mut((r0, c0), (b.rows(), b.cols()))
            .copy_from(&b.0);
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 * &v.0)
    }

    /// Embeds `self` in the top-left corner of an `n × n` matrix; the remaining
    /// diagonal is filled with `fill`.
    pub fn pad_to(&self, n: usize, fill: C64) -> Self {
        assert!(n >= self.rows() && n >= self.cols());
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((0, 0), (self.rows(), self.cols()))
            .copy_from(&self.0);
        for k in self.rows().max(self.cols())..n {
            out[(k, k)] = fill;
        }
        Self(out)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if !all_finite(entries.iter()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_dvector(v: DVector<C64>) -> Result<Self> {
        if !all_finite(v.iter()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(v))
    }

    pub(crate) fn wrap(v: DVector<C64>) -> Self {
        debug_assert!(all_finite(v.iter()));
        Self(v)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn normalized(&self) -> Self {
        Self(&self.0 / c(self.norm(), 0.0))
    }

    pub fn inner(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<C64> {
        self.0
    }

    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|⟨self|other⟩|²`; both vectors are assumed normalized.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.dot(other).norm_sqr()
    }
}

impl Deref for ComplexVector {
    type Target = DVector<C64>;
    fn deref(&self) -> &DVector<C64> {
        &self.0
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector{}", self.0.transpose())
    }
}

impl<'a> Add<&'a ComplexVector> for &'a ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &'a ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexVector> for &'a ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &'a ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 - &rhs.0)
    }
}

/// Pauli and ladder matrices used throughout the crate and its tests.
pub mod paulis {
    use super::*;

    pub fn id2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]))
    }

    /// `σ₋ = |0⟩⟨1|`, lowering the excited state `|1⟩` to `|0⟩`.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]))
    }

    /// `σ₊ = |1⟩⟨0|`.
    pub fn sigma_plus() -> ComplexMatrix {
        sigma_minus().adjoint()
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[s, s, s, -s]))
    }

    /// `|k⟩⟨k|` on a qubit.
    pub fn projector(k: usize) -> ComplexMatrix {
        let mut d = [ZERO, ZERO];
        d[k] = ONE;
        ComplexMatrix::from_diagonal(&d)
    }
}
