// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum channels in Kraus operator-sum form.
//!
//! Trace preservation is checked as `Σₖ Mₖ†Mₖ = I`. The reversed ordering
//! `Σₖ MₖMₖ† = I` is a different property (unitality) and is exposed
//! separately as [`KrausChannel::unitality_deviation`].
//!
//! Two dynamical matrices are available. [`KrausChannel::dynamical_matrix_a`]
//! is `Σₖ Mₖ ⊗ M̄ₖ`, which is the superoperator for *row*-stacked
//! vectorization; [`KrausChannel::superoperator`] gives the column-stacked
//! superoperator `Σₖ M̄ₖ ⊗ Mₖ` used everywhere else in this crate, and
//! [`row_to_column_convention`] converts between the two.
//! [`KrausChannel::choi_matrix_b`] is `Σₖ |Mₖ⟩⟨Mₖ|`; since Kraus sets are
//! not unique, channel equality is always decided on this matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    c, eigh, kron, require_square, spectral_norm, vectorize, ComplexMatrix, ComplexVector,
    DEFAULT_TOL,
};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates with the default tolerance `1e-10`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        require_square(&matrix)?;
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:.3e} exceeds {tol:.1e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState(format!(
                "trace {:.12} differs from 1",
                tr.re
            )));
        }
        let eig = eigh(&matrix, tol)?;
        let lo = eig.values.first().copied().unwrap_or(0.0);
        if lo < -tol {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {lo:.3e} below -{tol:.1e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Projects an approximately physical matrix onto the Hermitian part and
    /// rescales it to unit trace before validating it with `tol`.
    pub fn hermitized(matrix: &ComplexMatrix, tol: f64) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if !(tr.abs() > f64::MIN_POSITIVE) {
            return Err(Error::InvalidState("zero trace".into()));
        }
        Self::with_tolerance(h.scale_real(1.0 / tr), tol)
    }

    /// Validates `matrix` with `tol` after removing its anti-Hermitian
    /// rounding noise; the trace is not rescaled.
    pub fn symmetrized(matrix: &ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:.3e} exceeds {tol:.1e}"
            )));
        }
        Self::with_tolerance(matrix.hermitian_part(), tol)
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("state norm {n} is not 1")));
        }
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    /// Computational basis projector `|k⟩⟨k|` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let psi = ComplexVector::basis(d, k);
        Self {
            matrix: ComplexMatrix::outer(&psi, &psi),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `tr(O ρ)` for Hermitian `O`.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        crate::numerics::expectation(observable, &self.matrix)
    }

    pub fn population(&self, k: usize) -> f64 {
        self.matrix.get(k, k).re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Ordered Kraus operators `{Mₖ}` on a `d`-dimensional system.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    kraus_ops: Vec<ComplexMatrix>,
    tp_tolerance: f64,
}

impl KrausChannel {
    /// Builds a trace-preserving channel with tolerance `1e-10`.
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus_ops, DEFAULT_TOL)
    }

    pub fn with_tolerance(kraus_ops: Vec<ComplexMatrix>, tp_tolerance: f64) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus set".into()))?;
        let dim = first.rows();
        if let Some(bad) = kraus_ops.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::Dimension(format!(
                "Kraus operator {}x{} in a dimension-{dim} channel",
                bad.rows(),
                bad.cols()
            )));
        }
        if kraus_ops.len() > dim * dim {
            return Err(Error::InvalidChannel(format!(
                "{} Kraus operators exceed the d² = {} bound",
                kraus_ops.len(),
                dim * dim
            )));
        }
        let ch = Self {
            dim,
            kraus_ops,
            tp_tolerance,
        };
        let dev = ch.check_trace_preserving();
        if dev > tp_tolerance {
            return Err(Error::InvalidChannel(format!(
                "trace-preservation deviation {dev:.3e} exceeds {tp_tolerance:.1e}"
            )));
        }
        Ok(ch)
    }

    /// Skips validation; used for zero-padded Kraus lists that exceed the d²
    /// bound only by zero operators.
    pub(crate) fn stacked_unchecked(kraus_ops: Vec<ComplexMatrix>) -> Self {
        Self {
            dim: kraus_ops[0].rows(),
            kraus_ops,
            tp_tolerance: DEFAULT_TOL,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            kraus_ops: vec![ComplexMatrix::identity(d)],
            tp_tolerance: DEFAULT_TOL,
        }
    }

    /// Single-qubit amplitude damping with decay probability `p`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("damping probability {p} outside [0,1]")));
        }
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()])?;
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, p.sqrt(), 0.0, 0.0])?;
        Self::new(vec![k0, k1])
    }

    /// Single-qubit phase flip `{√(1−p) I, √p Z}`.
    pub fn dephasing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("flip probability {p} outside [0,1]")));
        }
        Self::new(vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            crate::numerics::paulis::z().scale_real(p.sqrt()),
        ])
    }

    /// Unitary conjugation `ρ ↦ UρU†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn tp_tolerance(&self) -> f64 {
        self.tp_tolerance
    }

    /// `Σₖ MₖρMₖ†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_matrix(rho.matrix())?;
        DensityMatrix::with_tolerance(out, DEFAULT_TOL.max(2.0 * self.tp_tolerance))
    }

    /// Operator-sum action on an arbitrary square matrix, no validation of the output.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "state {}x{} for a dimension-{} channel",
                rho.rows(),
                rho.cols(),
                self.dim
            )));
        }
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for m in &self.kraus_ops {
            acc = &acc + &(&(m * rho) * &m.adjoint());
        }
        Ok(acc)
    }

    /// `‖Σₖ Mₖ†Mₖ − I‖₂`.
    pub fn check_trace_preserving(&self) -> f64 {
        let mut acc = ComplexMatrix::identity(self.dim).scale_real(-1.0);
        for m in &self.kraus_ops {
            acc = &acc + &(&m.adjoint() * m);
        }
        spectral_norm(&acc)
    }

    /// `‖Σₖ MₖMₖ† − I‖₂`; zero for unital channels.
    pub fn unitality_deviation(&self) -> f64 {
        let mut acc = ComplexMatrix::identity(self.dim).scale_real(-1.0);
        for m in &self.kraus_ops {
            acc = &acc + &(m * &m.adjoint());
        }
        spectral_norm(&acc)
    }

    /// `Σₖ Mₖ ⊗ M̄ₖ`, the superoperator acting on row-stacked `vec(ρ)`.
    pub fn dynamical_matrix_a(&self) -> ComplexMatrix {
        self.sum_kron(|m| (m.clone(), m.conjugate()))
    }

    /// `Σₖ M̄ₖ ⊗ Mₖ`, the superoperator acting on column-stacked `vec(ρ)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        self.sum_kron(|m| (m.conjugate(), m.clone()))
    }

    fn sum_kron(&self, f: impl Fn(&ComplexMatrix) -> (ComplexMatrix, ComplexMatrix)) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let mut acc = ComplexMatrix::zeros(n, n);
        for m in &self.kraus_ops {
            let (a, b) = f(m);
            acc = &acc + &kron(&a, &b).expect("d² within MAX_DIM for channels");
        }
        acc
    }

    /// `Σₖ |Mₖ⟩⟨Mₖ|` with column-stacked `|Mₖ⟩`.
    pub fn choi_matrix_b(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let mut acc = ComplexMatrix::zeros(n, n);
        for m in &self.kraus_ops {
            let v = vectorize(m).expect("square");
            acc = &acc + &ComplexMatrix::outer(&v, &v);
        }
        acc
    }

    /// True iff the Choi matrix has no eigenvalue below `-tol`.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        is_choi_positive(&self.choi_matrix_b(), tol)
    }

    /// `second ∘ first`, Kraus set `{Bⱼ Aᵢ}`.
    pub fn compose(first: &Self, second: &Self) -> Result<Self> {
        if first.dim != second.dim {
            return Err(Error::Dimension(format!(
                "composing dimension {} with {}",
                first.dim, second.dim
            )));
        }
        let mut ops = Vec::with_capacity(first.kraus_ops.len() * second.kraus_ops.len());
        for b in &second.kraus_ops {
            for a in &first.kraus_ops {
                let prod = b * a;
                if prod.frobenius_norm() > 1e-15 {
                    ops.push(prod);
                }
            }
        }
        if ops.is_empty() {
            ops.push(ComplexMatrix::zeros(first.dim, first.dim));
        }
        let tol = first.tp_tolerance + second.tp_tolerance;
        compress_kraus(ops, first.dim, tol)
    }

    /// Replaces `{Mₖ}` by `{Mₖ S^{-1/2}}`, `S = Σ Mₖ†Mₖ`, making the set exactly
    /// trace preserving. First-order Kraus steps are normalized this way before
    /// they are dilated.
    pub fn normalized(&self) -> Result<Self> {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for m in &self.kraus_ops {
            s = &s + &(&m.adjoint() * m);
        }
        let eig = eigh(&s, 1e-8)?;
        if eig.values[0] <= 1e-12 {
            return Err(Error::InvalidChannel(
                "Σ M†M is singular; channel cannot be normalized".into(),
            ));
        }
        let inv_sqrt = eig.map(|x| c(1.0 / x.sqrt(), 0.0));
        let ops = self.kraus_ops.iter().map(|m| m * &inv_sqrt).collect();
        Self::new(ops)
    }

    /// Two channels are equal iff their Choi matrices agree.
    pub fn choi_distance(&self, other: &Self) -> f64 {
        self.choi_matrix_b().max_abs_diff(&other.choi_matrix_b())
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            dim: self.dim,
            kraus: self.kraus_ops.iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn from_json(json: &ChannelJson) -> Result<Self> {
        let ops = json
            .kraus
            .iter()
            .map(|m| m.to_matrix(json.dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }
}

/// Minimal Kraus set realizing a Choi matrix, from its eigendecomposition.
pub fn kraus_from_choi(choi: &ComplexMatrix, d: usize, tp_tolerance: f64) -> Result<KrausChannel> {
    let ops = kraus_ops_from_choi(choi, d)?;
    KrausChannel::with_tolerance(ops, tp_tolerance)
}

fn kraus_ops_from_choi(choi: &ComplexMatrix, d: usize) -> Result<Vec<ComplexMatrix>> {
    let eig = eigh(choi, 1e-9)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let mut ops = Vec::new();
    for k in (0..eig.values.len()).rev() {
        let w = eig.values[k];
        if w < -1e-9 {
            return Err(Error::NotPositive {
                eigenvalue: w,
                tol: 1e-9,
            });
        }
        if w <= 1e-13 * top.max(1.0) {
            continue;
        }
        let v = eig.vector(k).scale(c(w.sqrt(), 0.0));
        ops.push(crate::numerics::devectorize(&v)?);
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(d, d));
    }
    Ok(ops)
}

fn compress_kraus(ops: Vec<ComplexMatrix>, d: usize, tol: f64) -> Result<KrausChannel> {
    if ops.len() <= d * d {
        return KrausChannel::with_tolerance(ops, tol);
    }
    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    for m in &ops {
        let v = vectorize(m)?;
        choi = &choi + &ComplexMatrix::outer(&v, &v);
    }
    kraus_from_choi(&choi, d, tol)
}

/// Choi matrix `Σᵢⱼ |i⟩⟨j| ⊗ ...` reshuffled from a column-stacked superoperator,
/// matching [`KrausChannel::choi_matrix_b`]'s layout.
pub fn choi_from_superoperator(sup: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    let n = d * d;
    if sup.rows() != n || sup.cols() != n {
        return Err(Error::Dimension(format!(
            "superoperator {}x{} for dimension {d}",
            sup.rows(),
            sup.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    let mut entries = out.clone().into_inner();
    for k in 0..d {
        for i in 0..d {
            for l in 0..d {
                for j in 0..d {
                    entries[(k * d + i, l * d + j)] = sup.get(j * d + i, l * d + k);
                }
            }
        }
    }
    out = ComplexMatrix::wrap(entries);
    Ok(out)
}

pub fn is_choi_positive(choi: &ComplexMatrix, tol: f64) -> bool {
    match eigh(choi, 1e-8) {
        Ok(e) => e.values.first().map_or(true, |&v| v >= -tol),
        Err(_) => false,
    }
}

/// Converts the row-stacked superoperator into the column-stacked one by
/// conjugating with the vec-permutation (commutation) matrix.
pub fn row_to_column_convention(a: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = d * d;
    let perm = |idx: usize| (idx % d) * d + idx / d;
    let mut out = a.clone().into_inner();
    for r in 0..n {
        for s in 0..n {
            out[(perm(r), perm(s))] = a.get(r, s);
        }
    }
    ComplexMatrix::wrap(out)
}

/// Row-major complex matrix as a flat list of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<[f64; 2]>);

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self(m.to_row_major().iter().map(|z| [z.re, z.im]).collect())
    }

    pub fn to_matrix(&self, d: usize) -> Result<ComplexMatrix> {
        let e: Vec<_> = self.0.iter().map(|p| c(p[0], p[1])).collect();
        ComplexMatrix::from_row_major(d, d, &e)
    }
}

/// `{"dim": d, "kraus": [[[re,im],...],...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim: usize,
    pub kraus: Vec<MatrixJson>,
}
