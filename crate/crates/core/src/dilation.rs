// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Unitary embeddings of non-unitary operators.
//!
//! All dilated matrices are ancilla-major: block `(a, b)` of size `d × d`
//! couples ancilla state `b` to ancilla state `a`, and the top-left block is
//! the ancilla-zero sector.

use num_complex::Complex64 as C64;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::{
    c, complete_unitary, expm, require_square, spectral_norm, svd, unitarity_defect,
    ComplexMatrix, ComplexVector, DEFAULT_TOL,
};

/// Default LCU expansion parameter.
pub const DEFAULT_EPSILON: f64 = 1e-3;

const CONTRACTION_SLACK: f64 = 1e-12;

/// Which ancilla operation reproduces the target on the system register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaRecipe {
    /// Start the ancilla in `|0⟩`, apply, post-select `|0⟩`.
    PostselectZero,
    /// Conjugate the ancilla qubit by Hadamards and post-select `|0⟩`; the
    /// surviving block is the average of the diagonal blocks.
    HadamardPostselectZero,
    /// Start the ancilla in `|0⟩`, apply, discard the ancilla.
    TraceOut,
}

impl AncillaRecipe {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PostselectZero => "postselect-zero",
            Self::HadamardPostselectZero => "hadamard-postselect-zero",
            Self::TraceOut => "trace-out",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DilatedUnitary {
    pub matrix: ComplexMatrix,
    pub system_dim: usize,
    pub ancilla_dim: usize,
    /// The embedded operator is `target / scale`.
    pub scale: f64,
    pub ancilla_recipe: AncillaRecipe,
}

impl DilatedUnitary {
    fn checked(
        matrix: ComplexMatrix,
        system_dim: usize,
        ancilla_dim: usize,
        scale: f64,
        ancilla_recipe: AncillaRecipe,
    ) -> Result<Self> {
        let defect = unitarity_defect(&matrix);
        if defect > DEFAULT_TOL {
            return Err(Error::NotUnitary {
                defect,
                tol: DEFAULT_TOL,
            });
        }
        Ok(Self {
            matrix,
            system_dim,
            ancilla_dim,
            scale,
            ancilla_recipe,
        })
    }

    /// Ancilla block `(a, b)`.
    pub fn block(&self, a: usize, b: usize) -> ComplexMatrix {
        let d = self.system_dim;
        self.matrix.block(a * d, b * d, d, d)
    }

    /// The operator the recipe implements on the system, i.e. `target / scale`
    /// for single-operator dilations.
    pub fn effective_operator(&self) -> ComplexMatrix {
        match self.ancilla_recipe {
            AncillaRecipe::PostselectZero | AncillaRecipe::TraceOut => self.block(0, 0),
            AncillaRecipe::HadamardPostselectZero => {
                let mut acc = ComplexMatrix::zeros(self.system_dim, self.system_dim);
                for a in 0..self.ancilla_dim {
                    for b in 0..self.ancilla_dim {
                        acc = &acc + &self.block(a, b);
                    }
                }
                acc.scale_real(1.0 / self.ancilla_dim as f64)
            }
        }
    }

    /// Kraus operators realised by the trace-out recipe: the first block column.
    pub fn first_block_column(&self) -> Vec<ComplexMatrix> {
        (0..self.ancilla_dim).map(|a| self.block(a, 0)).collect()
    }
}

fn contraction_scale(m: &ComplexMatrix) -> f64 {
    let n = spectral_norm(m);
    if n > 1.0 + CONTRACTION_SLACK {
        n
    } else {
        1.0
    }
}

/// Halmos/Sz.-Nagy dilation `[[M, D_{M†}], [D_M, −M†]]` with
/// `D_M = √(I − M†M)`.
pub fn sz_nagy(m: &ComplexMatrix) -> Result<DilatedUnitary> {
    require_square(m)?;
    let d = m.rows();
    let scale = contraction_scale(m);
    let m = m.scale_real(1.0 / scale);
    // Both defects from one SVD, M = UΣV†: D_M = V√(I−Σ²)V†, D_{M†} = U√(I−Σ²)U†.
    // Separate square roots lose the intertwining M D_M = D_{M†} M near σ = 1.
    let s = svd(&m)?;
    let root: Vec<f64> = s.sigma.iter().map(|&x| (1.0 - x * x).max(0.0).sqrt()).collect();
    let root = ComplexMatrix::from_real_diagonal(&root);
    let v = s.v_dagger.adjoint();
    let d_m = &(&v * &root) * &s.v_dagger;
    let d_md = &(&s.u * &root) * &s.u.adjoint();
    let mut u = ComplexMatrix::zeros(2 * d, 2 * d);
    u.set_block(0, 0, &m);
    u.set_block(0, d, &d_md);
    u.set_block(d, 0, &d_m);
    u.set_block(d, d, &(-&m.adjoint()));
    DilatedUnitary::checked(u, d, 2, scale, AncillaRecipe::PostselectZero)
}

/// Unitary on `ancilla ⊗ system` whose first block column is the stacked
/// Kraus set.
pub fn stinespring_stack(ch: &KrausChannel) -> Result<DilatedUnitary> {
    let d = ch.dim();
    let ops = ch.kraus_ops();
    let k = ops.len();
    let mut iso = ComplexMatrix::zeros(k * d, d);
    for (j, m) in ops.iter().enumerate() {
        iso.set_block(j * d, 0, m);
    }
    let gram = &iso.adjoint() * &iso;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(d));
    if dev > DEFAULT_TOL {
        return Err(Error::InvalidChannel(format!(
            "stacked Kraus column is not an isometry (deviation {dev:.3e})"
        )));
    }
    // Removes rounding-level non-orthogonality before column completion.
    let u = complete_unitary(&orthonormalize(&iso, &gram)?);
    DilatedUnitary::checked(u, d, k, 1.0, AncillaRecipe::TraceOut)
}

/// Polar-corrects `V` to `V (V†V)^{-1/2}`; a no-op at machine precision for
/// an exact isometry.
fn orthonormalize(v: &ComplexMatrix, gram: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = crate::numerics::eigh(&gram.hermitian_part(), 1e-8)?;
    let inv_sqrt = eig.map(|x| c(1.0 / x.sqrt(), 0.0));
    Ok(v * &inv_sqrt)
}

/// SVD dilation `M = U Σ V†` with only `Σ` embedded:
/// `U_Σ = diag(Σ₊, Σ₋)`, `Σ± = Σ ± i√(I − Σ²)`.
///
/// Returns `(U, U_Σ, V†)`.
pub fn svd_dilate(m: &ComplexMatrix) -> Result<(ComplexMatrix, DilatedUnitary, ComplexMatrix)> {
    require_square(m)?;
    let d = m.rows();
    let s = svd(m)?;
    let top = s.sigma.first().copied().unwrap_or(0.0);
    let scale = if top > 1.0 + CONTRACTION_SLACK { top } else { 1.0 };
    let mut diag: Vec<C64> = Vec::with_capacity(2 * d);
    let sig: Vec<f64> = s.sigma.iter().map(|&x| (x / scale).min(1.0)).collect();
    diag.extend(sig.iter().map(|&x| c(x, (1.0 - x * x).max(0.0).sqrt())));
    diag.extend(sig.iter().map(|&x| c(x, -(1.0 - x * x).max(0.0).sqrt())));
    let u_sigma = DilatedUnitary::checked(
        ComplexMatrix::from_diagonal(&diag),
        d,
        2,
        scale,
        AncillaRecipe::HadamardPostselectZero,
    )?;
    Ok((s.u, u_sigma, s.v_dagger))
}

/// `M = H + A` with `H` Hermitian and `A` anti-Hermitian.
pub fn hermitian_split(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_square(m)?;
    let md = m.adjoint();
    let h = (m + &md).scale_real(0.5);
    let a = (m - &md).scale_real(0.5);
    Ok((h, a))
}

#[derive(Clone, Debug)]
pub struct LcuDecomposition {
    pub unitaries: Vec<ComplexMatrix>,
    pub coefficients: Vec<C64>,
    pub epsilon: f64,
}

impl LcuDecomposition {
    /// Wraps an explicit combination, checking each member is unitary.
    pub fn new(unitaries: Vec<ComplexMatrix>, coefficients: Vec<C64>, epsilon: f64) -> Result<Self> {
        if unitaries.is_empty() || unitaries.len() != coefficients.len() {
            return Err(Error::InvalidArgument(format!(
                "{} unitaries for {} coefficients",
                unitaries.len(),
                coefficients.len()
            )));
        }
        let d = unitaries[0].rows();
        for u in &unitaries {
            if u.rows() != d {
                return Err(Error::Dimension("LCU members differ in dimension".into()));
            }
            let defect = unitarity_defect(u);
            if defect > DEFAULT_TOL {
                return Err(Error::NotUnitary {
                    defect,
                    tol: DEFAULT_TOL,
                });
            }
        }
        Ok(Self {
            unitaries,
            coefficients,
            epsilon,
        })
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    /// `Σ |cᵢ|`, the subnormalization of the block encoding.
    pub fn one_norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm()).sum()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        self.unitaries
            .iter()
            .zip(&self.coefficients)
            .fold(ComplexMatrix::zeros(d, d), |acc, (u, &z)| &acc + &u.scale(z))
    }
}

/// `M ≈ (1/2ε)(i e^{−iεH} − i e^{iεH} + e^{εA} − e^{−εA})`.
pub fn unitary_decomposition(m: &ComplexMatrix, epsilon: f64) -> Result<LcuDecomposition> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let (h, a) = hermitian_split(m)?;
    let ih = h.scale(c(0.0, epsilon));
    let ea = a.scale_real(epsilon);
    let unitaries = vec![expm(&(-&ih))?, expm(&ih)?, expm(&ea)?, expm(&(-&ea))?];
    let k = 0.5 / epsilon;
    let coefficients = vec![c(0.0, k), c(0.0, -k), c(k, 0.0), c(-k, 0.0)];
    LcuDecomposition::new(unitaries, coefficients, epsilon)
}

/// Below this norm the combined branch is reported as annihilated.
pub const ANNIHILATION_TOL: f64 = 1e-10;

/// Prepare–select–unprepare on an ancilla register followed by post-selection
/// of the all-zero ancilla outcome.
///
/// Returns the normalized post-selected system state and the exact success
/// probability `‖Σcᵢ Uᵢ ψ‖² / (Σ|cᵢ|)²`.
pub fn lcu_apply(dec: &LcuDecomposition, state: &ComplexVector) -> Result<(ComplexVector, f64)> {
    let d = dec.dim();
    if state.dim() != d {
        return Err(Error::Dimension(format!(
            "state of dimension {} for a dimension-{d} LCU",
            state.dim()
        )));
    }
    let s = dec.one_norm();
    if s == 0.0 {
        return Err(Error::Annihilated);
    }
    // PREP |0⟩ = Σ √(|cᵢ|/s) |i⟩; SELECT = Σ |i⟩⟨i| ⊗ e^{iφᵢ} Uᵢ; PREP†.
    let amps: Vec<f64> = dec.coefficients.iter().map(|z| (z.norm() / s).sqrt()).collect();
    let mut out = ComplexVector::zeros(d);
    for ((u, z), &w) in dec.unitaries.iter().zip(&dec.coefficients).zip(&amps) {
        if w == 0.0 {
            continue;
        }
        let phase = C64::from_polar(1.0, z.arg());
        let branch = u.apply(&state.scale(c(w, 0.0))).scale(phase * w);
        out = &out + &branch;
    }
    let norm = out.norm();
    if norm * s < ANNIHILATION_TOL * state.norm().max(1.0) {
        return Err(Error::Annihilated);
    }
    let p = norm * norm;
    Ok((out.scale(c(1.0 / norm, 0.0)), p))
}
