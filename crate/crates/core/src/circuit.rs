// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Statevector emulator with ancilla post-selection.
//!
//! Qubit 0 is the least significant bit of the amplitude index. A gate acting
//! on `targets` sees `targets[0]` as the least significant bit of its own
//! index, so a dilated matrix in ancilla-major layout is applied with the
//! system qubits first and the ancilla qubits after them.

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use crate::channels::{DensityMatrix, KrausChannel};
use crate::dilation::{self, DilatedUnitary, LcuDecomposition};
use crate::error::{Error, Result};
use crate::numerics::{
    c, eigh, next_pow2, paulis, unitarity_defect, ComplexMatrix, ComplexVector, DEFAULT_TOL, ONE,
    ZERO,
};
use crate::rng::stream;

/// Branches with a smaller post-selection probability are treated as absent.
pub const VANISHING_PROBABILITY: f64 = 1e-14;

/// Eigenvalues of `ρ₀` below this are dropped before branching.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Population allowed to leak into padding levels.
pub const PADDING_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    n_qubits: usize,
    amplitudes: ComplexVector,
}

impl QubitState {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        Self {
            n_qubits,
            amplitudes: ComplexVector::basis(1 << n_qubits, index),
        }
    }

    /// Wraps a normalized vector whose length is a power of two.
    pub fn from_vector(amplitudes: ComplexVector) -> Result<Self> {
        let (p, n) = next_pow2(amplitudes.dim());
        if p != amplitudes.dim() {
            return Err(Error::Dimension(format!(
                "statevector length {} is not a power of two",
                amplitudes.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("statevector norm {norm}")));
        }
        Ok(Self {
            n_qubits: n,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amplitudes
    }

    /// Appends `n` ancilla qubits in `|0⟩` above the existing ones.
    pub fn with_ancillas(&self, n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << (self.n_qubits + n)];
        amps[..self.amplitudes.dim()].copy_from_slice(self.amplitudes.as_slice());
        Self {
            n_qubits: self.n_qubits + n,
            amplitudes: ComplexVector::wrap(amps.into()),
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::pure(&self.amplitudes)
    }
}

fn check_targets(n: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::InvalidArgument(format!(
                "qubit {t} out of range for a {n}-qubit register"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!("qubit {t} listed twice")));
        }
    }
    Ok(())
}

/// Scatters the bits of `local` onto the positions `targets`.
fn spread(local: usize, targets: &[usize]) -> usize {
    targets
        .iter()
        .enumerate()
        .filter(|(j, _)| local >> j & 1 == 1)
        .fold(0, |acc, (_, &t)| acc | 1 << t)
}

/// Applies the unitary `u` to the qubits `targets`.
pub fn apply_unitary(state: &QubitState, u: &ComplexMatrix, targets: &[usize]) -> Result<QubitState> {
    let k = targets.len();
    if !u.is_square() || u.rows() != 1 << k {
        return Err(Error::Dimension(format!(
            "{}x{} gate on {k} qubits",
            u.rows(),
            u.cols()
        )));
    }
    let defect = unitarity_defect(u);
    if defect > DEFAULT_TOL {
        return Err(Error::NotUnitary {
            defect,
            tol: DEFAULT_TOL,
        });
    }
    check_targets(state.n_qubits, targets)?;
    Ok(QubitState {
        n_qubits: state.n_qubits,
        amplitudes: apply_matrix_unchecked(&state.amplitudes, state.n_qubits, u, targets),
    })
}

pub(crate) fn apply_matrix_unchecked(
    amps: &ComplexVector,
    n: usize,
    u: &ComplexMatrix,
    targets: &[usize],
) -> ComplexVector {
    let k = targets.len();
    let m = u.inner();
    let offsets: Vec<usize> = (0..1usize << k).map(|l| spread(l, targets)).collect();
    let mask = offsets.last().copied().unwrap_or(0);
    let src = amps.as_slice();
    let mut out = src.to_vec();
    let mut gathered = vec![ZERO; 1 << k];
    for base in (0..1usize << n).filter(|b| b & mask == 0) {
        for (g, &o) in gathered.iter_mut().zip(&offsets) {
            *g = src[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (col, g) in gathered.iter().enumerate() {
                acc += m[(r, col)] * g;
            }
            out[base | o] = acc;
        }
    }
    ComplexVector::wrap(out.into())
}

/// Projects `ancillas` onto `outcome` and returns the renormalized state of
/// the remaining qubits (in their original relative order) together with the
/// branch probability.
pub fn postselect(state: &QubitState, ancillas: &[usize], outcome: &[bool]) -> Result<(QubitState, f64)> {
    let (amps, n_rest) = project(state, ancillas, outcome)?;
    let p = amps.norm_sqr();
    if p < VANISHING_PROBABILITY {
        return Err(Error::VanishingBranch { probability: p });
    }
    let amplitudes = amps.scale(c(1.0 / p.sqrt(), 0.0));
    Ok((
        QubitState {
            n_qubits: n_rest,
            amplitudes,
        },
        p,
    ))
}

/// Unnormalized projection `(⟨outcome|_anc ⊗ I)|ψ⟩`.
fn project(state: &QubitState, ancillas: &[usize], outcome: &[bool]) -> Result<(ComplexVector, usize)> {
    check_targets(state.n_qubits, ancillas)?;
    if outcome.len() != ancillas.len() {
        return Err(Error::InvalidArgument(format!(
            "{} outcome bits for {} ancillas",
            outcome.len(),
            ancillas.len()
        )));
    }
    let rest: Vec<usize> = (0..state.n_qubits).filter(|q| !ancillas.contains(q)).collect();
    let fixed = ancillas
        .iter()
        .zip(outcome)
        .filter(|(_, &b)| b)
        .fold(0usize, |acc, (&q, _)| acc | 1 << q);
    let src = state.amplitudes.as_slice();
    let out: Vec<C64> = (0..1usize << rest.len())
        .map(|l| src[fixed | spread(l, &rest)])
        .collect();
    Ok((ComplexVector::wrap(out.into()), rest.len()))
}

/// Reduced density matrix after discarding `qubits`.
pub fn trace_out(state: &QubitState, qubits: &[usize]) -> Result<DensityMatrix> {
    check_targets(state.n_qubits, qubits)?;
    if qubits.len() == state.n_qubits {
        return Err(Error::InvalidArgument("cannot trace out every qubit".into()));
    }
    DensityMatrix::symmetrized(&reduced(state, qubits), 1e-12)
}

fn reduced(state: &QubitState, qubits: &[usize]) -> ComplexMatrix {
    let keep: Vec<usize> = (0..state.n_qubits).filter(|q| !qubits.contains(q)).collect();
    let dk = 1usize << keep.len();
    let src = state.amplitudes.as_slice();
    let keep_off: Vec<usize> = (0..dk).map(|l| spread(l, &keep)).collect();
    let mut rho = nalgebra::DMatrix::<C64>::zeros(dk, dk);
    for e in 0..1usize << qubits.len() {
        let env = spread(e, qubits);
        for (i, &oi) in keep_off.iter().enumerate() {
            let a = src[env | oi];
            if a == ZERO {
                continue;
            }
            for (j, &oj) in keep_off.iter().enumerate() {
                rho[(i, j)] += a * src[env | oj].conj();
            }
        }
    }
    ComplexMatrix::wrap(rho)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotResult {
    pub estimate: f64,
    /// Sample standard deviation over `√n_shots`; infinite for one shot.
    pub stderr: f64,
    pub n_shots: usize,
    pub seed: u64,
}

/// Estimates `⟨ψ|O|ψ⟩` by sampling eigenvalues of `O` with Born weights.
pub fn sample_observable(
    state: &QubitState,
    observable: &ComplexMatrix,
    n_shots: usize,
    seed: u64,
) -> Result<ShotResult> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    if observable.rows() != state.amplitudes.dim() {
        return Err(Error::Dimension(format!(
            "{}-dimensional observable on a {}-dimensional state",
            observable.rows(),
            state.amplitudes.dim()
        )));
    }
    let eig = eigh(observable, DEFAULT_TOL)?;
    let probs: Vec<f64> = (0..eig.values.len())
        .map(|k| eig.vector(k).dot(&state.amplitudes).norm_sqr())
        .collect();
    let outcomes = sample_outcomes(&probs, n_shots, seed);
    let values: Vec<f64> = outcomes.iter().map(|&k| eig.values[k]).collect();
    Ok(summarize(&values, seed))
}

/// Estimates `Tr(ρO)` by sampling eigenvalues of `O` with weights
/// `⟨oₖ|ρ|oₖ⟩`, as a projective measurement of the register would.
pub fn sample_observable_mixed(
    rho: &DensityMatrix,
    observable: &ComplexMatrix,
    n_shots: usize,
    seed: u64,
) -> Result<ShotResult> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    if observable.rows() != rho.dim() {
        return Err(Error::Dimension(format!(
            "{}-dimensional observable on a {}-dimensional state",
            observable.rows(),
            rho.dim()
        )));
    }
    let eig = eigh(observable, DEFAULT_TOL)?;
    let probs: Vec<f64> = (0..eig.values.len())
        .map(|k| {
            let v = eig.vector(k);
            v.dot(&rho.matrix().apply(&v)).re
        })
        .collect();
    let outcomes = sample_outcomes(&probs, n_shots, seed);
    let values: Vec<f64> = outcomes.iter().map(|&k| eig.values[k]).collect();
    Ok(summarize(&values, seed))
}

/// Draws `n` indices from the (possibly slightly unnormalized) weights.
pub(crate) fn sample_outcomes(weights: &[f64], n: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w.max(0.0);
        cdf.push(acc);
    }
    let mut rng = stream(seed, "shots", 0);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cdf.partition_point(|&x| x <= u).min(weights.len() - 1)
        })
        .collect()
}

pub(crate) fn summarize(values: &[f64], seed: u64) -> ShotResult {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    ShotResult {
        estimate: mean,
        stderr,
        n_shots: n,
        seed,
    }
}

/// How a channel is compiled into unitary circuits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DilationMethod {
    /// One Sz.-Nagy dilation per Kraus operator, post-selected.
    SzNagyPerKraus,
    /// One Stinespring unitary for the whole channel, ancilla traced out.
    Stinespring,
    /// Per Kraus operator, `U · diag(Σ₊, Σ₋) · V†` with a Hadamard-conjugated
    /// ancilla, post-selected.
    Svd,
    /// Per Kraus operator, a four-term LCU with the given `ε`, post-selected.
    /// Approximate to `O(ε²)`; the output is trace-renormalized.
    Lcu { epsilon: f64 },
}

#[derive(Clone, Debug)]
enum Compiled {
    SzNagy(Vec<DilatedUnitary>),
    Stinespring(DilatedUnitary),
    Svd(Vec<(ComplexMatrix, DilatedUnitary, ComplexMatrix)>),
    Lcu(Vec<LcuDecomposition>),
}

/// A channel compiled once into dilated circuits and applied repeatedly.
#[derive(Clone, Debug)]
pub struct DilatedChannel {
    dim: usize,
    padded_dim: usize,
    system_qubits: usize,
    compiled: Compiled,
}

/// Embeds a Kraus set on `d` levels into `p ≥ d` levels: the first operator
/// becomes `M₀ ⊕ I`, the others `Mₖ ⊕ 0`, so the padded set is still trace
/// preserving and never populates the padding.
pub fn pad_channel(ch: &KrausChannel, p: usize) -> Result<KrausChannel> {
    let d = ch.dim();
    if p == d {
        return Ok(ch.clone());
    }
    let ops = ch
        .kraus_ops()
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mut big = m.pad_to(p, ZERO);
            if k == 0 {
                for i in d..p {
                    big.set_block(i, i, &ComplexMatrix::identity(1));
                }
            }
            big
        })
        .collect();
    KrausChannel::with_tolerance(ops, ch.tp_tolerance())
}

impl DilatedChannel {
    pub fn compile(ch: &KrausChannel, method: DilationMethod) -> Result<Self> {
        let dev = ch.check_trace_preserving();
        if dev > DEFAULT_TOL {
            return Err(Error::InvalidChannel(format!(
                "trace-preservation deviation {dev:.3e}; normalize the channel before dilating it"
            )));
        }
        let d = ch.dim();
        let (p, nq) = next_pow2(d);
        let padded = pad_channel(ch, p)?;
        let compiled = match method {
            DilationMethod::SzNagyPerKraus => Compiled::SzNagy(
                padded.kraus_ops().iter().map(dilation::sz_nagy).collect::<Result<_>>()?,
            ),
            DilationMethod::Stinespring => {
                let k = padded.kraus_ops().len();
                let (kp, _) = next_pow2(k);
                let mut ops = padded.kraus_ops().to_vec();
                ops.resize(kp, ComplexMatrix::zeros(p, p));
                // Zero operators widen the register to whole qubits; d² bound
                // does not apply to the padded list.
                let stacked = KrausChannel::stacked_unchecked(ops);
                Compiled::Stinespring(dilation::stinespring_stack(&stacked)?)
            }
            DilationMethod::Svd => Compiled::Svd(
                padded.kraus_ops().iter().map(dilation::svd_dilate).collect::<Result<_>>()?,
            ),
            DilationMethod::Lcu { epsilon } => Compiled::Lcu(
                padded
                    .kraus_ops()
                    .iter()
                    .map(|m| dilation::unitary_decomposition(m, epsilon))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Self {
            dim: d,
            padded_dim: p,
            system_qubits: nq,
            compiled,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total qubits touched by one branch circuit.
    pub fn register_qubits(&self) -> usize {
        self.system_qubits
            + match &self.compiled {
                Compiled::Stinespring(u) => next_pow2(u.ancilla_dim).1,
                Compiled::Lcu(decs) => next_pow2(decs.first().map_or(1, |d| d.unitaries.len())).1,
                _ => 1,
            }
    }

    /// Runs every `(eigenvector, branch)` circuit and recombines the results
    /// with exact branch probabilities.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "dimension-{} state through a dimension-{} channel",
                rho.dim(),
                self.dim
            )));
        }
        let eig = eigh(rho.matrix(), 1e-9)?;
        let mut kept: Vec<(f64, QubitState)> = Vec::new();
        for (k, &w) in eig.values.iter().enumerate() {
            if w < RANK_CUTOFF {
                continue;
            }
            let v = eig.vector(k).into_inner();
            let mut amps = vec![ZERO; self.padded_dim];
            amps[..self.dim].copy_from_slice(v.as_slice());
            let psi = ComplexVector::wrap(amps.into()).normalized();
            kept.push((w, QubitState::from_vector(psi)?));
        }
        let total: f64 = kept.iter().map(|(w, _)| w).sum();
        let branches = self.branch_count();
        let jobs: Vec<(usize, usize)> = (0..kept.len())
            .flat_map(|j| (0..branches).map(move |b| (j, b)))
            .collect();
        let parts: Vec<Option<ComplexMatrix>> = jobs
            .par_iter()
            .map(|&(j, b)| self.run_branch(&kept[j].1, b).map(|m| m.map(|m| m.scale_real(kept[j].0 / total))))
            .collect::<Result<_>>()?;
        let p = self.padded_dim;
        let mut acc = ComplexMatrix::zeros(p, p);
        for m in parts.into_iter().flatten() {
            acc = &acc + &m;
        }
        let leak: f64 = (self.dim..p).map(|i| acc.get(i, i).re.abs()).sum();
        if leak > PADDING_TOL {
            return Err(Error::PaddingLeak { population: leak });
        }
        let out = acc.block(0, 0, self.dim, self.dim);
        match self.compiled {
            Compiled::Lcu(_) => DensityMatrix::hermitized(&out, 1e-6),
            _ => DensityMatrix::symmetrized(&out, 1e-9),
        }
    }

    fn branch_count(&self) -> usize {
        match &self.compiled {
            Compiled::SzNagy(v) => v.len(),
            Compiled::Stinespring(_) => 1,
            Compiled::Svd(v) => v.len(),
            Compiled::Lcu(v) => v.len(),
        }
    }

    /// Unnormalized contribution `Mₖ|ψ⟩⟨ψ|Mₖ†` of one branch, or `None` when
    /// the branch vanishes.
    fn run_branch(&self, psi: &QubitState, b: usize) -> Result<Option<ComplexMatrix>> {
        let ns = self.system_qubits;
        let sys: Vec<usize> = (0..ns).collect();
        let weighted = |r: Result<(QubitState, f64)>, scale: f64| match r {
            Ok((phi, prob)) => Ok(Some(
                ComplexMatrix::outer(phi.amplitudes(), phi.amplitudes()).scale_real(prob * scale * scale),
            )),
            Err(Error::VanishingBranch { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        match &self.compiled {
            Compiled::SzNagy(dils) => {
                let dil = &dils[b];
                let all: Vec<usize> = (0..=ns).collect();
                let s = apply_unitary(&psi.with_ancillas(1), &dil.matrix, &all)?;
                weighted(postselect(&s, &[ns], &[false]), dil.scale)
            }
            Compiled::Stinespring(dil) => {
                let na = next_pow2(dil.ancilla_dim).1;
                let all: Vec<usize> = (0..ns + na).collect();
                let s = apply_unitary(&psi.with_ancillas(na), &dil.matrix, &all)?;
                let anc: Vec<usize> = (ns..ns + na).collect();
                Ok(Some(reduced(&s, &anc)))
            }
            Compiled::Svd(parts) => {
                let (u, us, vd) = &parts[b];
                let all: Vec<usize> = (0..=ns).collect();
                let h = paulis::hadamard();
                let mut s = psi.with_ancillas(1);
                s = apply_unitary(&s, vd, &sys)?;
                s = apply_unitary(&s, &h, &[ns])?;
                s = apply_unitary(&s, &us.matrix, &all)?;
                s = apply_unitary(&s, &h, &[ns])?;
                match postselect(&s, &[ns], &[false]) {
                    Ok((phi, prob)) => weighted(Ok((apply_unitary(&phi, u, &sys)?, prob)), us.scale),
                    Err(e) => weighted(Err(e), us.scale),
                }
            }
            Compiled::Lcu(decs) => {
                let dec = &decs[b];
                match dilation::lcu_apply(dec, psi.amplitudes()) {
                    Ok((phi, prob)) => {
                        let s = dec.one_norm();
                        Ok(Some(ComplexMatrix::outer(&phi, &phi).scale_real(prob * s * s)))
                    }
                    Err(Error::Annihilated) => Ok(None),
                    Err(e) => Err(e),
                }
            }
        }
    }
}

/// Evolves `ρ₀` through `ch` by running its dilated circuits on each
/// eigenvector of `ρ₀` and recombining the branches.
pub fn run_channel_via_dilation(
    rho0: &DensityMatrix,
    ch: &KrausChannel,
    method: DilationMethod,
) -> Result<DensityMatrix> {
    DilatedChannel::compile(ch, method)?.apply(rho0)
}

/// `|ψ⟩ ⊗ |0⟩` style helper for tests and callers that build registers by hand.
pub fn product_state(factors: &[ComplexVector]) -> Result<QubitState> {
    let mut v = ComplexVector::wrap(vec![ONE].into());
    for f in factors {
        v = ComplexVector::wrap(f.inner().kronecker(v.inner()));
    }
    QubitState::from_vector(v)
}
