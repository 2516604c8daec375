// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Stochastic evaluation of mixed-unitary channels.
//!
//! Each sample chains one randomly drawn unitary per step; the sample mean of
//! the resulting states is an unbiased estimator of the composed channel.

use rand::Rng;
use rayon::prelude::*;

use crate::channels::{DensityMatrix, KrausChannel};
use crate::error::{Error, Result};
use crate::lindblad::{exact_step_channel, Lindbladian};
use crate::numerics::{
    expectation, kron, partial_trace, unitarity_defect, ComplexMatrix, DEFAULT_TOL,
};
use crate::rng::stream;

/// `𝓔[ρ] = Σ pᵢ Uᵢ ρ Uᵢ†`.
///
/// With `ancilla_dim > 1` each `Uᵢ` acts on `ancilla ⊗ system`; the ancilla
/// is prepared in `|0⟩` before the step and discarded after it.
#[derive(Clone, Debug)]
pub struct MixedUnitaryChannel {
    dim: usize,
    ancilla_dim: usize,
    branches: Vec<(f64, ComplexMatrix)>,
}

impl MixedUnitaryChannel {
    pub fn new(branches: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        Self::with_ancilla(branches, 1)
    }

    pub fn with_ancilla(branches: Vec<(f64, ComplexMatrix)>, ancilla_dim: usize) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::InvalidChannel("no branches".into()))?;
        let full = first.1.rows();
        if ancilla_dim == 0 || full % ancilla_dim != 0 {
            return Err(Error::Dimension(format!(
                "ancilla dimension {ancilla_dim} does not divide {full}"
            )));
        }
        let mut total = 0.0;
        for (p, u) in &branches {
            if !(*p >= 0.0) {
                return Err(Error::InvalidChannel(format!("branch probability {p} is negative")));
            }
            if u.rows() != full {
                return Err(Error::Dimension("branch unitaries differ in size".into()));
            }
            let defect = unitarity_defect(u);
            if defect > DEFAULT_TOL {
                return Err(Error::NotUnitary {
                    defect,
                    tol: DEFAULT_TOL,
                });
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidChannel(format!(
                "branch probabilities sum to {total}"
            )));
        }
        Ok(Self {
            dim: full / ancilla_dim,
            ancilla_dim,
            branches,
        })
    }

    /// Rewrites a channel whose Kraus operators are all proportional to
    /// unitaries, `Mₖ = √pₖ Uₖ`. Returns `None` otherwise.
    pub fn from_kraus(ch: &KrausChannel) -> Option<Self> {
        let d = ch.dim();
        let mut branches = Vec::new();
        for m in ch.kraus_ops() {
            let g = &m.adjoint() * m;
            let p = g.trace().re / d as f64;
            if p <= 0.0 {
                continue;
            }
            if g.max_abs_diff(&ComplexMatrix::identity(d).scale_real(p)) > 1e-10 {
                return None;
            }
            branches.push((p, m.scale_real(1.0 / p.sqrt())));
        }
        let total: f64 = branches.iter().map(|b| b.0).sum();
        for b in &mut branches {
            b.0 /= total;
        }
        Self::new(branches).ok()
    }

    /// Single-branch channel `U` on `ancilla ⊗ system` with the Stinespring
    /// unitary of `ch`; deterministic, so every sample agrees.
    pub fn stinespring(ch: &KrausChannel) -> Result<Self> {
        let dil = crate::dilation::stinespring_stack(&ch.normalized()?)?;
        Self::with_ancilla(vec![(1.0, dil.matrix)], dil.ancilla_dim)
    }

    /// Step channel `exp(𝓛 dt)` as a mixed-unitary channel when it is one,
    /// otherwise as its single-branch Stinespring unitary.
    pub fn from_lindbladian(lind: &Lindbladian, dt: f64) -> Result<Self> {
        let step = exact_step_channel(lind, dt)?;
        match Self::from_kraus(&step) {
            Some(mu) => Ok(mu),
            None => Self::stinespring(&step),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn branches(&self) -> &[(f64, ComplexMatrix)] {
        &self.branches
    }

    pub fn is_deterministic(&self) -> bool {
        self.branches.iter().filter(|b| b.0 > 0.0).count() == 1
    }

    /// `Uᵢ ρ Uᵢ†` for branch `i`, including the ancilla round trip.
    pub fn apply_branch(&self, i: usize, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let u = &self.branches[i].1;
        if self.ancilla_dim == 1 {
            return Ok(&(u * rho) * &u.adjoint());
        }
        let mut anc0 = ComplexMatrix::zeros(self.ancilla_dim, self.ancilla_dim);
        anc0.set_block(0, 0, &ComplexMatrix::identity(1));
        let big = kron(&anc0, rho)?;
        let out = &(u * &big) * &u.adjoint();
        partial_trace(&out, &[self.ancilla_dim, self.dim], &[1])
    }

    /// Exact channel action `Σ pᵢ Uᵢ ρ Uᵢ†`.
    pub fn apply_exact(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, (p, _)) in self.branches.iter().enumerate() {
            if *p > 0.0 {
                acc = &acc + &self.apply_branch(i, rho)?.scale_real(*p);
            }
        }
        Ok(acc)
    }

    fn draw(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, (p, _)) in self.branches.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.branches.iter().rposition(|b| b.0 > 0.0).unwrap_or(0)
    }
}

/// Sample mean and its standard error.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub estimate: DensityMatrix,
    /// Largest entrywise standard error of the mean.
    pub stderr: f64,
    pub n_samples: usize,
}

fn check_samples(ch: &MixedUnitaryChannel, rho0: &DensityMatrix, n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if rho0.dim() != ch.dim {
        return Err(Error::Dimension(format!(
            "dimension-{} state for a dimension-{} channel",
            rho0.dim(),
            ch.dim
        )));
    }
    Ok(())
}

/// One trajectory: the state after each of `n_steps` sampled steps.
fn trajectory(
    ch: &MixedUnitaryChannel,
    rho0: &DensityMatrix,
    n_steps: usize,
    seed: u64,
    sample: usize,
) -> Result<Vec<ComplexMatrix>> {
    let mut rng = stream(seed, "monte-carlo", sample as u64);
    let mut rho = rho0.matrix().clone();
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let i = ch.draw(&mut rng);
        rho = ch.apply_branch(i, &rho)?;
        out.push(rho.clone());
    }
    Ok(out)
}

/// Estimates `𝓔ⁿ(ρ₀)` from `n_samples` Markov-chained unitary sequences.
pub fn mc_estimate(
    ch: &MixedUnitaryChannel,
    rho0: &DensityMatrix,
    n_steps: usize,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(ch, rho0, n_samples)?;
    if ch.is_deterministic() {
        // Every sample follows the same branch sequence.
        let mut rho = rho0.matrix().clone();
        for _ in 0..n_steps {
            rho = ch.apply_exact(&rho)?;
        }
        return Ok(McEstimate {
            estimate: DensityMatrix::symmetrized(&rho, 1e-9)?,
            stderr: 0.0,
            n_samples,
        });
    }
    let finals: Vec<ComplexMatrix> = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            if n_steps == 0 {
                Ok(rho0.matrix().clone())
            } else {
                trajectory(ch, rho0, n_steps, seed, s).map(|mut t| t.pop().expect("n_steps > 0"))
            }
        })
        .collect::<Result<_>>()?;
    let d = ch.dim;
    let n = n_samples as f64;
    let mut mean = ComplexMatrix::zeros(d, d);
    for m in &finals {
        mean = &mean + m;
    }
    mean = mean.scale_real(1.0 / n);
    let mut stderr: f64 = 0.0;
    if n_samples > 1 {
        for i in 0..d {
            for j in 0..d {
                let mu = mean.get(i, j);
                let var = finals.iter().map(|m| (m.get(i, j) - mu).norm_sqr()).sum::<f64>() / (n - 1.0);
                stderr = stderr.max((var / n).sqrt());
            }
        }
    }
    Ok(McEstimate {
        estimate: DensityMatrix::symmetrized(&mean, 1e-9)?,
        stderr,
        n_samples,
    })
}

/// Per-time, per-observable sample means and standard errors, for steps
/// `1..=n_steps`.
#[derive(Clone, Debug)]
pub struct McSeries {
    /// `means[step][observable]`
    pub means: Vec<Vec<f64>>,
    pub stderrs: Vec<Vec<f64>>,
}

pub fn mc_observables(
    ch: &MixedUnitaryChannel,
    rho0: &DensityMatrix,
    observables: &[ComplexMatrix],
    n_steps: usize,
    n_samples: usize,
    seed: u64,
) -> Result<McSeries> {
    check_samples(ch, rho0, n_samples)?;
    if ch.is_deterministic() {
        let mut rho = rho0.matrix().clone();
        let mut means = Vec::with_capacity(n_steps);
        for _ in 0..n_steps {
            rho = ch.apply_exact(&rho)?;
            means.push(observables.iter().map(|o| expectation(o, &rho)).collect());
        }
        let stderrs = vec![vec![0.0; observables.len()]; n_steps];
        return Ok(McSeries { means, stderrs });
    }
    let values: Vec<Vec<Vec<f64>>> = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let traj = trajectory(ch, rho0, n_steps, seed, s)?;
            Ok(traj
                .iter()
                .map(|rho| observables.iter().map(|o| expectation(o, rho)).collect())
                .collect())
        })
        .collect::<Result<_>>()?;
    let n = n_samples as f64;
    let mut means = vec![vec![0.0; observables.len()]; n_steps];
    let mut stderrs = vec![vec![0.0; observables.len()]; n_steps];
    for t in 0..n_steps {
        for k in 0..observables.len() {
            let mu = values.iter().map(|v| v[t][k]).sum::<f64>() / n;
            means[t][k] = mu;
            stderrs[t][k] = if n_samples > 1 {
                let var = values.iter().map(|v| (v[t][k] - mu).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                f64::INFINITY
            };
        }
    }
    Ok(McSeries { means, stderrs })
}

/// Exact mean over every branch sequence of length `n_steps`, weighted by
/// its probability. Exponential in `n_steps`; meant for small checks.
pub fn enumerate_branches(ch: &MixedUnitaryChannel, rho0: &DensityMatrix, n_steps: usize) -> Result<ComplexMatrix> {
    fn go(ch: &MixedUnitaryChannel, rho: &ComplexMatrix, weight: f64, left: usize, acc: &mut ComplexMatrix) -> Result<()> {
        if left == 0 {
            *acc = &*acc + &rho.scale_real(weight);
            return Ok(());
        }
        for (i, (p, _)) in ch.branches.iter().enumerate() {
            if *p > 0.0 {
                go(ch, &ch.apply_branch(i, rho)?, weight * p, left - 1, acc)?;
            }
        }
        Ok(())
    }
    let mut acc = ComplexMatrix::zeros(ch.dim, ch.dim);
    go(ch, rho0.matrix(), 1.0, n_steps, &mut acc)?;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, paulis, ComplexVector};
    use crate::testing::{random_density, random_unitary};

    fn dephasing(p: f64) -> MixedUnitaryChannel {
        MixedUnitaryChannel::new(vec![(1.0 - p, paulis::id2()), (p, paulis::z())]).unwrap()
    }

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&ComplexVector::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap()).unwrap()
    }

    #[test]
    fn single_branch_is_exact() {
        let u = random_unitary(2, 3);
        let ch = MixedUnitaryChannel::new(vec![(1.0, u.clone())]).unwrap();
        let rho = random_density(1, 3);
        let est = mc_estimate(&ch, &rho, 1, 50, 9).unwrap();
        let want = &(&u * rho.matrix()) * &u.adjoint();
        assert!(est.estimate.matrix().max_abs_diff(&want) < 1e-12);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn dephasing_off_diagonal() {
        let est = mc_estimate(&dephasing(0.3), &plus(), 1, 10_000, 1).unwrap();
        let off = est.estimate.matrix().get(0, 1).re;
        assert!((off - 0.2).abs() <= 3.0 * est.stderr, "{off} ± {}", est.stderr);
    }

    #[test]
    fn enumeration_equals_composed_channel() {
        let ch = dephasing(0.3);
        let rho = random_density(4, 2);
        for steps in 1..=5 {
            let brute = enumerate_branches(&ch, &rho, steps).unwrap();
            let mut exact = rho.matrix().clone();
            for _ in 0..steps {
                exact = ch.apply_exact(&exact).unwrap();
            }
            assert!(brute.max_abs_diff(&exact) < 1e-14);
        }
    }

    #[test]
    fn stderr_scales_as_inverse_root() {
        let ch = dephasing(0.3);
        let ns = [1_000usize, 4_000, 16_000, 64_000];
        let pts: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n| {
                let e = mc_estimate(&ch, &plus(), 3, n, 5).unwrap();
                ((n as f64).ln(), e.stderr.ln())
            })
            .collect();
        let slope = fit_slope(&pts);
        assert!((slope + 0.5).abs() <= 0.05, "slope {slope}");
    }

    pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    #[test]
    fn determinism() {
        let ch = dephasing(0.4);
        let a = mc_estimate(&ch, &plus(), 4, 500, 3).unwrap();
        let b = mc_estimate(&ch, &plus(), 4, 500, 3).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn from_lindbladian_cases() {
        let deph = Lindbladian::new(ComplexMatrix::zeros(2, 2), vec![(paulis::z(), 0.5)]).unwrap();
        let mu = MixedUnitaryChannel::from_lindbladian(&deph, 0.1).unwrap();
        assert_eq!(mu.ancilla_dim(), 1);
        assert_eq!(mu.branches().len(), 2);
        let p = (1.0 - (-2.0 * 0.5 * 0.1f64).exp()) / 2.0;
        let small = mu.branches().iter().map(|b| b.0).fold(1.0, f64::min);
        assert!((small - p).abs() < 1e-12);

        let ad = Lindbladian::new(ComplexMatrix::zeros(2, 2), vec![(paulis::sigma_minus(), 1.0)]).unwrap();
        let mu = MixedUnitaryChannel::from_lindbladian(&ad, 0.1).unwrap();
        assert!(mu.is_deterministic());
        let rho = DensityMatrix::basis(2, 1);
        let out = mc_estimate(&mu, &rho, 10, 2, 0).unwrap();
        assert!((out.estimate.population(1) - (-1.0f64).exp()).abs() < 1e-10);
        assert_eq!(out.stderr, 0.0);
    }

    #[test]
    fn rejects_bad_branches() {
        assert!(MixedUnitaryChannel::new(vec![(0.5, paulis::id2())]).is_err());
        assert!(MixedUnitaryChannel::new(vec![(1.0, paulis::sigma_minus())]).is_err());
        assert!(MixedUnitaryChannel::new(vec![(1.5, paulis::id2()), (-0.5, paulis::z())]).is_err());
    }

    #[test]
    fn observable_series_matches_estimate() {
        let ch = dephasing(0.2);
        let s = mc_observables(&ch, &plus(), &[paulis::x()], 3, 400, 8).unwrap();
        let e = mc_estimate(&ch, &plus(), 3, 400, 8).unwrap();
        let x = e.estimate.expectation(&paulis::x());
        assert!((s.means[2][0] - x).abs() < 1e-12);
    }
}
