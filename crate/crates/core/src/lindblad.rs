// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! GKSL master equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σₖ γₖ (Lₖ ρ Lₖ† − ½{Lₖ†Lₖ, ρ})
//! ```
//!
//! with exact (matrix exponential) and RK4 propagation, which serve as the
//! classical oracle for every other solver, plus the first-order Kraus step
//! used by the dilation methods.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{DensityMatrix, KrausChannel, MatrixJson};
use crate::error::{Error, Result};
use crate::numerics::{
    c, devectorize, expm, kron, spectral_norm, vectorize, ComplexMatrix, ComplexVector, DEFAULT_TOL,
};

/// Validation tolerance applied to propagated states.
pub const STATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Jump {
    pub operator: ComplexMatrix,
    pub rate: f64,
}

#[derive(Clone, Debug)]
pub struct Lindbladian {
    dim: usize,
    hamiltonian: ComplexMatrix,
    jumps: Vec<Jump>,
}

impl Lindbladian {
    pub fn new(hamiltonian: ComplexMatrix, jumps: Vec<(ComplexMatrix, f64)>) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(Error::InvalidLindbladian("Hamiltonian is not square".into()));
        }
        let dim = hamiltonian.rows();
        let defect = hamiltonian.hermiticity_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::InvalidLindbladian(format!(
                "Hamiltonian Hermiticity defect {defect:.3e}"
            )));
        }
        let mut out = Vec::with_capacity(jumps.len());
        for (k, (op, rate)) in jumps.into_iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::InvalidLindbladian(format!(
                    "jump {k} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::InvalidLindbladian(format!("jump {k} has rate {rate}")));
            }
            out.push(Jump { operator: op, rate });
        }
        Ok(Self {
            dim,
            hamiltonian,
            jumps: out,
        })
    }

    pub fn closed(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// `½ Σₖ γₖ Lₖ†Lₖ`.
    pub fn decay_operator(&self) -> ComplexMatrix {
        let mut k = ComplexMatrix::zeros(self.dim, self.dim);
        for j in &self.jumps {
            k = &k + &(&j.operator.adjoint() * &j.operator).scale_real(0.5 * j.rate);
        }
        k
    }

    /// `H − iK`, the generator of the no-jump evolution.
    pub fn effective_hamiltonian(&self) -> ComplexMatrix {
        &self.hamiltonian - &self.decay_operator().scale(c(0.0, 1.0))
    }

    /// Right-hand side `𝓛(ρ)` evaluated in matrix form.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let i = c(0.0, 1.0);
        let h = &self.hamiltonian;
        let comm = &(h * rho) - &(rho * h);
        let mut out = comm.scale(-i);
        for j in &self.jumps {
            let l = &j.operator;
            let ld = l.adjoint();
            let ldl = &ld * l;
            let sandwich = &(l * rho) * &ld;
            let anti = &(&ldl * rho) + &(rho * &ldl);
            out = &out + &(&sandwich - &anti.scale_real(0.5)).scale_real(j.rate);
        }
        out
    }

    pub fn to_json(&self) -> LindbladianJson {
        LindbladianJson {
            dim: self.dim,
            h: MatrixJson::from_matrix(&self.hamiltonian),
            jumps: self
                .jumps
                .iter()
                .map(|j| JumpJson {
                    l: MatrixJson::from_matrix(&j.operator),
                    gamma: j.rate,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &LindbladianJson) -> Result<Self> {
        let h = json.h.to_matrix(json.dim)?;
        let jumps = json
            .jumps
            .iter()
            .map(|j| Ok((j.l.to_matrix(json.dim)?, j.gamma)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(h, jumps)
    }
}

/// `{"dim": d, "H": matrix, "jumps": [{"L": matrix, "gamma": rate}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladianJson {
    pub dim: usize,
    #[serde(rename = "H")]
    pub h: MatrixJson,
    #[serde(default)]
    pub jumps: Vec<JumpJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpJson {
    #[serde(rename = "L")]
    pub l: MatrixJson,
    pub gamma: f64,
}

/// Column-stacked generator `𝓛` acting on `vec(ρ)`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Wraps a raw `d² × d²` matrix without checking trace conservation.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let dim = crate::numerics::integer_sqrt(matrix.rows())
            .filter(|_| matrix.is_square())
            .ok_or_else(|| Error::Dimension("superoperator must be d²×d²".into()))?;
        Ok(Self { dim, matrix })
    }

    /// System dimension `d`.
    pub fn system_dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `max |vec(I)† 𝓛|`; zero for a trace-conserving generator.
    pub fn trace_defect(&self) -> f64 {
        let vi = vectorize(&ComplexMatrix::identity(self.dim)).expect("square");
        let row = self.matrix.inner().adjoint() * vi.inner();
        row.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `exp(𝓛 t)`.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        expm(&self.matrix.scale_real(t))
    }
}

/// Builds `𝓛 = −i(I⊗H − Hᵀ⊗I) + Σₖ γₖ[L̄ₖ⊗Lₖ − ½ I⊗Lₖ†Lₖ − ½ (Lₖ†Lₖ)ᵀ⊗I]`.
pub fn superoperator(lind: &Lindbladian) -> Result<Superoperator> {
    superoperator_with_dissipator_sign(lind, -1.0)
}

/// Same as [`superoperator`] with the anticommutator entering as
/// `sign · ½{L†L, ρ}`. Only `sign = −1` conserves trace; other values exist
/// for negative-control checks.
pub fn superoperator_with_dissipator_sign(lind: &Lindbladian, sign: f64) -> Result<Superoperator> {
    let d = lind.dim;
    let id = ComplexMatrix::identity(d);
    let h = &lind.hamiltonian;
    let mut m = (&kron(&id, h)? - &kron(&h.transpose(), &id)?).scale(c(0.0, -1.0));
    for j in &lind.jumps {
        let l = &j.operator;
        let ldl = &l.adjoint() * l;
        let sandwich = kron(&l.conjugate(), l)?;
        let anti = &kron(&id, &ldl)? + &kron(&ldl.transpose(), &id)?;
        let term = &sandwich + &anti.scale_real(0.5 * sign);
        m = &m + &term.scale_real(j.rate);
    }
    Ok(Superoperator { dim: d, matrix: m })
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and ≥ 0")));
    }
    Ok(())
}

fn check_dims(lind: &Lindbladian, rho: &DensityMatrix) -> Result<()> {
    if lind.dim != rho.dim() {
        return Err(Error::Dimension(format!(
            "state dimension {} for a dimension-{} Lindbladian",
            rho.dim(),
            lind.dim
        )));
    }
    Ok(())
}

/// `devec(exp(𝓛t) vec(ρ₀))`.
pub fn propagate_exact(lind: &Lindbladian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    check_dims(lind, rho0)?;
    let sup = superoperator(lind)?;
    propagate_with(&sup, rho0, t)
}

fn propagate_with(sup: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let p = sup.propagator(t)?;
    let v = p.apply(&vectorize(rho0.matrix())?);
    DensityMatrix::symmetrized(&devectorize(&v)?, STATE_TOL)
}

/// Exact states at each requested time. Grid points are independent and
/// computed in parallel.
pub fn propagate_exact_grid(lind: &Lindbladian, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    check_dims(lind, rho0)?;
    for &t in times {
        check_time(t)?;
    }
    let sup = superoperator(lind)?;
    times
        .par_iter()
        .map(|&t| propagate_with(&sup, rho0, t))
        .collect()
}

/// Classical RK4 on `dρ/dt = 𝓛ρ`. The final partial step is shortened so the
/// integration ends exactly at `t`.
pub fn propagate_rk4(lind: &Lindbladian, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    let traj = rk4_trajectory(lind, rho0, t, dt, &[t])?;
    Ok(traj.into_iter().next().expect("one output time"))
}

/// RK4 states at each of `outputs` (ascending, within `[0, t]`). Output times
/// that are not on the `dt` grid are hit exactly by a shortened step.
pub fn rk4_trajectory(
    lind: &Lindbladian,
    rho0: &DensityMatrix,
    t: f64,
    dt: f64,
    outputs: &[f64],
) -> Result<Vec<DensityMatrix>> {
    check_time(t)?;
    check_dims(lind, rho0)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt {dt} must be positive")));
    }
    let mut rho = rho0.matrix().clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(outputs.len());
    for &target in outputs {
        if target < now - 1e-12 || target > t + 1e-12 {
            return Err(Error::InvalidArgument(format!("output time {target} out of order")));
        }
        let n = ((target - now) / dt - 1e-9).ceil().max(0.0) as usize;
        if n > 0 {
            let h = (target - now) / n as f64;
            for _ in 0..n {
                rho = rk4_step(lind, &rho, h);
            }
        }
        now = target;
        out.push(DensityMatrix::symmetrized(&rho, STATE_TOL)?);
    }
    Ok(out)
}

fn rk4_step(lind: &Lindbladian, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let k1 = lind.apply(rho);
    let k2 = lind.apply(&(rho + &k1.scale_real(0.5 * h)));
    let k3 = lind.apply(&(rho + &k2.scale_real(0.5 * h)));
    let k4 = lind.apply(&(rho + &k3.scale_real(h)));
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    rho + &incr.scale_real(h / 6.0)
}

/// First-order Kraus channel for one step `dt`:
/// `Mₖ = √(γₖ dt) Lₖ` for every jump and `M₀ = I − (iH + K) dt`, `K = ½Σγ L†L`.
///
/// The set is trace preserving only to `O(dt²)`; its tolerance is set to the
/// measured deviation. Fails when `dt ‖iH + K‖ ≥ 1`, where `M₀` stops being a
/// near-contraction.
pub fn kraus_step(lind: &Lindbladian, dt: f64) -> Result<KrausChannel> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt {dt} must be positive")));
    }
    let d = lind.dim;
    let gen = &lind.hamiltonian.scale(c(0.0, 1.0)) + &lind.decay_operator();
    let gnorm = spectral_norm(&gen);
    if dt * gnorm >= 1.0 {
        return Err(Error::StepTooLarge {
            dt,
            reason: format!("dt·‖iH + K‖ = {:.3} ≥ 1", dt * gnorm),
        });
    }
    let m0 = &ComplexMatrix::identity(d) - &gen.scale_real(dt);
    let mut ops = vec![m0];
    for j in &lind.jumps {
        if j.rate > 0.0 {
            ops.push(j.operator.scale_real((j.rate * dt).sqrt()));
        }
    }
    let probe = KrausChannel::with_tolerance(ops.clone(), f64::INFINITY)?;
    let dev = probe.check_trace_preserving();
    KrausChannel::with_tolerance(ops, dev.max(DEFAULT_TOL))
}

/// Exact step channel `exp(𝓛 dt)` expressed in Kraus form via its Choi matrix.
pub fn exact_step_channel(lind: &Lindbladian, dt: f64) -> Result<KrausChannel> {
    check_time(dt)?;
    let sup = superoperator(lind)?;
    let p = sup.propagator(dt)?;
    let choi = crate::channels::choi_from_superoperator(&p, lind.dim)?;
    crate::channels::kraus_from_choi(&choi, lind.dim, 1e-8)
}

/// Vectorized form as a convenience for the solvers.
pub fn vec_state(rho: &DensityMatrix) -> ComplexVector {
    vectorize(rho.matrix()).expect("density matrices are square")
}
