// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Benchmark systems.
//!
//! Every numeric default here is a synthetic value picked so the qualitative
//! behaviour (decay, transfer, oscillation) is visible over the default
//! horizon. None of them is taken from a measured system.
//!
//! Qubit conventions: `|0⟩` is the ground state and `|1⟩` the excited state
//! for the two-level models. Spin models (TFIM, radical pair) use
//! `|↑⟩ = |0⟩`, so `Z|↑⟩ = +|↑⟩`.

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::lindblad::Lindbladian;
use crate::numerics::{
    c, embed_site, kron, kron_all, partial_trace, paulis, ComplexMatrix, ComplexVector,
};
use crate::solvers::PurifiedState;

#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub matrix: ComplexMatrix,
}

impl Observable {
    fn new(name: impl Into<String>, matrix: ComplexMatrix) -> Self {
        Self {
            name: name.into(),
            matrix,
        }
    }
}

/// System ⊗ bath data for models that are evolved as a pure joint state.
#[derive(Clone, Debug)]
pub struct PurificationSpec {
    pub system_dim: usize,
    pub bath_dim: usize,
    pub total_hamiltonian: ComplexMatrix,
    pub initial: PurifiedState,
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: String,
    /// Generator on the full simulated space. For purification models this
    /// is the closed evolution of system and bath together.
    pub lindbladian: Lindbladian,
    pub initial_state: DensityMatrix,
    /// Observables act on the system; see [`ModelSpec::system_state`].
    pub observables: Vec<Observable>,
    pub default_horizon: f64,
    pub default_dt: f64,
    pub purification: Option<PurificationSpec>,
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        self.lindbladian.dim()
    }

    /// Reduces a full-space state to the space the observables act on.
    pub fn system_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match &self.purification {
            None => Ok(rho.clone()),
            Some(p) => {
                let r = partial_trace(rho.matrix(), &[p.system_dim, p.bath_dim], &[0])?;
                DensityMatrix::symmetrized(&r, 1e-9)
            }
        }
    }

    pub fn observable(&self, name: &str) -> Option<&Observable> {
        self.observables.iter().find(|o| o.name == name)
    }

    pub fn observable_names(&self) -> Vec<&str> {
        self.observables.iter().map(|o| o.name.as_str()).collect()
    }

    /// Observables lifted to the full simulated space (`O ⊗ I_bath` for
    /// purification models).
    pub fn full_space_observables(&self) -> Result<Vec<ComplexMatrix>> {
        self.observables
            .iter()
            .map(|o| match &self.purification {
                None => Ok(o.matrix.clone()),
                Some(p) => kron(&o.matrix, &ComplexMatrix::identity(p.bath_dim)),
            })
            .collect()
    }

    /// Expectation of every observable on a full-space state.
    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        let s = self.system_state(rho)?;
        Ok(self.observables.iter().map(|o| s.expectation(&o.matrix)).collect())
    }
}

fn require_rate(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} = {v} must be a finite rate ≥ 0")));
    }
    Ok(())
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} = {v} must be finite")));
    }
    Ok(())
}

/// `|↓⟩⟨↑|` with `|↑⟩ = |0⟩`.
fn spin_lowering() -> ComplexMatrix {
    paulis::sigma_plus()
}

pub const AMPLITUDE_DAMPING_NAME: &str = "amplitude_damping";
pub const DEPHASING_NAME: &str = "dephasing";
pub const TFIM_NAME: &str = "dissipative_tfim";
pub const EXCITON_NAME: &str = "exciton_transfer";
pub const RADICAL_PAIR_NAME: &str = "radical_pair";
pub const EXCHANGE_NAME: &str = "exchange_purification";
pub const SPIN_BOSON_NAME: &str = "spin_boson";

pub const MODEL_NAMES: [&str; 7] = [
    AMPLITUDE_DAMPING_NAME,
    DEPHASING_NAME,
    TFIM_NAME,
    EXCITON_NAME,
    RADICAL_PAIR_NAME,
    EXCHANGE_NAME,
    SPIN_BOSON_NAME,
];

/// One qubit, `H = ωZ/2`, jump `(σ₋, γ)` with `σ₋ = |0⟩⟨1|`; starts in `|1⟩`.
pub fn amplitude_damping_model(gamma: f64, omega: f64) -> Result<ModelSpec> {
    require_rate("gamma", gamma)?;
    require_finite("omega", omega)?;
    let lind = Lindbladian::new(paulis::z().scale_real(0.5 * omega), vec![(paulis::sigma_minus(), gamma)])?;
    Ok(ModelSpec {
        name: AMPLITUDE_DAMPING_NAME.into(),
        lindbladian: lind,
        initial_state: DensityMatrix::basis(2, 1),
        observables: vec![Observable::new("excited_population", paulis::projector(1))],
        default_horizon: 5.0,
        default_dt: 0.05,
        purification: None,
    })
}

/// One qubit, jump `(Z, γ_φ)`; starts in `|+⟩`, so `⟨X⟩ = e^{−2γ_φ t}`.
pub fn dephasing_model(gamma_phi: f64) -> Result<ModelSpec> {
    require_rate("gamma_phi", gamma_phi)?;
    let lind = Lindbladian::new(ComplexMatrix::zeros(2, 2), vec![(paulis::z(), gamma_phi)])?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = ComplexVector::new(vec![c(s, 0.0), c(s, 0.0)])?;
    Ok(ModelSpec {
        name: DEPHASING_NAME.into(),
        lindbladian: lind,
        initial_state: DensityMatrix::pure(&plus)?,
        observables: vec![
            Observable::new("x_expectation", paulis::x()),
            Observable::new("excited_population", paulis::projector(1)),
        ],
        default_horizon: 5.0,
        default_dt: 0.05,
        purification: None,
    })
}

/// Open chain `H = −J Σ ZᵢZᵢ₊₁ − h Σ Xᵢ` with spin lowering on every site at
/// rate `γ`; starts all up. Observable: `(1/n) Σ ⟨Zᵢ⟩`.
pub fn dissipative_tfim_model(n: usize, j_coupling: f64, h_field: f64, gamma: f64) -> Result<ModelSpec> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("TFIM size n = {n} must be in 2..=4")));
    }
    require_finite("j_coupling", j_coupling)?;
    require_finite("h_field", h_field)?;
    require_rate("gamma", gamma)?;
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    let mut mag = ComplexMatrix::zeros(dim, dim);
    let mut jumps = Vec::with_capacity(n);
    for i in 0..n {
        let zi = embed_site(&paulis::z(), i, n)?;
        h = &h - &embed_site(&paulis::x(), i, n)?.scale_real(h_field);
        if i + 1 < n {
            let zz = &zi * &embed_site(&paulis::z(), i + 1, n)?;
            h = &h - &zz.scale_real(j_coupling);
        }
        mag = &mag + &zi.scale_real(1.0 / n as f64);
        jumps.push((embed_site(&spin_lowering(), i, n)?, gamma));
    }
    Ok(ModelSpec {
        name: TFIM_NAME.into(),
        lindbladian: Lindbladian::new(h, jumps)?,
        initial_state: DensityMatrix::basis(dim, 0),
        observables: vec![Observable::new("magnetization", mag)],
        default_horizon: 5.0,
        default_dt: 0.05,
        purification: None,
    })
}

/// Site-basis exciton transfer with a sink.
///
/// Levels `0..n_sites` are sites, level `n_sites` is the sink. `couplings`
/// is the full `n×n` symmetric hopping matrix (its diagonal is ignored).
/// Every site dephases through `|i⟩⟨i|` at `dephasing_rates[i]`;
/// `|sink⟩⟨sink_site|` transfers irreversibly at `sink_rate`. The initial
/// excitation sits on `initial_site`.
pub struct ExcitonParams {
    pub site_energies: Vec<f64>,
    pub couplings: Vec<Vec<f64>>,
    pub dephasing_rates: Vec<f64>,
    pub sink_rate: f64,
    pub sink_site: usize,
    pub initial_site: usize,
}

impl ExcitonParams {
    /// Synthetic chain: energies staggered by 0.4 downhill towards the sink,
    /// nearest-neighbour hopping 1, dephasing 0.5 per site, sink rate 1 at
    /// the last site.
    pub fn chain(n_sites: usize) -> Self {
        let couplings = (0..n_sites)
            .map(|i| (0..n_sites).map(|j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            site_energies: (0..n_sites).map(|i| -0.4 * i as f64).collect(),
            couplings,
            dephasing_rates: vec![0.5; n_sites],
            sink_rate: 1.0,
            sink_site: n_sites.saturating_sub(1),
            initial_site: 0,
        }
    }
}

pub const MAX_EXCITON_SITES: usize = 15;

pub fn exciton_transfer_model(p: &ExcitonParams) -> Result<ModelSpec> {
    let n = p.site_energies.len();
    if !(2..=MAX_EXCITON_SITES).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "exciton model needs 2..={MAX_EXCITON_SITES} sites, got {n}"
        )));
    }
    if p.couplings.len() != n || p.couplings.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("couplings must be a {n}x{n} matrix")));
    }
    if p.dephasing_rates.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} dephasing rates for {n} sites",
            p.dephasing_rates.len()
        )));
    }
    if p.sink_site >= n {
        return Err(Error::InvalidArgument(format!("sink_site {} out of range", p.sink_site)));
    }
    if p.initial_site >= n {
        return Err(Error::InvalidArgument(format!("initial_site {} out of range", p.initial_site)));
    }
    for (i, &e) in p.site_energies.iter().enumerate() {
        require_finite(&format!("site_energies[{i}]"), e)?;
    }
    for (i, &g) in p.dephasing_rates.iter().enumerate() {
        require_rate(&format!("dephasing_rates[{i}]"), g)?;
    }
    require_rate("sink_rate", p.sink_rate)?;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (p.couplings[i][j], p.couplings[j][i]);
            require_finite(&format!("couplings[{i}][{j}]"), a)?;
            if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "couplings[{i}][{j}] = {a} differs from couplings[{j}][{i}] = {b}"
                )));
            }
        }
    }
    let d = n + 1;
    let mut h = nalgebra::DMatrix::zeros(d, d);
    for i in 0..n {
        h[(i, i)] = c(p.site_energies[i], 0.0);
        for j in 0..n {
            if i != j {
                h[(i, j)] = c(p.couplings[i][j], 0.0);
            }
        }
    }
    let proj = |k: usize| ComplexMatrix::outer(&ComplexVector::basis(d, k), &ComplexVector::basis(d, k));
    let mut jumps: Vec<(ComplexMatrix, f64)> = (0..n).map(|i| (proj(i), p.dephasing_rates[i])).collect();
    jumps.push((
        ComplexMatrix::outer(&ComplexVector::basis(d, n), &ComplexVector::basis(d, p.sink_site)),
        p.sink_rate,
    ));
    let mut observables: Vec<Observable> = (0..n)
        .map(|i| Observable::new(format!("site_{i}_population"), proj(i)))
        .collect();
    observables.push(Observable::new("sink_population", proj(n)));
    Ok(ModelSpec {
        name: EXCITON_NAME.into(),
        lindbladian: Lindbladian::new(ComplexMatrix::from_dmatrix(h)?, jumps)?,
        initial_state: DensityMatrix::basis(d, p.initial_site),
        observables,
        default_horizon: 10.0 * n as f64,
        default_dt: 0.05,
        purification: None,
    })
}

/// Two electron spins and one nuclear spin-½ (`S₁ ⊗ S₂ ⊗ I`, levels 0..8)
/// plus shelves `S` (level 8) and `T` (level 9).
///
/// `H = B (S₁ᶻ + S₂ᶻ) + a S₁·I`. Singlet states drain into shelf `S` at
/// `k_s` and triplet states into shelf `T` at `k_t`, one jump per
/// (electron state, nuclear state) pair, which keeps the nuclear spin
/// untouched by recombination. Starts in the electron singlet with an
/// unpolarized nucleus.
pub fn radical_pair_model(b_field: f64, hyperfine: f64, k_s: f64, k_t: f64) -> Result<ModelSpec> {
    require_finite("b_field", b_field)?;
    require_finite("hyperfine", hyperfine)?;
    require_rate("k_s", k_s)?;
    require_rate("k_t", k_t)?;
    let half = |m: ComplexMatrix| m.scale_real(0.5);
    let spin = [half(paulis::x()), half(paulis::y()), half(paulis::z())];
    let on = |site: usize, op: &ComplexMatrix| embed_site(op, site, 3);
    let mut h8 = &on(0, &spin[2])? + &on(1, &spin[2])?;
    h8 = h8.scale_real(b_field);
    for s in &spin {
        h8 = &h8 + &(&on(0, s)? * &on(2, s)?).scale_real(hyperfine);
    }
    let d = 10;
    let h = h8.pad_to(d, c(0.0, 0.0));

    // Two-electron states in the |s₁ s₂⟩ basis (index 2·s₁ + s₂).
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pair = |a: [f64; 4]| ComplexVector::new(a.iter().map(|&x| c(x, 0.0)).collect()).expect("finite");
    let singlet = pair([0.0, r, -r, 0.0]);
    let triplets = [pair([1.0, 0.0, 0.0, 0.0]), pair([0.0, r, r, 0.0]), pair([0.0, 0.0, 0.0, 1.0])];
    let embed = |electrons: &ComplexVector, nuclear: usize| -> Result<ComplexVector> {
        let e = ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from_column_slice(4, 1, electrons.as_slice()))?;
        let full = kron(&e, &ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from_column_slice(
            2,
            1,
            ComplexVector::basis(2, nuclear).as_slice(),
        ))?)?;
        let mut v: Vec<_> = full.column(0).iter().copied().collect();
        v.resize(d, c(0.0, 0.0));
        ComplexVector::new(v)
    };
    let shelf_s = ComplexVector::basis(d, 8);
    let shelf_t = ComplexVector::basis(d, 9);
    let mut jumps = Vec::new();
    let mut rho0 = ComplexMatrix::zeros(d, d);
    for m in 0..2 {
        let s = embed(&singlet, m)?;
        jumps.push((ComplexMatrix::outer(&shelf_s, &s), k_s));
        rho0 = &rho0 + &ComplexMatrix::outer(&s, &s).scale_real(0.5);
        for t in &triplets {
            jumps.push((ComplexMatrix::outer(&shelf_t, &embed(t, m)?), k_t));
        }
    }
    let electron_singlet = {
        let p = ComplexMatrix::outer(&singlet, &singlet);
        kron_all(&[p, paulis::id2()])?.pad_to(d, c(0.0, 0.0))
    };
    Ok(ModelSpec {
        name: RADICAL_PAIR_NAME.into(),
        lindbladian: Lindbladian::new(h, jumps)?,
        initial_state: DensityMatrix::new(rho0)?,
        observables: vec![
            Observable::new("singlet_yield", ComplexMatrix::outer(&shelf_s, &shelf_s)),
            Observable::new("triplet_yield", ComplexMatrix::outer(&shelf_t, &shelf_t)),
            Observable::new("singlet_fraction", electron_singlet),
        ],
        default_horizon: 20.0,
        default_dt: 0.05,
        purification: None,
    })
}

/// System qubit exchanging an excitation with a two-level bath mode:
/// `H = (ω_s/2) Z⊗I + I⊗(ω_b/2) Z + g (σ₊⊗σ₋ + σ₋⊗σ₊)`, from `|1⟩⊗|0⟩`.
///
/// With detuning `Δ = ω_s − ω_b` and `Ω = √(g² + Δ²/4)`, the system
/// excited population is `1 − (g/Ω)² sin²(Ω t)`.
pub fn exchange_purification_model(g: f64, omega_s: f64, omega_b: f64) -> Result<ModelSpec> {
    require_finite("g", g)?;
    require_finite("omega_s", omega_s)?;
    require_finite("omega_b", omega_b)?;
    let id = paulis::id2();
    let z = paulis::z();
    let (sp, sm) = (paulis::sigma_plus(), paulis::sigma_minus());
    let mut h = kron(&z, &id)?.scale_real(0.5 * omega_s);
    h = &h + &kron(&id, &z)?.scale_real(0.5 * omega_b);
    let hop = &kron(&sp, &sm)? + &kron(&sm, &sp)?;
    h = &h + &hop.scale_real(g);
    let psi = PurifiedState::product(&ComplexVector::basis(2, 1), &ComplexVector::basis(2, 0))?;
    let initial_state = DensityMatrix::pure(psi.state())?;
    Ok(ModelSpec {
        name: EXCHANGE_NAME.into(),
        lindbladian: Lindbladian::closed(h.clone())?,
        initial_state,
        observables: vec![Observable::new("excited_population", paulis::projector(1))],
        default_horizon: 10.0,
        default_dt: 0.05,
        purification: Some(PurificationSpec {
            system_dim: 2,
            bath_dim: 2,
            total_hamiltonian: h,
            initial: psi,
        }),
    })
}

/// Two-level donor/acceptor stand-in for a spin-boson system: donor `|1⟩`,
/// acceptor `|0⟩`, `H = (ε/2) Z + (Δ/2) X`, relaxation `(σ₋, γ_r)` plus
/// dephasing `(Z, γ_φ)`. Starts on the donor. Observable:
/// `P_donor − P_acceptor = −⟨Z⟩`.
pub fn spin_boson_model(bias: f64, tunneling: f64, gamma_relax: f64, gamma_phi: f64) -> Result<ModelSpec> {
    require_finite("bias", bias)?;
    require_finite("tunneling", tunneling)?;
    require_rate("gamma_relax", gamma_relax)?;
    require_rate("gamma_phi", gamma_phi)?;
    let h = &paulis::z().scale_real(0.5 * bias) + &paulis::x().scale_real(0.5 * tunneling);
    let lind = Lindbladian::new(h, vec![(paulis::sigma_minus(), gamma_relax), (paulis::z(), gamma_phi)])?;
    Ok(ModelSpec {
        name: SPIN_BOSON_NAME.into(),
        lindbladian: lind,
        initial_state: DensityMatrix::basis(2, 1),
        observables: vec![
            Observable::new("population_difference", paulis::z().scale_real(-1.0)),
            Observable::new("donor_population", paulis::projector(1)),
        ],
        default_horizon: 20.0,
        default_dt: 0.05,
        purification: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{propagate_exact, propagate_exact_grid};
    use crate::numerics::eigh;

    fn grid(t: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| t * k as f64 / n as f64).collect()
    }

    fn value(m: &ModelSpec, name: &str, t: f64) -> f64 {
        let rho = propagate_exact(&m.lindbladian, &m.initial_state, t).unwrap();
        m.system_state(&rho).unwrap().expectation(&m.observable(name).unwrap().matrix)
    }

    #[test]
    fn amplitude_damping_law() {
        let m = amplitude_damping_model(1.0, 0.0).unwrap();
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert!((value(&m, "excited_population", t) - (-t).exp()).abs() < 1e-9);
        }
        let frozen = amplitude_damping_model(0.0, 0.0).unwrap();
        assert!((value(&frozen, "excited_population", 3.0) - 1.0).abs() < 1e-12);
        assert!(value(&m, "excited_population", 40.0) < 1e-12);
        assert!(amplitude_damping_model(-0.1, 0.0).is_err());
    }

    #[test]
    fn dephasing_law() {
        let m = dephasing_model(0.3).unwrap();
        for t in [0.0, 0.5, 2.0] {
            assert!((value(&m, "x_expectation", t) - (-0.6 * t).exp()).abs() < 1e-9);
            assert!((value(&m, "excited_population", t) - 0.5).abs() < 1e-12);
        }
        let still = dephasing_model(0.0).unwrap();
        assert!((value(&still, "x_expectation", 4.0) - 1.0).abs() < 1e-12);
        assert!(dephasing_model(f64::NAN).is_err());
    }

    #[test]
    fn tfim_independent_qubits() {
        let h = 0.7;
        let m = dissipative_tfim_model(3, 0.0, h, 0.0).unwrap();
        for t in [0.0, 0.4, 1.3] {
            assert!((value(&m, "magnetization", t) - (2.0 * h * t).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn tfim_relaxes_down() {
        let m = dissipative_tfim_model(2, 0.0, 0.0, 1.0).unwrap();
        // Each spin flips down at rate γ: ⟨Z⟩ = 2e^{−t} − 1.
        for t in [0.5, 2.0] {
            assert!((value(&m, "magnetization", t) - (2.0 * (-t).exp() - 1.0)).abs() < 1e-9);
        }
        assert!(dissipative_tfim_model(1, 1.0, 1.0, 1.0).is_err());
        assert!(dissipative_tfim_model(5, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn exciton_decoupled_limit() {
        let mut p = ExcitonParams::chain(3);
        p.couplings = vec![vec![0.0; 3]; 3];
        p.dephasing_rates = vec![0.0; 3];
        p.initial_site = 2;
        let m = exciton_transfer_model(&p).unwrap();
        assert!((value(&m, "sink_population", 1.5) - (1.0 - (-1.5f64).exp())).abs() < 1e-9);
        p.initial_site = 0;
        let m = exciton_transfer_model(&p).unwrap();
        assert!((value(&m, "site_0_population", 5.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exciton_dimer_reaches_the_sink() {
        let mut p = ExcitonParams::chain(2);
        p.site_energies = vec![0.0, 0.0];
        let m = exciton_transfer_model(&p).unwrap();
        assert!(value(&m, "sink_population", 60.0) > 1.0 - 1e-9);
    }

    #[test]
    fn exciton_defaults_hit_the_yield_target() {
        for n in [3, 5, 7] {
            let m = exciton_transfer_model(&ExcitonParams::chain(n)).unwrap();
            let times = grid(m.default_horizon, 200);
            let states = propagate_exact_grid(&m.lindbladian, &m.initial_state, &times).unwrap();
            let sink = &m.observable("sink_population").unwrap().matrix;
            let mut prev = 0.0;
            for rho in &states {
                let total: f64 = m.measure(rho).unwrap().iter().sum();
                assert!((total - 1.0).abs() < 1e-10);
                let s = rho.expectation(sink);
                assert!(s >= prev - 1e-12);
                prev = s;
            }
            assert!(prev >= 0.99, "n = {n}: sink {prev}");
        }
    }

    #[test]
    fn exciton_rejects_bad_input() {
        let mut p = ExcitonParams::chain(3);
        p.sink_site = 3;
        assert!(exciton_transfer_model(&p).is_err());
        let mut p = ExcitonParams::chain(3);
        p.dephasing_rates[1] = -1.0;
        assert!(exciton_transfer_model(&p).is_err());
        let mut p = ExcitonParams::chain(3);
        p.couplings[0][1] = 2.0;
        assert!(exciton_transfer_model(&p).is_err());
    }

    #[test]
    fn radical_pair_yield_bounds() {
        let m = radical_pair_model(0.5, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(m.dim(), 10);
        let times = grid(m.default_horizon, 40);
        let states = propagate_exact_grid(&m.lindbladian, &m.initial_state, &times).unwrap();
        for rho in &states {
            let y = rho.expectation(&m.observable("singlet_yield").unwrap().matrix);
            assert!((-1e-12..=1.0 + 1e-12).contains(&y));
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-10);
            assert!(eigh(rho.matrix(), 1e-9).unwrap().values[0] > -1e-9);
        }
        let last = states.last().unwrap();
        let ys = last.expectation(&m.observable("singlet_yield").unwrap().matrix);
        let yt = last.expectation(&m.observable("triplet_yield").unwrap().matrix);
        assert!((ys + yt - 1.0).abs() < 1e-6);
        assert!(ys > 0.0 && yt > 0.0);
    }

    #[test]
    fn radical_pair_without_hyperfine_keeps_the_singlet() {
        // Total S^z commutes with the singlet projector, so the pair never
        // leaves the singlet manifold.
        let m = radical_pair_model(0.8, 0.0, 1.0, 1.0).unwrap();
        assert!((value(&m, "singlet_yield", 30.0) - 1.0).abs() < 1e-9);
        assert!(radical_pair_model(0.5, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn exchange_rabi_laws() {
        let g = 0.4;
        let m = exchange_purification_model(g, 1.0, 1.0).unwrap();
        for t in [0.0, 1.0, 2.7] {
            assert!((value(&m, "excited_population", t) - (g * t).cos().powi(2)).abs() < 1e-9);
        }
        let delta: f64 = 0.6;
        let m = exchange_purification_model(g, 1.0 + delta, 1.0).unwrap();
        let om = (g * g + delta * delta / 4.0).sqrt();
        for t in [0.5, 2.0, 5.0] {
            let want = 1.0 - (g / om).powi(2) * (om * t).sin().powi(2);
            assert!((value(&m, "excited_population", t) - want).abs() < 1e-9);
        }
        let off = exchange_purification_model(0.0, 1.0, 2.0).unwrap();
        assert!((value(&off, "excited_population", 3.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_boson_relaxes_to_the_acceptor_side() {
        let m = spin_boson_model(1.0, 0.5, 0.2, 0.1).unwrap();
        assert!((value(&m, "population_difference", 0.0) - 1.0).abs() < 1e-12);
        assert!(value(&m, "population_difference", m.default_horizon) < 0.0);
    }

    #[test]
    fn every_model_default_trajectory_is_physical() {
        let models = vec![
            amplitude_damping_model(1.0, 0.3).unwrap(),
            dephasing_model(0.5).unwrap(),
            dissipative_tfim_model(2, 1.0, 0.7, 0.3).unwrap(),
            exciton_transfer_model(&ExcitonParams::chain(3)).unwrap(),
            radical_pair_model(0.5, 1.0, 1.0, 0.5).unwrap(),
            exchange_purification_model(0.5, 1.0, 1.0).unwrap(),
            spin_boson_model(1.0, 0.5, 0.2, 0.1).unwrap(),
        ];
        for m in &models {
            let times = grid(m.default_horizon, 25);
            for rho in propagate_exact_grid(&m.lindbladian, &m.initial_state, &times).unwrap() {
                assert!((rho.matrix().trace().re - 1.0).abs() < 1e-10, "{}", m.name);
                assert!(eigh(rho.matrix(), 1e-9).unwrap().values[0] > -1e-9, "{}", m.name);
            }
        }
    }
}
