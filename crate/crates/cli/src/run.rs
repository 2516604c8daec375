// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dispatch of one experiment: model × method → time series.

use num_complex::Complex64;
use oqs_core::channels::DensityMatrix;
use oqs_core::circuit::{sample_observable_mixed, DilatedChannel, DilationMethod};
use oqs_core::lindblad::{kraus_step, propagate_exact_grid, rk4_trajectory, superoperator};
use oqs_core::numerics::{next_pow2, vectorize, ComplexVector};
use oqs_core::rng::stream_seed;
use oqs_core::solvers::qite::{pad_lindbladian, register_qubits, state_from_vectorized};
use oqs_core::solvers::{
    mc_observables, purified_trajectory, qite_basis, qite_evolve, variational_evolve, Ansatz, EomScheme,
    MixedUnitaryChannel,
};
use thiserror::Error;

use crate::config::{ExperimentConfig, Method};
use crate::series::{Record, SeriesError, TimeSeries};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{method} failed: {source}")]
    Solver {
        method: Method,
        #[source]
        source: oqs_core::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] SeriesError),
}

/// Per grid point, per selected observable: value and optional stderr.
type Table = Vec<Vec<(f64, Option<f64>)>>;

/// Runs the experiment and, when `output_path` is set, writes the CSV.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TimeSeries, RunError> {
    let series = simulate(cfg)?;
    if let Some(path) = &cfg.output_path {
        series.write_atomic(path)?;
    }
    Ok(series)
}

/// Runs the experiment without touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<TimeSeries, RunError> {
    let wrap = |source| RunError::Solver {
        method: cfg.method,
        source,
    };
    let table = table(cfg).map_err(wrap)?;
    let times = cfg.times();
    let mut records = Vec::with_capacity(times.len() * cfg.observables.len());
    for (t, row) in times.iter().zip(&table) {
        for (name, &(value, stderr)) in cfg.observables.iter().zip(row) {
            records.push(Record {
                time: *t,
                observable: name.clone(),
                value,
                stderr,
                method: cfg.method.as_str().to_string(),
            });
        }
    }
    Ok(TimeSeries { records })
}

fn table(cfg: &ExperimentConfig) -> oqs_core::Result<Table> {
    if cfg.method == Method::MonteCarlo && cfg.shots > 0 {
        return monte_carlo_table(cfg);
    }
    let states = system_trajectory(cfg)?;
    let idx = cfg.observable_indices();
    let n_obs = idx.len();
    states
        .iter()
        .enumerate()
        .map(|(k, rho)| {
            idx.iter()
                .enumerate()
                .map(|(j, &i)| {
                    let obs = &cfg.spec.observables[i].matrix;
                    if cfg.shots == 0 {
                        Ok((rho.expectation(obs), None))
                    } else {
                        let seed = stream_seed(cfg.seed, "measurement", (k * n_obs + j) as u64);
                        let r = sample_observable_mixed(rho, obs, cfg.shots, seed)?;
                        Ok((r.estimate, Some(r.stderr)))
                    }
                })
                .collect()
        })
        .collect()
}

fn monte_carlo_table(cfg: &ExperimentConfig) -> oqs_core::Result<Table> {
    let spec = &cfg.spec;
    let lifted = spec.full_space_observables()?;
    let obs: Vec<_> = cfg.observable_indices().into_iter().map(|i| lifted[i].clone()).collect();
    let first: Vec<(f64, Option<f64>)> = obs
        .iter()
        .map(|o| (spec.initial_state.expectation(o), Some(0.0)))
        .collect();
    let mut out = vec![first];
    let n = cfg.n_steps();
    if n > 0 {
        let ch = MixedUnitaryChannel::from_lindbladian(&spec.lindbladian, cfg.dt)?;
        let series = mc_observables(&ch, &spec.initial_state, &obs, n, cfg.shots, cfg.seed)?;
        for (m, s) in series.means.iter().zip(&series.stderrs) {
            out.push(m.iter().zip(s).map(|(&v, &e)| (v, Some(e))).collect());
        }
    }
    Ok(out)
}

/// System states on the output grid.
fn system_trajectory(cfg: &ExperimentConfig) -> oqs_core::Result<Vec<DensityMatrix>> {
    let spec = &cfg.spec;
    let times = cfg.times();
    let n = cfg.n_steps();
    let lind = &spec.lindbladian;
    let rho0 = &spec.initial_state;
    let full: Vec<DensityMatrix> = match cfg.method {
        Method::Purification => {
            let p = spec.purification.as_ref().ok_or_else(|| {
                oqs_core::Error::InvalidArgument(format!("model '{}' has no purification data", spec.name))
            })?;
            return purified_trajectory(&p.initial, &p.total_hamiltonian, &times);
        }
        _ if n == 0 => vec![rho0.clone()],
        Method::OracleExact => propagate_exact_grid(lind, rho0, &times)?,
        Method::OracleRk4 => rk4_trajectory(lind, rho0, cfg.t_final, cfg.dt, &times)?,
        Method::DilationSzNagy => dilated(cfg, DilationMethod::SzNagyPerKraus)?,
        Method::DilationStinespring => dilated(cfg, DilationMethod::Stinespring)?,
        Method::DilationSvd => dilated(cfg, DilationMethod::Svd)?,
        Method::Lcu => dilated(
            cfg,
            DilationMethod::Lcu {
                epsilon: cfg.options.lcu_epsilon,
            },
        )?,
        Method::MonteCarlo => {
            // shots = 0: the exact mixture over branches.
            let ch = MixedUnitaryChannel::from_lindbladian(lind, cfg.dt)?;
            let mut out = vec![rho0.clone()];
            let mut rho = rho0.matrix().clone();
            for _ in 0..n {
                rho = ch.apply_exact(&rho)?;
                out.push(DensityMatrix::symmetrized(&rho, 1e-9)?);
            }
            out
        }
        Method::Qite => {
            let basis = qite_basis(lind.dim(), cfg.options.qite_max_weight)?;
            qite_evolve(lind, rho0, cfg.t_final, cfg.dt, &basis, cfg.options.qite_lambda)?.states
        }
        Method::Variational => variational(cfg)?,
    };
    full.iter().map(|r| spec.system_state(r)).collect()
}

fn dilated(cfg: &ExperimentConfig, method: DilationMethod) -> oqs_core::Result<Vec<DensityMatrix>> {
    let step = kraus_step(&cfg.spec.lindbladian, cfg.dt)?.normalized()?;
    let circuit = DilatedChannel::compile(&step, method)?;
    let mut out = Vec::with_capacity(cfg.n_steps() + 1);
    out.push(cfg.spec.initial_state.clone());
    for _ in 0..cfg.n_steps() {
        let next = circuit.apply(out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Variational evolution of `vec(ρ)` under `dvec(ρ)/dt = 𝓛 vec(ρ)`.
fn variational(cfg: &ExperimentConfig) -> oqs_core::Result<Vec<DensityMatrix>> {
    let lind = &cfg.spec.lindbladian;
    let d = lind.dim();
    let (p, _) = next_pow2(d);
    let nq = register_qubits(d);
    let gen = superoperator(&pad_lindbladian(lind, p)?)?.matrix().clone();
    let v0 = vectorize(&cfg.spec.initial_state.matrix().pad_to(p, Complex64::new(0.0, 0.0)))?;
    let ansatz = Ansatz::hardware_efficient(nq, cfg.options.variational_layers)?.with_initial_state(&v0)?;
    let scheme = EomScheme::new(cfg.options.variational_scheme.into(), cfg.options.variational_regularization)?;
    let chi = move |_t: f64| gen.clone();
    let traj = variational_evolve(&ansatz, &chi, Complex64::new(1.0, 0.0), &scheme, cfg.t_final, cfg.dt)?;
    traj.thetas
        .iter()
        .map(|theta| {
            // The ansatz fixes ψ only up to a global phase; the phase of
            // Tr ρ = Σᵢ ψ[i·d + i] removes it.
            let psi: ComplexVector = ansatz.state(theta)?;
            let tr: Complex64 = (0..d).map(|i| psi.as_slice()[i * p + i]).sum();
            if tr.norm() < 1e-12 {
                return Err(oqs_core::Error::InvalidState("variational state has zero trace".into()));
            }
            Ok(state_from_vectorized(&psi.scale(tr.conj() / tr.norm()), d)?.0)
        })
        .collect()
}
