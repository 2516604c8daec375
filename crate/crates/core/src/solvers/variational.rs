// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Variational evolution of a parameterized circuit state `ψ(θ)` under
//! `η dψ/dt = χ(t) ψ`.
//!
//! With `Mᵢⱼ = ⟨∂ᵢψ|∂ⱼψ⟩` and `Vᵢ = ⟨∂ᵢψ|χ|ψ⟩ / η`, the schemes solve
//!
//! * TDVP: `Im(M) θ̇ = Im(V)`
//! * Dirac–Frenkel: `M θ̇ = V`, as a stacked real least-squares problem
//! * McLachlan: `Re(M) θ̇ = Re(V)`
//!
//! each with a Tikhonov term `λ`. The ansatz state stays normalized, so a
//! non-Hermitian `χ` only enters through its projection; the discarded
//! norm is integrated separately from `d ln‖ψ‖/dt = Re⟨ψ|χ|ψ⟩/η`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::pauli::PauliString;
use super::qite::steps_for;
use crate::circuit::apply_matrix_unchecked;
use crate::error::{Error, Result};
use crate::numerics::{
    c, eigh, least_squares_regularized, paulis, solve_regularized_spd, unitarity_defect, ComplexMatrix,
    ComplexVector, DEFAULT_TOL,
};

pub const DEFAULT_LAMBDA: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum Gate {
    /// `exp(−iθₖ P / 2)` with `θₖ = parameters[param]`.
    Rotation { pauli: PauliString, param: usize },
    Fixed { matrix: ComplexMatrix, targets: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    n_qubits: usize,
    layers: usize,
    gates: Vec<Gate>,
    /// Initial parameters.
    pub parameters: Vec<f64>,
}

fn cnot() -> ComplexMatrix {
    // Control on targets[0], target on targets[1].
    ComplexMatrix::from_real(
        4,
        4,
        &[1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 1., 0., 0.],
    )
    .expect("static matrix")
}

impl Ansatz {
    pub fn new(n_qubits: usize, layers: usize, gates: Vec<Gate>, parameters: Vec<f64>) -> Result<Self> {
        for g in &gates {
            match g {
                Gate::Rotation { pauli, param } => {
                    if pauli.n_qubits != n_qubits {
                        return Err(Error::Dimension(format!(
                            "rotation generator {pauli} on a {n_qubits}-qubit ansatz"
                        )));
                    }
                    if *param >= parameters.len() {
                        return Err(Error::InvalidArgument(format!(
                            "rotation uses parameter {param} of {}",
                            parameters.len()
                        )));
                    }
                }
                Gate::Fixed { matrix, targets } => {
                    if matrix.rows() != 1 << targets.len() || targets.iter().any(|&t| t >= n_qubits) {
                        return Err(Error::Dimension("fixed gate does not fit the register".into()));
                    }
                    let defect = unitarity_defect(matrix);
                    if defect > DEFAULT_TOL {
                        return Err(Error::NotUnitary {
                            defect,
                            tol: DEFAULT_TOL,
                        });
                    }
                }
            }
        }
        if parameters.is_empty() {
            return Err(Error::InvalidArgument("ansatz has no parameters".into()));
        }
        Ok(Self {
            n_qubits,
            layers,
            gates,
            parameters,
        })
    }

    /// `exp(−iθP/2)|0…0⟩`.
    pub fn single_rotation(pauli: PauliString, theta0: f64) -> Result<Self> {
        Self::new(pauli.n_qubits, 1, vec![Gate::Rotation { pauli, param: 0 }], vec![theta0])
    }

    /// `layers` repetitions of per-qubit `Ry`, per-qubit `Rz`, then a CNOT
    /// ladder `(0→1), (1→2), …`. All parameters start at zero.
    pub fn hardware_efficient(n_qubits: usize, layers: usize) -> Result<Self> {
        let mut gates = Vec::new();
        let mut k = 0;
        for _ in 0..layers {
            for kind in ['Y', 'Z'] {
                for q in 0..n_qubits {
                    gates.push(Gate::Rotation {
                        pauli: PauliString::single(n_qubits, q, kind)?,
                        param: k,
                    });
                    k += 1;
                }
            }
            for q in 0..n_qubits.saturating_sub(1) {
                gates.push(Gate::Fixed {
                    matrix: cnot(),
                    targets: vec![q, q + 1],
                });
            }
        }
        Self::new(n_qubits, layers, gates, vec![0.0; k])
    }

    /// Prepends a fixed unitary on the whole register so that the circuit
    /// at the current parameters produces `|initial⟩`. The target is pulled
    /// back through the existing gates first, so e.g. the CNOT ladder of a
    /// zero-parameter hardware-efficient ansatz does not disturb it.
    pub fn with_initial_state(mut self, initial: &ComplexVector) -> Result<Self> {
        let dim = 1usize << self.n_qubits;
        if initial.dim() != dim {
            return Err(Error::Dimension(format!(
                "{}-dimensional initial state for {} qubits",
                initial.dim(),
                self.n_qubits
            )));
        }
        let mut w = initial.normalized();
        for g in self.gates.iter().rev() {
            w = match g {
                Gate::Rotation { pauli, param } => pauli.rotate(-self.parameters[*param], &w),
                Gate::Fixed { matrix, targets } => {
                    apply_matrix_unchecked(&w, self.n_qubits, &matrix.adjoint(), targets)
                }
            };
        }
        let col = ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from_column_slice(dim, 1, w.as_slice()))?;
        let prep = crate::numerics::complete_unitary(&col);
        self.gates.insert(
            0,
            Gate::Fixed {
                matrix: prep,
                targets: (0..self.n_qubits).collect(),
            },
        );
        Ok(self)
    }

    /// Prepends `X` on every qubit whose bit is set in `bits`.
    pub fn with_basis_state(mut self, bits: usize) -> Self {
        for q in (0..self.n_qubits).rev() {
            if bits >> q & 1 == 1 {
                self.gates.insert(
                    0,
                    Gate::Fixed {
                        matrix: paulis::x(),
                        targets: vec![q],
                    },
                );
            }
        }
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn n_params(&self) -> usize {
        self.parameters.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn apply_gate(&self, g: &Gate, theta: &[f64], v: &ComplexVector) -> ComplexVector {
        match g {
            Gate::Rotation { pauli, param } => pauli.rotate(theta[*param], v),
            Gate::Fixed { matrix, targets } => apply_matrix_unchecked(v, self.n_qubits, matrix, targets),
        }
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::Dimension(format!(
                "{} parameters for an ansatz with {}",
                theta.len(),
                self.n_params()
            )));
        }
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn state(&self, theta: &[f64]) -> Result<ComplexVector> {
        self.check_theta(theta)?;
        let mut v = ComplexVector::basis(1 << self.n_qubits, 0);
        for g in &self.gates {
            v = self.apply_gate(g, theta, &v);
        }
        Ok(v)
    }

    /// `(ψ(θ), [∂ₖψ(θ)])`, exact: each rotation contributes
    /// `U_after (−iP/2) U_upto |0⟩` to the derivative of its parameter.
    pub fn state_and_derivatives(&self, theta: &[f64]) -> Result<(ComplexVector, Vec<ComplexVector>)> {
        self.check_theta(theta)?;
        let dim = 1usize << self.n_qubits;
        let mut prefix = Vec::with_capacity(self.gates.len() + 1);
        prefix.push(ComplexVector::basis(dim, 0));
        for g in &self.gates {
            let next = self.apply_gate(g, theta, prefix.last().expect("non-empty"));
            prefix.push(next);
        }
        let contributions: Vec<(usize, ComplexVector)> = self
            .gates
            .par_iter()
            .enumerate()
            .filter_map(|(gi, g)| match g {
                Gate::Rotation { pauli, param } => {
                    let mut v = pauli.apply(&prefix[gi + 1]).scale(c(0.0, -0.5));
                    for later in &self.gates[gi + 1..] {
                        v = self.apply_gate(later, theta, &v);
                    }
                    Some((*param, v))
                }
                Gate::Fixed { .. } => None,
            })
            .collect();
        let mut derivs = vec![ComplexVector::zeros(dim); self.n_params()];
        for (k, v) in contributions {
            derivs[k] = &derivs[k] + &v;
        }
        Ok((prefix.pop().expect("non-empty"), derivs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EomVariant {
    Tdvp,
    DiracFrenkel,
    McLachlan,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EomScheme {
    pub variant: EomVariant,
    pub regularization: f64,
    /// Projects the global-phase direction out of `M` and `V`
    /// (`M → M − ⟨∂ψ|ψ⟩⟨ψ|∂ψ⟩`, `V → V − ⟨∂ψ|ψ⟩⟨ψ|χ|ψ⟩/η`). On by default:
    /// without it, `Rz` gates acting on `|0⟩` spend their motion on the
    /// unobservable phase.
    pub phase_correction: bool,
}

impl EomScheme {
    pub fn new(variant: EomVariant, regularization: f64) -> Result<Self> {
        if !(regularization >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "regularization {regularization} must be ≥ 0"
            )));
        }
        Ok(Self {
            variant,
            regularization,
            phase_correction: true,
        })
    }

    pub fn with_phase_correction(mut self, on: bool) -> Self {
        self.phase_correction = on;
        self
    }
}

#[derive(Clone, Debug)]
pub struct VariationalTrajectory {
    pub times: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
    /// `ln‖ψ‖`, integrated from `Re⟨ψ|χ|ψ⟩/η`.
    pub log_norms: Vec<f64>,
    /// Largest Hermiticity defect of `M` over every evaluation.
    pub max_m_hermiticity_defect: f64,
    /// Smallest eigenvalue of `M` over every evaluation.
    pub min_m_eigenvalue: f64,
}

struct Rates {
    theta_dot: DVector<f64>,
    log_norm_rate: f64,
    m_defect: f64,
    m_min: f64,
}

/// `(M, V)` at `θ` for generator `χ` and scale `η`, with `V` already divided
/// by `η`. Also returns `⟨ψ|χ|ψ⟩/η`.
pub fn eom_matrices(
    ansatz: &Ansatz,
    theta: &[f64],
    chi: &ComplexMatrix,
    eta: C64,
) -> Result<(ComplexMatrix, ComplexVector, C64)> {
    let (psi, d) = ansatz.state_and_derivatives(theta)?;
    let chipsi = chi.apply(&psi).scale(c(1.0, 0.0) / eta);
    let n = d.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| d[i].dot(&d[j]));
    let v: Vec<C64> = d.iter().map(|di| di.dot(&chipsi)).collect();
    Ok((ComplexMatrix::wrap(m), ComplexVector::wrap(v.into()), psi.dot(&chipsi)))
}

fn rates(
    ansatz: &Ansatz,
    theta: &[f64],
    chi: &ComplexMatrix,
    eta: C64,
    scheme: &EomScheme,
) -> Result<Rates> {
    let (psi, d) = ansatz.state_and_derivatives(theta)?;
    let chipsi = chi.apply(&psi).scale(c(1.0, 0.0) / eta);
    let n = d.len();
    let mut m = nalgebra::DMatrix::from_fn(n, n, |i, j| d[i].dot(&d[j]));
    let mut v = DVector::from_fn(n, |i, _| d[i].dot(&chipsi));
    let expect = psi.dot(&chipsi);
    if scheme.phase_correction {
        let overlap = DVector::from_fn(n, |i, _| d[i].dot(&psi));
        m -= &overlap * overlap.adjoint();
        v -= &overlap * expect;
    }
    let mm = ComplexMatrix::wrap(m.clone());
    let m_defect = mm.hermiticity_defect();
    let m_min = eigh(&mm.hermitian_part(), f64::INFINITY)?.values[0];
    let lambda = scheme.regularization;
    let theta_dot = match scheme.variant {
        EomVariant::McLachlan => solve_regularized_spd(&m.map(|z| z.re), &v.map(|z| z.re), lambda)?,
        EomVariant::Tdvp => least_squares_regularized(&m.map(|z| z.im), &v.map(|z| z.im), lambda)?,
        EomVariant::DiracFrenkel => {
            let mut a = DMatrix::zeros(2 * n, n);
            let mut b = DVector::zeros(2 * n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = m[(i, j)].re;
                    a[(n + i, j)] = m[(i, j)].im;
                }
                b[i] = v[i].re;
                b[n + i] = v[i].im;
            }
            least_squares_regularized(&a, &b, lambda)?
        }
    };
    Ok(Rates {
        theta_dot,
        log_norm_rate: expect.re,
        m_defect,
        m_min,
    })
}

/// Integrates `θ` with classical RK4, re-evaluating the equations of motion
/// at every stage. `chi(t)` supplies the generator.
pub fn variational_evolve(
    ansatz: &Ansatz,
    chi: &(dyn Fn(f64) -> ComplexMatrix + Sync),
    eta: C64,
    scheme: &EomScheme,
    t: f64,
    dt: f64,
) -> Result<VariationalTrajectory> {
    if eta.norm() == 0.0 {
        return Err(Error::InvalidArgument("eta must be nonzero".into()));
    }
    let n_steps = steps_for(t, dt)?;
    let dim = 1usize << ansatz.n_qubits;
    let mut theta = DVector::from_column_slice(&ansatz.parameters);
    let mut log_norm = 0.0;
    let mut out = VariationalTrajectory {
        times: vec![0.0],
        thetas: vec![theta.as_slice().to_vec()],
        log_norms: vec![0.0],
        max_m_hermiticity_defect: 0.0,
        min_m_eigenvalue: f64::INFINITY,
    };
    let eval = |th: &DVector<f64>, time: f64, out: &mut VariationalTrajectory| -> Result<(DVector<f64>, f64)> {
        let g = chi(time);
        if g.rows() != dim || g.cols() != dim {
            return Err(Error::Dimension(format!(
                "{}x{} generator on a {dim}-dimensional ansatz",
                g.rows(),
                g.cols()
            )));
        }
        let r = rates(ansatz, th.as_slice(), &g, eta, scheme)?;
        out.max_m_hermiticity_defect = out.max_m_hermiticity_defect.max(r.m_defect);
        out.min_m_eigenvalue = out.min_m_eigenvalue.min(r.m_min);
        Ok((r.theta_dot, r.log_norm_rate))
    };
    for k in 0..n_steps {
        let t0 = k as f64 * dt;
        let (k1, g1) = eval(&theta, t0, &mut out)?;
        let (k2, g2) = eval(&(&theta + &k1 * (0.5 * dt)), t0 + 0.5 * dt, &mut out)?;
        let (k3, g3) = eval(&(&theta + &k2 * (0.5 * dt)), t0 + 0.5 * dt, &mut out)?;
        let (k4, g4) = eval(&(&theta + &k3 * dt), t0 + dt, &mut out)?;
        theta += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        log_norm += (g1 + 2.0 * g2 + 2.0 * g3 + g4) * (dt / 6.0);
        out.times.push((k + 1) as f64 * dt);
        out.thetas.push(theta.as_slice().to_vec());
        out.log_norms.push(log_norm);
    }
    Ok(out)
}

/// Largest relative deviation between the analytic derivative states and
/// central differences with step `h`.
pub fn finite_difference_check(ansatz: &Ansatz, theta: &[f64], h: f64) -> Result<f64> {
    let (_, exact) = ansatz.state_and_derivatives(theta)?;
    let mut worst: f64 = 0.0;
    for (k, dk) in exact.iter().enumerate() {
        let mut plus = theta.to_vec();
        let mut minus = theta.to_vec();
        plus[k] += h;
        minus[k] -= h;
        let fd = (&ansatz.state(&plus)? - &ansatz.state(&minus)?).scale(c(0.5 / h, 0.0));
        let scale = dk.norm().max(1e-300);
        worst = worst.max((&fd - dk).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expm;
    use crate::testing::random_hermitian;

    fn mclachlan() -> EomScheme {
        EomScheme::new(EomVariant::McLachlan, DEFAULT_LAMBDA).unwrap()
    }

    #[test]
    fn single_qubit_closed_form() {
        let a = Ansatz::single_rotation(PauliString::parse("X").unwrap(), 0.0).unwrap();
        let (m, v, _) = eom_matrices(&a, &[0.3], &paulis::x().scale(c(0.0, -1.0)), c(1.0, 0.0)).unwrap();
        assert!((m.get(0, 0) - c(0.25, 0.0)).norm() < 1e-15);
        assert!((v.as_slice()[0].re - 0.5).abs() < 1e-15);
        let chi = |_t: f64| paulis::x().scale(c(0.0, -1.0));
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &mclachlan(), 1.0, 1e-3).unwrap();
        let theta = traj.thetas.last().unwrap()[0];
        assert!((theta - 2.0).abs() < 1e-6, "θ(1) = {theta}");
        assert!(traj.max_m_hermiticity_defect < 1e-10);
        assert!(traj.min_m_eigenvalue > -1e-10);
    }

    #[test]
    fn zero_generator_keeps_parameters() {
        let a = Ansatz::hardware_efficient(2, 2).unwrap();
        let chi = |_t: f64| ComplexMatrix::zeros(4, 4);
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &mclachlan(), 0.2, 0.01).unwrap();
        assert!(traj.thetas.last().unwrap().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn derivative_states_match_finite_differences() {
        let a = Ansatz::hardware_efficient(3, 2).unwrap();
        let theta: Vec<f64> = (0..a.n_params()).map(|k| 0.3 + 0.17 * k as f64).collect();
        let err = finite_difference_check(&a, &theta, 1e-5).unwrap();
        assert!(err < 1e-7, "relative error {err}");
    }

    #[test]
    fn shared_parameters_sum_their_contributions() {
        let x = PauliString::parse("X").unwrap();
        let gates = vec![Gate::Rotation { pauli: x, param: 0 }, Gate::Rotation { pauli: x, param: 0 }];
        let a = Ansatz::new(1, 1, gates, vec![0.4]).unwrap();
        // Two rotations by θ equal one rotation by 2θ.
        let single = Ansatz::single_rotation(x, 0.8).unwrap();
        assert!(a.state(&[0.4]).unwrap().max_abs_diff(&single.state(&[0.8]).unwrap()) < 1e-15);
        assert!(finite_difference_check(&a, &[0.4], 1e-5).unwrap() < 1e-7);
    }

    #[test]
    fn two_qubit_fidelity() {
        let h = random_hermitian(21, 4);
        let a = Ansatz::hardware_efficient(2, 3).unwrap();
        let psi0 = a.state(&a.parameters).unwrap();
        let hc = h.clone();
        let chi = move |_t: f64| hc.scale(c(0.0, -1.0));
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &mclachlan(), 0.5, 0.005).unwrap();
        let final_state = a.state(traj.thetas.last().unwrap()).unwrap();
        let exact = expm(&h.scale(c(0.0, -0.5))).unwrap().apply(&psi0);
        let f = exact.fidelity(&final_state);
        assert!(f >= 0.999, "fidelity {f}");
        assert!(traj.min_m_eigenvalue > -1e-10);
    }

    #[test]
    fn uncorrected_scheme_away_from_singular_start() {
        let h = random_hermitian(21, 4);
        let mut a = Ansatz::hardware_efficient(2, 3).unwrap();
        for (k, p) in a.parameters.iter_mut().enumerate() {
            *p = 0.1 + 0.037 * k as f64;
        }
        let psi0 = a.state(&a.parameters).unwrap();
        let chi = move |_t: f64| h.scale(c(0.0, -1.0));
        let s = mclachlan().with_phase_correction(false);
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &s, 0.5, 0.005).unwrap();
        let exact = expm(&random_hermitian(21, 4).scale(c(0.0, -0.5))).unwrap().apply(&psi0);
        assert!(exact.fidelity(&a.state(traj.thetas.last().unwrap()).unwrap()) >= 0.999);
    }

    #[test]
    fn initial_state_preparation() {
        let v = crate::testing::random_state_vector(4, 4);
        let zz = PauliString::parse("ZZ").unwrap();
        let a = Ansatz::single_rotation(zz, 0.0).unwrap().with_initial_state(&v).unwrap();
        let s = a.state(&a.parameters).unwrap();
        assert!(s.max_abs_diff(&v) < 1e-12);
        let mut h = Ansatz::hardware_efficient(2, 2).unwrap();
        h.parameters[3] = 0.4;
        let h = h.with_initial_state(&v).unwrap();
        assert!(h.state(&h.parameters).unwrap().max_abs_diff(&v) < 1e-12);
        let b = Ansatz::hardware_efficient(2, 1).unwrap().with_basis_state(0b10);
        assert!(b.state(&b.parameters).unwrap().max_abs_diff(&ComplexVector::basis(4, 2)) < 1e-15);
    }

    #[test]
    fn norm_tracking_for_decay() {
        // χ = −I/2 shrinks the norm as e^{−t/2}; the normalized state is fixed.
        let a = Ansatz::single_rotation(PauliString::parse("Y").unwrap(), 0.0).unwrap();
        let chi = |_t: f64| ComplexMatrix::identity(2).scale_real(-0.5);
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &mclachlan(), 1.0, 0.01).unwrap();
        assert!((traj.log_norms.last().unwrap() + 0.5).abs() < 1e-12);
        assert!(traj.thetas.last().unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn schemes_agree_on_closed_form() {
        let a = Ansatz::single_rotation(PauliString::parse("X").unwrap(), 0.0).unwrap();
        let chi = |_t: f64| paulis::x().scale(c(0.0, -1.0));
        let df = EomScheme::new(EomVariant::DiracFrenkel, DEFAULT_LAMBDA).unwrap();
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &df, 0.5, 1e-3).unwrap();
        assert!((traj.thetas.last().unwrap()[0] - 1.0).abs() < 1e-6);
        // Im(M) vanishes for a single real parameter: TDVP cannot move θ.
        let tdvp = EomScheme::new(EomVariant::Tdvp, DEFAULT_LAMBDA).unwrap();
        let traj = variational_evolve(&a, &chi, c(1.0, 0.0), &tdvp, 0.5, 1e-3).unwrap();
        assert!(traj.thetas.last().unwrap()[0].abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(EomScheme::new(EomVariant::McLachlan, -1.0).is_err());
        let a = Ansatz::hardware_efficient(1, 1).unwrap();
        let chi = |_t: f64| ComplexMatrix::zeros(4, 4);
        assert!(variational_evolve(&a, &chi, c(1.0, 0.0), &mclachlan(), 0.1, 0.01).is_err());
        assert!(a.state(&[0.0]).is_err());
    }
}
