// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random fixtures: matrices, states, unitaries, channels and
//! Lindbladians. Used by the test suites and the `validate` report.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{DensityMatrix, KrausChannel};
use crate::lindblad::Lindbladian;
use crate::numerics::{c, svd, ComplexMatrix, ComplexVector};
use crate::rng::stream;

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(seed: u64, n: usize) -> ComplexMatrix {
    random_rect(seed, n, n)
}

pub fn random_rect(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut rng = stream(seed, "fixture-matrix", (rows * 1000 + cols) as u64);
    let m = DMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    ComplexMatrix::wrap(m)
}

pub fn random_hermitian(seed: u64, n: usize) -> ComplexMatrix {
    random_matrix(seed, n).hermitian_part()
}

/// Haar-ish unitary from the SVD of a Gaussian matrix.
pub fn random_unitary(seed: u64, n: usize) -> ComplexMatrix {
    let s = svd(&random_matrix(seed ^ 0x5a5a, n)).expect("square");
    &s.u * &s.v_dagger
}

pub fn random_state_vector(seed: u64, n: usize) -> ComplexVector {
    let m = random_rect(seed ^ 0x77, n, 1);
    ComplexVector::wrap(m.column(0).into_owned()).normalized()
}

/// Full-rank random density matrix `G G† / tr(G G†)`.
pub fn random_density(seed: u64, n: usize) -> DensityMatrix {
    let g = random_matrix(seed ^ 0x1234, n);
    let h = &g * &g.adjoint();
    let t = h.trace().re;
    DensityMatrix::new(h.scale_real(1.0 / t)).expect("G G† is a valid state")
}

/// CPTP channel with `k` Kraus operators, built from a random isometry.
pub fn random_channel(seed: u64, d: usize, k: usize) -> KrausChannel {
    let g = random_rect(seed ^ 0xc0ffee, k * d, d);
    let s = nalgebra::SVD::new(g.inner().clone(), true, true);
    let iso = s.u.expect("u") * s.v_t.expect("v_t");
    let ops = (0..k)
        .map(|j| ComplexMatrix::wrap(iso.view((j * d, 0), (d, d)).into_owned()))
        .collect();
    KrausChannel::new(ops).expect("isometry blocks are trace preserving")
}

/// Lindbladian with a random Hamiltonian and `jumps` random jump operators.
pub fn random_lindbladian(seed: u64, d: usize, jumps: usize) -> Lindbladian {
    let mut rng = stream(seed, "fixture-rates", d as u64);
    let h = random_hermitian(seed ^ 0xabc, d).scale_real(0.5);
    let js = (0..jumps)
        .map(|j| {
            let l = random_matrix(seed ^ (0x100 + j as u64), d).scale_real(0.5);
            let rate: f64 = rng.random_range(0.1..1.0);
            (l, rate)
        })
        .collect();
    Lindbladian::new(h, js).expect("random fixture is valid")
}
