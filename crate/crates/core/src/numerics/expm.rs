// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential.
//!
//! General matrices use scaling and squaring with the Padé approximants of
//! degree 3, 5, 7, 9 or 13 selected from the 1-norm (Higham 2005). Hermitian
//! and anti-Hermitian inputs take an eigendecomposition path instead.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::decomp::{eigh, require_square};
use super::matrix::{c, ComplexMatrix};
use crate::error::Result;

const NORMAL_TOL: f64 = 1e-12;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(a)` for a square matrix.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if a.is_hermitian(NORMAL_TOL) {
        let eig = eigh(a, NORMAL_TOL)?;
        return Ok(eig.map(|x| c(x.exp(), 0.0)));
    }
    let ia = a.scale(c(0.0, 1.0));
    if ia.is_hermitian(NORMAL_TOL) {
        // a = -i·(ia), ia Hermitian
        let eig = eigh(&ia, NORMAL_TOL)?;
        return Ok(eig.map(|x| C64::from_polar(1.0, -x)));
    }
    Ok(ComplexMatrix::wrap(expm_pade(a.inner())))
}

/// Scaling-and-squaring Padé exponential, no structure shortcuts.
pub fn expm_general(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a)?;
    Ok(ComplexMatrix::wrap(expm_pade(a.inner())))
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn expm_pade(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let ident = DMatrix::<C64>::identity(n, n);
    let a_norm = norm1(a);

    if a_norm == 0.0 {
        return ident;
    }

    let a2 = a * a;
    if a_norm <= THETA_3 {
        return pade_low(a, &ident, &[&a2], &B3);
    }
    let a4 = &a2 * &a2;
    if a_norm <= THETA_5 {
        return pade_low(a, &ident, &[&a2, &a4], &B5);
    }
    let a6 = &a4 * &a2;
    if a_norm <= THETA_7 {
        return pade_low(a, &ident, &[&a2, &a4, &a6], &B7);
    }
    if a_norm <= THETA_9 {
        let a8 = &a6 * &a2;
        return pade_low(a, &ident, &[&a2, &a4, &a6, &a8], &B9);
    }

    let s = (a_norm / THETA_13).log2().ceil().max(0.0) as i32;
    let scale = c(2f64.powi(-s), 0.0);
    let a1 = a * scale;
    let a2 = &a2 * (scale * scale);
    let a4 = &a4 * (scale * scale * scale * scale);
    let a6 = &a6 * (scale * scale * scale * scale * scale * scale);
    let b = |k: usize| c(B13[k], 0.0);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_tail = &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1);
    let u = &a1 * (&a6 * &u_inner + u_tail);
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * &v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let mut r = solve_pade(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Low-degree approximant `[m/m]` from even powers `a^2, a^4, …`.
fn pade_low(a: &DMatrix<C64>, ident: &DMatrix<C64>, evens: &[&DMatrix<C64>], b: &[f64]) -> DMatrix<C64> {
    let mut u = ident * c(b[1], 0.0);
    let mut v = ident * c(b[0], 0.0);
    for (k, p) in evens.iter().enumerate() {
        u += *p * c(b[2 * k + 3], 0.0);
        v += *p * c(b[2 * k + 2], 0.0);
    }
    let u = a * u;
    solve_pade(&u, &v)
}

/// `(V − U)⁻¹ (V + U)`.
fn solve_pade(u: &DMatrix<C64>, v: &DMatrix<C64>) -> DMatrix<C64> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the approximant's norm bound")
}
