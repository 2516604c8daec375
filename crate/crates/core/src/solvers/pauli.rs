// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Pauli strings in symplectic (x, z) bitmask form.
//!
//! Bit `q` of each mask refers to qubit `q` (least significant first). A
//! qubit with `(x, z)` equal to `(1, 0)`, `(0, 1)`, `(1, 1)` carries `X`, `Z`,
//! `Y` respectively.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numerics::{c, ComplexMatrix, ComplexVector, ZERO};

/// Largest register the bitmask representation supports.
pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub n_qubits: usize,
    pub x: u32,
    pub z: u32,
}

const PHASES: [C64; 4] = [
    C64 { re: 1.0, im: 0.0 },
    C64 { re: 0.0, im: 1.0 },
    C64 { re: -1.0, im: 0.0 },
    C64 { re: 0.0, im: -1.0 },
];

impl PauliString {
    pub fn new(n_qubits: usize, x: u32, z: u32) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "{n_qubits} qubits exceed the {MAX_QUBITS}-qubit Pauli limit"
            )));
        }
        let mask = (1u32 << n_qubits) - 1;
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidArgument("Pauli mask exceeds register".into()));
        }
        Ok(Self { n_qubits, x, z })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    /// A single-qubit Pauli `'X' | 'Y' | 'Z' | 'I'` on qubit `q`.
    pub fn single(n_qubits: usize, q: usize, kind: char) -> Result<Self> {
        if q >= n_qubits {
            return Err(Error::InvalidArgument(format!("qubit {q} out of range")));
        }
        let b = 1u32 << q;
        let (x, z) = match kind {
            'I' => (0, 0),
            'X' => (b, 0),
            'Y' => (b, b),
            'Z' => (0, b),
            other => return Err(Error::InvalidArgument(format!("unknown Pauli '{other}'"))),
        };
        Self::new(n_qubits, x, z)
    }

    /// Parses labels such as `"XIZ"`, written most significant qubit first.
    pub fn parse(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let mut p = Self::identity(n);
        for (i, ch) in label.chars().enumerate() {
            let q = n - 1 - i;
            let s = Self::single(n, q, ch.to_ascii_uppercase())?;
            p.x |= s.x;
            p.z |= s.z;
        }
        Self::new(n, p.x, p.z)
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// `P|b⟩ = i^{|x∧z|} (−1)^{|b∧z|} |b ⊕ x⟩`.
    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        let dim = 1usize << self.n_qubits;
        debug_assert_eq!(v.dim(), dim);
        let base = (self.x & self.z).count_ones() as usize;
        let src = v.as_slice();
        let mut out = vec![ZERO; dim];
        for (b, &a) in src.iter().enumerate() {
            let sign = 2 * ((b as u32 & self.z).count_ones() as usize & 1);
            out[b ^ self.x as usize] = PHASES[(base + sign) % 4] * a;
        }
        ComplexVector::wrap(out.into())
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        let base = (self.x & self.z).count_ones() as usize;
        for b in 0..dim {
            let sign = 2 * ((b as u32 & self.z).count_ones() as usize & 1);
            m[(b ^ self.x as usize, b)] = PHASES[(base + sign) % 4];
        }
        ComplexMatrix::wrap(m)
    }

    /// `exp(−iθP/2) = cos(θ/2) I − i sin(θ/2) P` applied to `v`.
    pub fn rotate(&self, theta: f64, v: &ComplexVector) -> ComplexVector {
        let (s, co) = (0.5 * theta).sin_cos();
        let pv = self.apply(v);
        &v.scale(c(co, 0.0)) + &pv.scale(c(0.0, -s))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n_qubits).rev() {
            let ch = match (self.x >> q & 1, self.z >> q & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// All `4ⁿ` strings, optionally restricted to weight `≤ max_weight`.
pub fn pauli_basis(n_qubits: usize, max_weight: Option<u32>) -> Result<Vec<PauliString>> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("{n_qubits} qubits is too many")));
    }
    let dim = 1u32 << n_qubits;
    let mut out = Vec::new();
    for x in 0..dim {
        for z in 0..dim {
            let p = PauliString { n_qubits, x, z };
            if max_weight.is_none_or(|w| p.weight() <= w) {
                out.push(p);
            }
        }
    }
    Ok(out)
}
