//! Generalized Pauli sums on mixed-dimension registers.
//!
//! A term is `c · ⊗_k X_d^{a_k} Z_d^{b_k}` with `X_d|j⟩ = |j+1 mod d⟩` and
//! `Z_d|j⟩ = ω^j |j⟩`, `ω = e^{2πi/d}`. Basis index digits are little-endian:
//! site 0 is the least significant digit.

use serde::{Deserialize, Serialize};

use crate::pauli::{HamiltonianTableau, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuditTerm {
    pub c: C64,
    /// `(a, b)` per site.
    pub exps: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuditHamiltonian {
    pub site_dims: Vec<usize>,
    pub terms: Vec<QuditTerm>,
}

impl QuditHamiltonian {
    pub fn dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    /// A constant (possibly zero-site) Hamiltonian.
    pub fn scalar(c: C64) -> Self {
        Self {
            site_dims: Vec::new(),
            terms: vec![QuditTerm { c, exps: Vec::new() }],
        }
    }

    /// Qubit tableau as a qudit sum with `d = 2` everywhere.
    pub fn from_qubits(h: &HamiltonianTableau) -> Self {
        let terms = h
            .terms
            .iter()
            .map(|t| QuditTerm {
                c: t.value(),
                exps: (0..h.n)
                    .map(|q| (t.p.x.get(q) as u32, t.p.z.get(q) as u32))
                    .collect(),
            })
            .collect();
        Self {
            site_dims: vec![2; h.n],
            terms,
        }
    }

    /// Sparse form: for each term, the basis permutation and phase table.
    pub fn compile(&self) -> CompiledQudit {
        let dim = self.dim();
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut digits = vec![0usize; self.site_dims.len()];
        for t in &self.terms {
            let mut target = Vec::with_capacity(dim);
            let mut phase = Vec::with_capacity(dim);
            digits.iter_mut().for_each(|d| *d = 0);
            for _ in 0..dim {
                let mut out = 0usize;
                let mut stride = 1usize;
                let mut angle = 0.0f64;
                for (k, &d) in self.site_dims.iter().enumerate() {
                    let (a, b) = t.exps[k];
                    let j = digits[k];
                    angle += (b as usize * j % d) as f64 / d as f64;
                    out += ((j + a as usize) % d) * stride;
                    stride *= d;
                }
                target.push(out);
                phase.push(t.c * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * angle));
                // increment mixed-radix counter
                for (k, &d) in self.site_dims.iter().enumerate() {
                    digits[k] += 1;
                    if digits[k] < d {
                        break;
                    }
                    digits[k] = 0;
                }
            }
            terms.push((target, phase));
        }
        CompiledQudit { dim, terms }
    }
}

/// Precomputed action of a [`QuditHamiltonian`]: `out[target[j]] += phase[j]·v[j]`.
pub struct CompiledQudit {
    dim: usize,
    terms: Vec<(Vec<usize>, Vec<C64>)>,
}

impl CompiledQudit {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (target, phase) in &self.terms {
            for j in 0..self.dim {
                out[target[j]] += phase[j] * v[j];
            }
        }
    }
}
