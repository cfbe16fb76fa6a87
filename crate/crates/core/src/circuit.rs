//! Clifford gate circuits and their action on Hamiltonian tableaus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::{HamiltonianTableau, PauliTerm, PauliVector};
use crate::symplectic::{CliffordTableau, SymplecticMatrix};

/// Elementary gates. `S` is the phase gate `diag(1, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "g")]
pub enum Gate {
    H { q: usize },
    S { q: usize },
    #[serde(rename = "CX")]
    Cx { c: usize, t: usize },
    X { q: usize },
    Z { q: usize },
    #[serde(rename = "SWAP")]
    Swap { a: usize, b: usize },
}

impl Gate {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H { q } | Gate::S { q } | Gate::X { q } | Gate::Z { q } => (q, None),
            Gate::Cx { c, t } => (c, Some(t)),
            Gate::Swap { a, b } => (a, Some(b)),
        }
    }

    /// Renames qubits through `map` (used to embed sub-circuits).
    pub fn remap(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::H { q } => Gate::H { q: map[q] },
            Gate::S { q } => Gate::S { q: map[q] },
            Gate::X { q } => Gate::X { q: map[q] },
            Gate::Z { q } => Gate::Z { q: map[q] },
            Gate::Cx { c, t } => Gate::Cx { c: map[c], t: map[t] },
            Gate::Swap { a, b } => Gate::Swap { a: map[a], b: map[b] },
        }
    }

    pub fn is_pauli(&self) -> bool {
        matches!(self, Gate::X { .. } | Gate::Z { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CliffordCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Self { n, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            let (a, b) = g.qubits();
            if a >= self.n || b.is_some_and(|b| b >= self.n) {
                return Err(Error::Invalid(format!("gate {i} ({g:?}) out of range for n={}", self.n)));
            }
            if b == Some(a) {
                return Err(Error::Invalid(format!("gate {i} ({g:?}) repeats a qubit")));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends `other` after `self`.
    pub fn then(&self, other: &CliffordCircuit) -> CliffordCircuit {
        assert_eq!(self.n, other.n);
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        CliffordCircuit { n: self.n, gates }
    }

    /// The inverse circuit (`S† = S·Z`).
    pub fn inverse(&self) -> CliffordCircuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            match *g {
                Gate::S { q } => {
                    gates.push(Gate::S { q });
                    gates.push(Gate::Z { q });
                }
                other => gates.push(other),
            }
        }
        CliffordCircuit { n: self.n, gates }
    }

    /// The inverse of [`embed`](Self::embed): renumbers `qubits[i]` to `i`.
    /// Panics if a gate touches a qubit outside the list.
    pub fn restrict_to(&self, qubits: &[usize]) -> CliffordCircuit {
        let mut map = vec![usize::MAX; self.n];
        for (i, &q) in qubits.iter().enumerate() {
            map[q] = i;
        }
        let gates = self.gates.iter().map(|g| g.remap(&map)).collect::<Vec<_>>();
        let c = CliffordCircuit { n: qubits.len(), gates };
        c.validate().expect("gates stay inside the qubit list");
        c
    }

    /// Embeds this circuit into a larger register, qubit `k` going to `map[k]`.
    pub fn embed(&self, n: usize, map: &[usize]) -> CliffordCircuit {
        CliffordCircuit {
            n,
            gates: self.gates.iter().map(|g| g.remap(map)).collect(),
        }
    }
}

/// Column-major tableau: one bit vector per qubit over all terms, and the
/// mod-4 phase as two bit planes. Every gate is a handful of word XORs.
struct Columns {
    xs: Vec<BitVec>,
    zs: Vec<BitVec>,
    lo: BitVec,
    hi: BitVec,
}

impl Columns {
    fn from_terms<'a>(n: usize, m: usize, terms: impl Iterator<Item = (&'a PauliVector, u8)>) -> Self {
        let mut c = Columns {
            xs: vec![BitVec::zeros(m); n],
            zs: vec![BitVec::zeros(m); n],
            lo: BitVec::zeros(m),
            hi: BitVec::zeros(m),
        };
        for (i, (p, eta)) in terms.enumerate() {
            for q in p.x.iter_ones() {
                c.xs[q].set(i, true);
            }
            for q in p.z.iter_ones() {
                c.zs[q].set(i, true);
            }
            if eta & 1 == 1 {
                c.lo.set(i, true);
            }
            if eta & 2 == 2 {
                c.hi.set(i, true);
            }
        }
        c
    }

    fn apply(&mut self, g: &Gate) {
        match *g {
            Gate::H { q } => {
                self.hi.xor_assign(&self.xs[q].and(&self.zs[q]));
                std::mem::swap(&mut self.xs[q], &mut self.zs[q]);
            }
            Gate::S { q } => {
                let x = &self.xs[q];
                self.hi.xor_assign(&self.lo.and(x));
                self.lo.xor_assign(x);
                self.zs[q].xor_assign(x);
            }
            Gate::Cx { c, t } => {
                let xc = self.xs[c].clone();
                self.xs[t].xor_assign(&xc);
                let zt = self.zs[t].clone();
                self.zs[c].xor_assign(&zt);
            }
            Gate::X { q } => self.hi.xor_assign(&self.zs[q]),
            Gate::Z { q } => self.hi.xor_assign(&self.xs[q]),
            Gate::Swap { a, b } => {
                self.xs.swap(a, b);
                self.zs.swap(a, b);
            }
        }
    }

    fn row(&self, i: usize) -> (PauliVector, u8) {
        let n = self.xs.len();
        let mut p = PauliVector::identity(n);
        for q in 0..n {
            if self.xs[q].get(i) {
                p.x.set(q, true);
            }
            if self.zs[q].get(i) {
                p.z.set(q, true);
            }
        }
        let eta = self.lo.get(i) as u8 | ((self.hi.get(i) as u8) << 1);
        (p, eta)
    }
}

/// Conjugates every term by the circuit: `U H U†` with `U = g_k ⋯ g_1`.
pub fn apply_clifford(h: &HamiltonianTableau, g: &CliffordCircuit) -> Result<HamiltonianTableau> {
    if h.n != g.n {
        return Err(Error::DimensionMismatch {
            expected: h.n,
            got: g.n,
        });
    }
    g.validate()?;
    let mut cols = Columns::from_terms(h.n, h.terms.len(), h.terms.iter().map(|t| (&t.p, t.eta)));
    for gate in &g.gates {
        cols.apply(gate);
    }
    let terms = h
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (p, eta) = cols.row(i);
            PauliTerm { c: t.c, eta, p }
        })
        .collect();
    Ok(HamiltonianTableau { n: h.n, terms })
}

/// Symplectic matrix and phase vector of a circuit.
pub fn circuit_symplectic(c: &CliffordCircuit) -> CliffordTableau {
    let n = c.n;
    let basis: Vec<PauliVector> = (0..2 * n)
        .map(|k| PauliVector::from_vec(&BitVec::unit(2 * n, k)))
        .collect();
    let mut cols = Columns::from_terms(n, 2 * n, basis.iter().map(|p| (p, 0u8)));
    for g in &c.gates {
        cols.apply(g);
    }
    let mut rows = Vec::with_capacity(2 * n);
    let mut phi = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        let (p, eta) = cols.row(k);
        rows.push(p.to_vec());
        phi.push(eta);
    }
    CliffordTableau {
        s: SymplecticMatrix {
            n,
            m: BitMatrix::from_rows(2 * n, rows),
        },
        phi,
    }
}

/// Conjugates a single Pauli `i^eta X^x Z^z`; returns the new phase and vector.
pub fn conjugate_pauli(p: &PauliVector, eta: u8, g: &CliffordCircuit) -> (PauliVector, u8) {
    let mut cols = Columns::from_terms(g.n, 1, std::iter::once((p, eta)));
    for gate in &g.gates {
        cols.apply(gate);
    }
    cols.row(0)
}

/// Checks `apply_clifford(h, circuit) = Π h` row by row. Returns the first
/// mismatching row on failure.
pub fn permuted_equal(
    h: &HamiltonianTableau,
    image: &HamiltonianTableau,
    pi: &[usize],
) -> std::result::Result<(), usize> {
    for (i, t) in image.terms.iter().enumerate() {
        let want = &h.terms[pi[i]];
        if t.p != want.p || t.eta != want.eta || t.c != want.c {
            return Err(i);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(label: &str) -> HamiltonianTableau {
        HamiltonianTableau::from_labels(label.len(), &[(1.0, label)]).unwrap()
    }

    fn circ(n: usize, gates: Vec<Gate>) -> CliffordCircuit {
        CliffordCircuit::from_gates(n, gates).unwrap()
    }

    #[test]
    fn hadamard_maps_x_to_z() {
        let out = apply_clifford(&term("X"), &circ(1, vec![Gate::H { q: 0 }])).unwrap();
        assert_eq!(out.terms[0].p.letters(), "Z");
        assert_eq!(out.terms[0].eta, 0);
    }

    #[test]
    fn phase_maps_x_to_y() {
        let out = apply_clifford(&term("X"), &circ(1, vec![Gate::S { q: 0 }])).unwrap();
        let t = &out.terms[0];
        assert_eq!((t.p.x.get(0), t.p.z.get(0), t.eta), (true, true, 1));
    }

    #[test]
    fn symplectic_of_h_and_cnot() {
        let h = circuit_symplectic(&circ(1, vec![Gate::H { q: 0 }]));
        assert_eq!(h.s.row_strings(), vec!["01", "10"]);
        let cx = circuit_symplectic(&circ(2, vec![Gate::Cx { c: 0, t: 1 }]));
        // X0 -> X0 X1, X1 -> X1, Z0 -> Z0, Z1 -> Z0 Z1
        assert_eq!(cx.s.row_strings(), vec!["1100", "0100", "0010", "0011"]);
        assert!(cx.phi.iter().all(|&p| p == 0));
    }

    #[test]
    fn inverse_undoes() {
        let c = circ(
            3,
            vec![
                Gate::S { q: 0 },
                Gate::H { q: 1 },
                Gate::Cx { c: 0, t: 2 },
                Gate::X { q: 1 },
                Gate::Swap { a: 1, b: 2 },
                Gate::S { q: 2 },
            ],
        );
        let t = circuit_symplectic(&c.then(&c.inverse()));
        assert_eq!(t, CliffordTableau::identity(3));
    }

    #[test]
    fn rejects_bad_gates() {
        assert!(CliffordCircuit::from_gates(2, vec![Gate::Cx { c: 1, t: 1 }]).is_err());
        assert!(CliffordCircuit::from_gates(2, vec![Gate::H { q: 2 }]).is_err());
    }

    #[test]
    fn gate_json_shape() {
        let gates = vec![Gate::Cx { c: 0, t: 1 }, Gate::S { q: 1 }, Gate::Swap { a: 0, b: 1 }];
        let s = serde_json::to_string(&gates).unwrap();
        assert_eq!(
            s,
            r#"[{"g":"CX","c":0,"t":1},{"g":"S","q":1},{"g":"SWAP","a":0,"b":1}]"#
        );
    }
}
