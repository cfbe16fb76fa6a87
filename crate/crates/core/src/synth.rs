//! Circuit synthesis for symplectic matrices and random Clifford sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{circuit_symplectic, CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::gf2::{gf2_solve, BitVec};
use crate::symplectic::{random_symplectic, CliffordTableau, SymplecticMatrix};

/// Columns of `S` as bit vectors over the `2n` rows. Gates act on the right,
/// i.e. on columns, which keeps every gate a couple of word-level XORs.
struct Reducer {
    n: usize,
    cols: Vec<BitVec>,
    gates: Vec<Gate>,
}

impl Reducer {
    fn new(s: &SymplecticMatrix) -> Self {
        let t = s.m.transpose();
        Self {
            n: s.n,
            cols: t.into_rows(),
            gates: Vec::new(),
        }
    }

    #[inline]
    fn x(&self, row: usize, q: usize) -> bool {
        self.cols[q].get(row)
    }

    #[inline]
    fn z(&self, row: usize, q: usize) -> bool {
        self.cols[q + self.n].get(row)
    }

    fn apply(&mut self, g: Gate) {
        let n = self.n;
        match g {
            Gate::H { q } => self.cols.swap(q, q + n),
            Gate::S { q } => {
                let x = self.cols[q].clone();
                self.cols[q + n].xor_assign(&x);
            }
            Gate::Cx { c, t } => {
                let xc = self.cols[c].clone();
                self.cols[t].xor_assign(&xc);
                let zt = self.cols[t + n].clone();
                self.cols[c + n].xor_assign(&zt);
            }
            Gate::Swap { a, b } => {
                self.cols.swap(a, b);
                self.cols.swap(a + n, b + n);
            }
            Gate::X { .. } | Gate::Z { .. } => {}
        }
        self.gates.push(g);
    }

    /// Turns the factor of `row` on qubit `q` into a pure X.
    fn to_x(&mut self, row: usize, q: usize) {
        match (self.x(row, q), self.z(row, q)) {
            (true, true) => self.apply(Gate::S { q }),
            (false, true) => self.apply(Gate::H { q }),
            _ => {}
        }
    }

    /// Turns the factor of `row` on qubit `q` into a pure Z.
    fn to_z(&mut self, row: usize, q: usize) {
        match (self.x(row, q), self.z(row, q)) {
            (true, true) => {
                self.apply(Gate::S { q });
                self.apply(Gate::H { q });
            }
            (true, false) => self.apply(Gate::H { q }),
            _ => {}
        }
    }

    fn reduce_qubit(&mut self, j: usize) {
        let n = self.n;
        // Row X_j: make it X-only, gather onto j, clear the rest with CNOTs.
        let a = j;
        for k in j..n {
            self.to_x(a, k);
        }
        if !self.x(a, j) {
            let k0 = (j + 1..n).find(|&k| self.x(a, k)).expect("row X_j has support");
            self.apply(Gate::Swap { a: j, b: k0 });
        }
        for k in j + 1..n {
            if self.x(a, k) {
                self.apply(Gate::Cx { c: j, t: k });
            }
        }
        // Row Z_j anticommutes with X_j, so it has a Z component on j.
        let b = j + n;
        for k in j + 1..n {
            if self.x(b, k) || self.z(b, k) {
                self.to_z(b, k);
                self.apply(Gate::Cx { c: k, t: j });
            }
        }
        if self.x(b, j) {
            self.apply(Gate::H { q: j });
            self.apply(Gate::S { q: j });
            self.apply(Gate::H { q: j });
        }
    }
}

/// Circuit whose symplectic equals `s` exactly.
pub fn synthesize(s: &SymplecticMatrix) -> Result<CliffordCircuit> {
    s.check()?;
    let mut r = Reducer::new(s);
    for j in 0..s.n {
        r.reduce_qubit(j);
    }
    debug_assert!(r.cols.iter().enumerate().all(|(i, c)| c.count_ones() == 1 && c.get(i)));
    // S · G_1 ⋯ G_k = I and every gate symplectic is an involution.
    let mut gates = r.gates;
    gates.reverse();
    Ok(CliffordCircuit { n: s.n, gates })
}

/// Pauli layer `X^qx Z^qz`.
pub fn pauli_layer(qx: &BitVec, qz: &BitVec) -> Vec<Gate> {
    let mut g: Vec<Gate> = qx.iter_ones().map(|q| Gate::X { q }).collect();
    g.extend(qz.iter_ones().map(|q| Gate::Z { q }));
    g
}

/// Appends the Pauli layer that makes the generator phases of `c` equal `phi`.
/// Requires `c` to already have the right symplectic.
pub fn fix_phases(c: &mut CliffordCircuit, phi: &[u8]) -> Result<()> {
    let n = c.n;
    let have = circuit_symplectic(c);
    let mut rhs = Vec::with_capacity(2 * n);
    for (k, (&want, &got)) in phi.iter().zip(&have.phi).enumerate() {
        let d = (want + 4 - got) & 3;
        if d & 1 == 1 {
            return Err(Error::Invalid(format!("phase of generator {k} is not Hermitian")));
        }
        rhs.push(d == 2);
    }
    // X_a flips images with a Z on a, Z_a those with an X: solve S·(qz|qx) = rhs.
    let sol = gf2_solve(&have.s.m, &BitVec::from_bools(&rhs));
    let y = sol.x.expect("symplectic matrices are invertible");
    c.gates.extend(pauli_layer(&y.slice(n, n), &y.slice(0, n)));
    Ok(())
}

/// Circuit realizing a tableau exactly, phases included.
pub fn synthesize_tableau(t: &CliffordTableau) -> Result<CliffordCircuit> {
    if t.phi.len() != 2 * t.s.n {
        return Err(Error::DimensionMismatch {
            expected: 2 * t.s.n,
            got: t.phi.len(),
        });
    }
    let mut c = synthesize(&t.s)?;
    fix_phases(&mut c, &t.phi)?;
    Ok(c)
}

/// Uniformly random symplectic followed by a uniformly random Pauli layer.
pub fn random_clifford(n: usize, seed: u64) -> CliffordCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_clifford_with(n, &mut rng)
}

pub fn random_clifford_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordCircuit {
    let s = random_symplectic(n, rng);
    let mut c = synthesize(&s).expect("sampled matrix is symplectic");
    let qx = BitVec::from_bools(&(0..n).map(|_| rng.gen()).collect::<Vec<bool>>());
    let qz = BitVec::from_bools(&(0..n).map(|_| rng.gen()).collect::<Vec<bool>>());
    c.gates.extend(pauli_layer(&qx, &qz));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_symplectic;

    #[test]
    fn identity_gives_empty_circuit() {
        let c = synthesize(&SymplecticMatrix::identity(4)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn hadamard_symplectic() {
        let s = SymplecticMatrix::from_strs(&["01", "10"]).unwrap();
        let c = synthesize(&s).unwrap();
        assert_eq!(c.gates, vec![Gate::H { q: 0 }]);
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=12 {
            for _ in 0..10 {
                let s = random_symplectic(n, &mut rng);
                let c = synthesize(&s).unwrap();
                assert_eq!(circuit_symplectic(&c).s, s);
            }
        }
    }

    #[test]
    fn tableau_round_trip_with_phases() {
        for seed in 0..20 {
            let c = random_clifford(5, seed);
            let t = circuit_symplectic(&c);
            assert_eq!(circuit_symplectic(&synthesize_tableau(&t).unwrap()), t);
        }
    }

    #[test]
    fn random_clifford_is_deterministic() {
        assert_eq!(random_clifford(3, 9), random_clifford(3, 9));
        assert!(circuit_symplectic(&random_clifford(6, 1)).s.is_symplectic());
    }
}
