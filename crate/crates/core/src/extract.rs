//! Turning a row permutation into a verified Clifford symmetry.

use crate::circuit::{apply_clifford, CliffordCircuit};
use crate::gf2::{gf2_solve, BitMatrix, BitVec, RowBasis};
use crate::pauli::{coeff_eq, sp_vec, HamiltonianTableau};
use crate::symplectic::SymplecticMatrix;
use crate::synth::{pauli_layer, synthesize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reject {
    /// A row image breaks a linear relation or a commutation relation.
    NotLinear { row: usize },
    /// Some row would need an odd phase correction.
    Parity { row: usize },
    /// The Pauli-layer system has no solution.
    Insoluble,
    /// Final check failed at this row.
    Mismatch { row: usize },
}

impl std::fmt::Display for Reject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reject::NotLinear { row } => write!(f, "row {row}: permutation is not induced by a linear map"),
            Reject::Parity { row } => write!(f, "row {row}: odd phase correction needed"),
            Reject::Insoluble => write!(f, "no Pauli layer fixes the phases"),
            Reject::Mismatch { row } => write!(f, "row {row}: conjugated tableau differs"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CandidateSymmetry {
    pub pi: Vec<usize>,
    pub s: SymplecticMatrix,
    pub circuit: CliffordCircuit,
    pub verified: bool,
}

impl CandidateSymmetry {
    pub fn is_trivial(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &p)| i == p)
            && self.s.is_identity()
            && self.circuit.gates.iter().all(|g| g.is_pauli())
    }
}

/// `vΩ`: swaps the x and z halves so that `⟨a, b⟩ = (aΩ)·b`.
fn omega(v: &BitVec) -> BitVec {
    let n = v.len() / 2;
    BitVec::concat(&v.slice(n, n), &v.slice(0, n))
}

/// Symplectic Gram–Schmidt on `vs`, with every operation mirrored on `ws`.
/// Returns hyperbolic pairs `(e, f, e', f')` and radical vectors `(r, r')`.
#[allow(clippy::type_complexity)]
fn mirrored_gram_schmidt(
    vs: Vec<BitVec>,
    ws: Vec<BitVec>,
) -> (Vec<(BitVec, BitVec, BitVec, BitVec)>, Vec<(BitVec, BitVec)>) {
    let mut rest: Vec<(BitVec, BitVec)> = vs.into_iter().zip(ws).collect();
    let mut pairs = Vec::new();
    let mut radical = Vec::new();
    while !rest.is_empty() {
        let (e, e2) = rest.remove(0);
        match rest.iter().position(|(u, _)| sp_vec(&e, u)) {
            None => radical.push((e, e2)),
            Some(k) => {
                let (f, f2) = rest.remove(k);
                for (x, x2) in rest.iter_mut() {
                    let a = sp_vec(x, &f);
                    let b = sp_vec(x, &e);
                    if a {
                        x.xor_assign(&e);
                        x2.xor_assign(&e2);
                    }
                    if b {
                        x.xor_assign(&f);
                        x2.xor_assign(&f2);
                    }
                }
                pairs.push((e, f, e2, f2));
            }
        }
    }
    (pairs, radical)
}

/// Partners `h_j` for radical vectors: `⟨r_i, h_j⟩ = δ_ij`, orthogonal to
/// the pairs and to each other.
fn radical_partners(pairs: &[(BitVec, BitVec)], radical: &[BitVec], dim: usize) -> Option<Vec<BitVec>> {
    let mut hs: Vec<BitVec> = Vec::new();
    for j in 0..radical.len() {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (e, f) in pairs {
            rows.push(omega(e));
            rhs.push(false);
            rows.push(omega(f));
            rhs.push(false);
        }
        for (i, r) in radical.iter().enumerate() {
            rows.push(omega(r));
            rhs.push(i == j);
        }
        for h in &hs {
            rows.push(omega(h));
            rhs.push(false);
        }
        let a = BitMatrix::from_rows(dim, rows);
        let sol = gf2_solve(&a, &BitVec::from_bools(&rhs));
        hs.push(sol.x?);
    }
    Some(hs)
}

/// Symplectic basis of the orthogonal complement of `span(ws)`.
fn complement_pairs(ws: &[BitVec], dim: usize) -> Vec<(BitVec, BitVec)> {
    let a = BitMatrix::from_rows(dim, ws.iter().map(omega).collect());
    let ker = a.kernel();
    let (pairs, radical) = mirrored_gram_schmidt(ker.clone(), ker);
    debug_assert!(radical.is_empty(), "complement of a nondegenerate space is nondegenerate");
    pairs.into_iter().map(|(e, f, _, _)| (e, f)).collect()
}

/// Finds a symplectic `S` with `p_i S = p_{π(i)}` for every row.
pub fn permutation_to_symplectic(h: &HamiltonianTableau, pi: &[usize]) -> Result<SymplecticMatrix, Reject> {
    let n = h.n;
    let dim = 2 * n;
    let m = h.terms.len();
    assert_eq!(pi.len(), m);
    let vecs: Vec<BitVec> = h.terms.iter().map(|t| t.p.to_vec()).collect();

    // Independent rows (lowest index first) and linear consistency of images.
    let mut basis = RowBasis::new(dim, m);
    let mut chosen = Vec::new();
    let mut image_basis = RowBasis::new(dim, m);
    for i in 0..m {
        match basis.insert(&vecs[i], i) {
            Ok(()) => {
                chosen.push(i);
                if image_basis.insert(&vecs[pi[i]], i).is_err() {
                    return Err(Reject::NotLinear { row: i });
                }
            }
            Err(combo) => {
                let mut img = vecs[pi[i]].clone();
                for j in combo.iter_ones() {
                    img.xor_assign(&vecs[pi[j]]);
                }
                if !img.is_zero() {
                    return Err(Reject::NotLinear { row: i });
                }
            }
        }
    }
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            if sp_vec(&vecs[i], &vecs[j]) != sp_vec(&vecs[pi[i]], &vecs[pi[j]]) {
                return Err(Reject::NotLinear { row: i });
            }
        }
    }

    let src: Vec<BitVec> = chosen.iter().map(|&i| vecs[i].clone()).collect();
    let dst: Vec<BitVec> = chosen.iter().map(|&i| vecs[pi[i]].clone()).collect();
    let (pairs, radical) = mirrored_gram_schmidt(src, dst);
    let p1: Vec<(BitVec, BitVec)> = pairs.iter().map(|(e, f, _, _)| (e.clone(), f.clone())).collect();
    let p2: Vec<(BitVec, BitVec)> = pairs.iter().map(|(_, _, e, f)| (e.clone(), f.clone())).collect();
    let r1: Vec<BitVec> = radical.iter().map(|(r, _)| r.clone()).collect();
    let r2: Vec<BitVec> = radical.iter().map(|(_, r)| r.clone()).collect();
    let h1 = radical_partners(&p1, &r1, dim).ok_or(Reject::NotLinear { row: 0 })?;
    let h2 = radical_partners(&p2, &r2, dim).ok_or(Reject::NotLinear { row: 0 })?;

    let assemble = |pairs: &[(BitVec, BitVec)], r: &[BitVec], hs: &[BitVec]| {
        let mut used: Vec<BitVec> = Vec::new();
        for (e, f) in pairs {
            used.push(e.clone());
            used.push(f.clone());
        }
        used.extend(r.iter().cloned());
        used.extend(hs.iter().cloned());
        let comp = complement_pairs(&used, dim);
        let mut xs: Vec<BitVec> = Vec::with_capacity(n);
        let mut zs: Vec<BitVec> = Vec::with_capacity(n);
        for (e, f) in pairs {
            xs.push(e.clone());
            zs.push(f.clone());
        }
        for (r, h) in r.iter().zip(hs) {
            xs.push(r.clone());
            zs.push(h.clone());
        }
        for (e, f) in comp {
            xs.push(e);
            zs.push(f);
        }
        xs.extend(zs);
        BitMatrix::from_rows(dim, xs)
    };
    let a = assemble(&p1, &r1, &h1);
    let a2 = assemble(&p2, &r2, &h2);
    if a.nrows() != dim || a2.nrows() != dim {
        return Err(Reject::NotLinear { row: 0 });
    }
    let inv = a.inverse().ok_or(Reject::NotLinear { row: 0 })?;
    let s = SymplecticMatrix { n, m: inv.mul(&a2) };
    debug_assert!(s.is_symplectic());
    for i in 0..m {
        if s.apply_vec(&vecs[i]) != vecs[pi[i]] {
            return Err(Reject::NotLinear { row: i });
        }
    }
    Ok(s)
}

/// Synthesizes `S` and appends the Pauli layer that fixes every row phase.
pub fn solve_phase_vector(
    h: &HamiltonianTableau,
    s: &SymplecticMatrix,
    pi: &[usize],
) -> Result<CliffordCircuit, Reject> {
    let n = h.n;
    let mut circuit = synthesize(s).expect("input is symplectic");
    let image = apply_clifford(h, &circuit).expect("sizes agree");
    let mut rows = Vec::with_capacity(h.terms.len());
    let mut rhs = Vec::with_capacity(h.terms.len());
    for (i, t) in image.terms.iter().enumerate() {
        let target = &h.terms[pi[i]];
        debug_assert_eq!(t.p, target.p);
        let delta = (target.eta + 4 - t.eta) & 3;
        if delta & 1 == 1 {
            return Err(Reject::Parity { row: i });
        }
        // ⟨q, p⟩ = qx·pz + qz·px
        rows.push(omega(&t.p.to_vec()));
        rhs.push(delta == 2);
    }
    let a = BitMatrix::from_rows(2 * n, rows);
    let q = gf2_solve(&a, &BitVec::from_bools(&rhs)).x.ok_or(Reject::Insoluble)?;
    circuit.gates.extend(pauli_layer(&q.slice(0, n), &q.slice(n, n)));
    Ok(circuit)
}

/// Checks `apply_clifford(h, circuit)` row `i` against row `π(i)` of `h`.
pub fn verify_symmetry(
    h: &HamiltonianTableau,
    pi: &[usize],
    circuit: &CliffordCircuit,
    tol: f64,
) -> Result<(), Reject> {
    let image = apply_clifford(h, circuit).map_err(|_| Reject::Mismatch { row: 0 })?;
    for (i, t) in image.terms.iter().enumerate() {
        let want = &h.terms[pi[i]];
        if t.p != want.p || t.eta != want.eta || !coeff_eq(t.c, want.c, tol) {
            return Err(Reject::Mismatch { row: i });
        }
    }
    Ok(())
}

/// Full extraction: symplectic, phases, verification.
pub fn extract_symmetry(h: &HamiltonianTableau, pi: &[usize], tol: f64) -> Result<CandidateSymmetry, Reject> {
    let s = permutation_to_symplectic(h, pi)?;
    let circuit = solve_phase_vector(h, &s, pi)?;
    verify_symmetry(h, pi, &circuit, tol)?;
    Ok(CandidateSymmetry {
        pi: pi.to_vec(),
        s,
        circuit,
        verified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_symplectic;
    use crate::pauli::canonicalize;
    use crate::Gate;

    #[test]
    fn identity_is_trivial() {
        let h = canonicalize(&HamiltonianTableau::from_labels(2, &[(1.0, "XX"), (1.0, "ZI")]).unwrap());
        let c = extract_symmetry(&h, &[0, 1], 1e-9).unwrap();
        assert!(c.s.is_identity());
        assert!(c.circuit.is_empty());
        assert!(c.is_trivial());
    }

    #[test]
    fn swap_symmetry_extracted() {
        let h = canonicalize(&HamiltonianTableau::from_labels(2, &[(1.0, "ZI"), (1.0, "IZ"), (0.5, "XX")]).unwrap());
        let labels: Vec<String> = h.terms.iter().map(|t| t.p.letters()).collect();
        let a = labels.iter().position(|l| l == "ZI").unwrap();
        let b = labels.iter().position(|l| l == "IZ").unwrap();
        let mut pi: Vec<usize> = (0..h.len()).collect();
        pi.swap(a, b);
        let c = extract_symmetry(&h, &pi, 1e-9).unwrap();
        assert!(!c.is_trivial());
        assert_eq!(circuit_symplectic(&c.circuit).s, c.s);
    }

    #[test]
    fn corrupted_phase_is_caught() {
        let h = canonicalize(&HamiltonianTableau::from_labels(1, &[(1.0, "X"), (1.0, "Z")]).unwrap());
        let c = extract_symmetry(&h, &[1, 0], 1e-9).unwrap();
        let mut bad = c.circuit.clone();
        bad.push(Gate::Z { q: 0 });
        assert!(matches!(verify_symmetry(&h, &c.pi, &bad, 1e-9), Err(Reject::Mismatch { .. })));
    }

    #[test]
    fn nonlinear_permutation_rejected() {
        // Commuting Z strings: swapping ZZI with IIZ breaks ZII + IZI = ZZI.
        let h = canonicalize(
            &HamiltonianTableau::from_labels(3, &[(1.0, "ZII"), (1.0, "IZI"), (1.0, "ZZI"), (1.0, "IIZ")]).unwrap(),
        );
        let labels: Vec<String> = h.terms.iter().map(|t| t.p.letters()).collect();
        let a = labels.iter().position(|l| l == "ZZI").unwrap();
        let b = labels.iter().position(|l| l == "IIZ").unwrap();
        let mut pi: Vec<usize> = (0..h.len()).collect();
        pi.swap(a, b);
        assert!(matches!(permutation_to_symplectic(&h, &pi), Err(Reject::NotLinear { .. })));
    }
}
