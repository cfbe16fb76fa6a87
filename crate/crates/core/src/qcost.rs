//! Qubit cost of a Clifford symmetry and basis changes that lower it.
//!
//! A symmetry `S` splits into independent factors along the connected
//! components of its qubit coupling. Lowering the cost means finding a
//! symplectic basis adapted to a decomposition of `GF(2)^{2n}` into small
//! `S`-invariant, symplectically nondegenerate subspaces: each subspace of
//! dimension `2d` becomes a `d`-qubit factor in the new frame.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{apply_clifford, circuit_symplectic, CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, RowBasis};
use crate::pauli::{canonicalize, coeff_eq, sp_vec, HamiltonianTableau};
use crate::poly::{factor, Poly};
use crate::symplectic::{CliffordTableau, SymplecticMatrix};
use crate::synth::{fix_phases, synthesize, synthesize_tableau};

/// Disjoint qubit blocks covering `0..n`, each sorted, ordered by first qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    pub blocks: Vec<Vec<usize>>,
    pub qubit_cost: usize,
}

impl BlockStructure {
    fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        let qubit_cost = blocks.iter().map(Vec::len).max().unwrap_or(0);
        Self { blocks, qubit_cost }
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Connected components of the qubit coupling of `S`. The phase vector never
/// couples qubits and is accepted only for symmetry with the tableau form.
pub fn qubit_cost(s: &SymplecticMatrix, _phi: &[u8]) -> BlockStructure {
    let n = s.n;
    let mut parent: Vec<usize> = (0..n).collect();
    for r in 0..2 * n {
        let a = r % n;
        for c in s.m.row(r).iter_ones() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, c % n));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        let r = find(&mut parent, q);
        groups[r].push(q);
    }
    BlockStructure::from_blocks(groups.into_iter().filter(|g| !g.is_empty()).collect())
}

/// A symmetry rewritten in a frame where it acts blockwise.
///
/// `b` is the symplectic of `b_circuit`, and `s_min = B S B⁻¹`, i.e. the
/// unitary `B̂† Ŝ B̂`. The Hamiltonian in the same frame is `B̂† H B̂`, see
/// [`MinimizedSymmetry::transform`].
#[derive(Clone, Debug)]
pub struct MinimizedSymmetry {
    pub b_circuit: CliffordCircuit,
    pub b: SymplecticMatrix,
    pub s_min: CliffordTableau,
    /// Realizes `s_min`; every gate stays inside one block.
    pub s_min_circuit: CliffordCircuit,
    pub structure: BlockStructure,
}

impl MinimizedSymmetry {
    /// `B̂† H B̂`.
    pub fn transform(&self, h: &HamiltonianTableau) -> Result<HamiltonianTableau> {
        apply_clifford(h, &self.b_circuit.inverse())
    }

    /// Gates of `s_min_circuit` acting on the given qubits.
    pub fn block_circuit(&self, qubits: &[usize]) -> CliffordCircuit {
        let inside = |q: usize| qubits.contains(&q);
        let gates = self
            .s_min_circuit
            .gates
            .iter()
            .filter(|g| gate_qubits(g).iter().all(|&q| inside(q)))
            .copied()
            .collect();
        CliffordCircuit {
            n: self.s_min_circuit.n,
            gates,
        }
    }
}

fn gate_qubits(g: &Gate) -> Vec<usize> {
    match *g {
        Gate::H { q } | Gate::S { q } | Gate::X { q } | Gate::Z { q } => vec![q],
        Gate::Cx { c, t } => vec![c, t],
        Gate::Swap { a, b } => vec![a, b],
    }
}

/// Coordinates of `qubits` inside a `2n` vector: x parts, then z parts.
fn local_index(qubits: &[usize], n: usize) -> Vec<usize> {
    qubits.iter().copied().chain(qubits.iter().map(|q| q + n)).collect()
}

fn restrict(s: &SymplecticMatrix, qubits: &[usize]) -> BitMatrix {
    let idx = local_index(qubits, s.n);
    let rows = idx
        .iter()
        .map(|&r| BitVec::from_bools(&idx.iter().map(|&c| s.m.get(r, c)).collect::<Vec<bool>>()))
        .collect();
    BitMatrix::from_rows(idx.len(), rows)
}

fn embed(v: &BitVec, qubits: &[usize], n: usize) -> BitVec {
    let mut out = BitVec::zeros(2 * n);
    for (i, g) in local_index(qubits, n).into_iter().enumerate() {
        out.set(g, v.get(i));
    }
    out
}

/// Characteristic polynomial from a flag of relatively cyclic subspaces.
fn char_poly(t: &BitMatrix) -> Poly {
    let dim = t.nrows();
    let mut basis = RowBasis::new(dim, dim);
    let mut chi = Poly::one();
    let mut tag = 0;
    for i in 0..dim {
        let mut v = BitVec::unit(dim, i);
        if basis.contains(&v) {
            continue;
        }
        let start = tag;
        loop {
            match basis.insert(&v, tag) {
                Ok(()) => {
                    tag += 1;
                    v = t.left_mul_vec(&v);
                }
                Err(combo) => {
                    // v T^d ≡ Σ a_j v T^j modulo the earlier invariant span
                    let d = tag - start;
                    let mut c = vec![false; d + 1];
                    c[d] = true;
                    for j in combo.iter_ones().filter(|&j| j >= start) {
                        c[j - start] = true;
                    }
                    chi = chi.mul(&Poly::from_coeffs(&c));
                    break;
                }
            }
        }
    }
    chi
}

fn matrix_pow(m: &BitMatrix, mut e: usize) -> BitMatrix {
    let mut acc = BitMatrix::identity(m.nrows());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

/// Invariant nondegenerate summands from the primary decomposition:
/// `V_f` pairs only with `V_{f*}` under the symplectic form.
fn primary_summands(t: &BitMatrix, rng: &mut ChaCha8Rng) -> Vec<Vec<BitVec>> {
    let dim = t.nrows();
    let fs = factor(&char_poly(t), rng);
    if fs.len() <= 1 {
        return vec![(0..dim).map(|i| BitVec::unit(dim, i)).collect()];
    }
    let comps: Vec<(Poly, Vec<BitVec>)> = fs
        .iter()
        .map(|(f, m)| {
            let g = matrix_pow(&f.eval_matrix(t), *m);
            // row convention: {v : v·g(T) = 0}
            (f.clone(), g.transpose().kernel())
        })
        .collect();
    let mut used = vec![false; comps.len()];
    let mut out = Vec::new();
    for i in 0..comps.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut space = comps[i].1.clone();
        let r = comps[i].0.reciprocal();
        if r != comps[i].0 {
            if let Some(j) = (0..comps.len()).find(|&j| !used[j] && comps[j].0 == r) {
                used[j] = true;
                space.extend(comps[j].1.iter().cloned());
            }
        }
        out.push(space);
    }
    debug_assert_eq!(out.iter().map(Vec::len).sum::<usize>(), dim);
    out
}

/// Adds `v, vT, vT², …` to the span until it closes.
fn extend_cyclic(t: &BitMatrix, rb: &mut RowBasis, vecs: &mut Vec<BitVec>, v: &BitVec) {
    let mut v = v.clone();
    while rb.insert(&v, vecs.len()).is_ok() {
        vecs.push(v.clone());
        v = t.left_mul_vec(&v);
    }
}

fn gram(vs: &[BitVec]) -> BitMatrix {
    let d = vs.len();
    let mut g = BitMatrix::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            if sp_vec(&vs[i], &vs[j]) {
                g.set(i, j, true);
                g.set(j, i, true);
            }
        }
    }
    g
}

/// A nonzero vector of `span(vs)` orthogonal to all of it, if any.
fn radical_vector(vs: &[BitVec]) -> Option<BitVec> {
    let c = gram(vs).kernel().into_iter().next()?;
    let mut r = BitVec::zeros(vs[0].len());
    for i in c.iter_ones() {
        r.xor_assign(&vs[i]);
    }
    Some(r)
}

const PARTNER_TRIES: usize = 8;

/// Smallest-looking invariant nondegenerate subspace of `W` containing `v`:
/// grows the cyclic span of `v` by cyclic spans of partners of its radical.
fn closure(t: &BitMatrix, w: &[BitVec], v: &BitVec, rng: &mut ChaCha8Rng) -> Vec<BitVec> {
    let dim = v.len();
    let mut rb = RowBasis::new(dim, dim);
    let mut vecs = Vec::new();
    extend_cyclic(t, &mut rb, &mut vecs, v);
    while let Some(r) = radical_vector(&vecs) {
        let mut partners: Vec<BitVec> = w.iter().filter(|x| sp_vec(&r, x)).take(PARTNER_TRIES).cloned().collect();
        for _ in 0..4 * PARTNER_TRIES {
            if partners.len() >= 2 * PARTNER_TRIES {
                break;
            }
            let mut x = BitVec::zeros(dim);
            for y in w {
                if rng.gen() {
                    x.xor_assign(y);
                }
            }
            if sp_vec(&r, &x) {
                partners.push(x);
            }
        }
        // fewest dimensions, then the smallest remaining radical
        let mut best: Option<((usize, usize), RowBasis, Vec<BitVec>)> = None;
        for x in &partners {
            let (mut rb2, mut v2) = (rb.clone(), vecs.clone());
            extend_cyclic(t, &mut rb2, &mut v2, x);
            let key = (v2.len(), v2.len() - gram(&v2).rank());
            if best.as_ref().map_or(true, |b| key < b.0) {
                best = Some((key, rb2, v2));
            }
        }
        let (_, rb2, v2) = best.expect("summand is nondegenerate");
        (rb, vecs) = (rb2, v2);
    }
    vecs
}

/// Basis of `{w ∈ span(W) : ⟨w, u⟩ = 0 ∀u ∈ U}`.
fn complement(w: &[BitVec], u: &[BitVec]) -> Vec<BitVec> {
    let rows = u
        .iter()
        .map(|uj| BitVec::from_bools(&w.iter().map(|wi| sp_vec(uj, wi)).collect::<Vec<bool>>()))
        .collect();
    BitMatrix::from_rows(w.len(), rows)
        .kernel()
        .into_iter()
        .map(|c| {
            let mut v = BitVec::zeros(w[0].len());
            for i in c.iter_ones() {
                v.xor_assign(&w[i]);
            }
            v
        })
        .collect()
}

const BASIS_CANDIDATES: usize = 24;
const RANDOM_CANDIDATES: usize = 8;
const PATIENCE: usize = 8;

/// A remainder on which `⟨v, vT⟩` vanishes identically but `T ≠ I` cannot
/// be split into one-qubit pieces (the swap is the smallest example), so
/// such remainders are avoided when there is a choice.
fn isotropic_remainder(t: &BitMatrix, w: &[BitVec]) -> bool {
    if w.len() > RESTART_DIM {
        return false;
    }
    let images: Vec<BitVec> = w.iter().map(|v| t.left_mul_vec(v)).collect();
    let moved = w.iter().zip(&images).any(|(v, vt)| v != vt);
    moved
        && w.iter().zip(&images).all(|(v, vt)| !sp_vec(v, vt))
        && (0..w.len()).tuple_combinations().all(|(i, j)| {
            // polarization: ⟨a, bT⟩ + ⟨b, aT⟩ = q(a + b) − q(a) − q(b)
            sp_vec(&w[i], &images[j]) == sp_vec(&w[j], &images[i])
        })
}

/// Peels small invariant nondegenerate subspaces off `w` until none is
/// smaller than what is left. `shuffle` randomizes the candidate order.
fn split_greedy(t: &BitMatrix, mut w: Vec<BitVec>, rng: &mut ChaCha8Rng, shuffle: bool) -> Vec<Vec<BitVec>> {
    let mut out = Vec::new();
    loop {
        let d = w.len();
        if d <= 2 {
            if d > 0 {
                out.push(w);
            }
            return out;
        }
        let mut cands: Vec<BitVec> = if shuffle {
            w.choose_multiple(rng, BASIS_CANDIDATES).cloned().collect()
        } else {
            w.iter().take(BASIS_CANDIDATES).cloned().collect()
        };
        for _ in 0..RANDOM_CANDIDATES {
            let mut v = BitVec::zeros(w[0].len());
            for x in &w {
                if rng.gen() {
                    v.xor_assign(x);
                }
            }
            if !v.is_zero() {
                cands.push(v);
            }
        }
        // (piece, complement, complement is a dead end)
        let mut best: Option<(Vec<BitVec>, Vec<BitVec>, bool)> = None;
        let mut stale = 0;
        for v in &cands {
            let u = closure(t, &w, v, rng);
            let better_dim = best.as_ref().map_or(true, |b| u.len() < b.0.len());
            let same_dim = best.as_ref().is_some_and(|b| u.len() == b.0.len() && b.2);
            if u.len() < d && (better_dim || same_dim) {
                let rest = complement(&w, &u);
                let dead = isotropic_remainder(t, &rest);
                if better_dim || !dead {
                    let done = u.len() == 2 && !dead;
                    best = Some((u, rest, dead));
                    stale = 0;
                    if done {
                        break;
                    }
                    continue;
                }
            }
            stale += 1;
            if best.is_some() && stale >= PATIENCE {
                break;
            }
        }
        match best {
            None => {
                out.push(w);
                return out;
            }
            Some((u, rest, _)) => {
                out.push(u);
                w = rest;
            }
        }
    }
}

/// Largest piece first, then the sum of squared sizes.
fn score(pieces: &[Vec<BitVec>]) -> (usize, usize) {
    let max = pieces.iter().map(Vec::len).max().unwrap_or(0);
    (max, pieces.iter().map(|p| p.len() * p.len()).sum())
}

/// Restarts of the randomized greedy for summands up to this dimension.
const RESTART_DIM: usize = 128;
const RESTARTS: usize = 8;

/// Symplectic Gram–Schmidt on a nondegenerate subspace.
fn symplectic_basis(space: &[BitVec]) -> Vec<(BitVec, BitVec)> {
    // front to back, so the computational basis comes out as the identity
    let mut rest: std::collections::VecDeque<BitVec> = space.iter().cloned().collect();
    let mut pairs = Vec::new();
    while let Some(e) = rest.pop_front() {
        let k = rest
            .iter()
            .position(|u| sp_vec(&e, u))
            .expect("subspace is nondegenerate");
        let f = rest.remove(k).expect("index in range");
        for x in rest.iter_mut() {
            let a = sp_vec(x, &f);
            let b = sp_vec(x, &e);
            if a {
                x.xor_assign(&e);
            }
            if b {
                x.xor_assign(&f);
            }
        }
        pairs.push((e, f));
    }
    pairs
}

/// Invariant nondegenerate decomposition of the local space of one block.
fn decompose(t: &BitMatrix, rng: &mut ChaCha8Rng) -> Vec<Vec<BitVec>> {
    let mut out = Vec::new();
    for w in primary_summands(t, rng) {
        let mut best = split_greedy(t, w.clone(), rng, false);
        if w.len() <= RESTART_DIM {
            for _ in 0..RESTARTS {
                if score(&best).0 <= 2 {
                    break;
                }
                let trial = split_greedy(t, w.clone(), rng, true);
                if score(&trial) < score(&best) {
                    best = trial;
                }
            }
        }
        out.extend(best);
    }
    out
}

/// Heuristic basis change minimizing the qubit cost. Never worse than the
/// input: each block of `S` is decomposed on its own, and a decomposition of
/// the whole register replaces that only when it scores better.
pub fn minimize_qubit_cost(s: &SymplecticMatrix, phi: &[u8]) -> Result<MinimizedSymmetry> {
    s.check()?;
    let n = s.n;
    if phi.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: phi.len(),
        });
    }
    let original = qubit_cost(s, phi);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_c0de);
    let mut plan: Vec<(Vec<usize>, Vec<Vec<BitVec>>)> = original
        .blocks
        .iter()
        .map(|block| {
            let k = block.len();
            let mut pieces = if k == 1 { Vec::new() } else { decompose(&restrict(s, block), &mut rng) };
            if pieces.len() <= 1 {
                // nothing to split: keep the computational basis
                pieces = vec![(0..2 * k).map(|i| BitVec::unit(2 * k, i)).collect()];
            }
            (block.clone(), pieces)
        })
        .collect();
    // Merging blocks can help: a swap next to a Hadamard is conjugate to
    // three Hadamards.
    if original.blocks.len() > 1 && original.qubit_cost > 1 {
        let all: Vec<usize> = (0..n).collect();
        let whole = decompose(&restrict(s, &all), &mut rng);
        let split: Vec<Vec<BitVec>> = plan.iter().flat_map(|(_, p)| p.iter().cloned()).collect();
        if score(&whole) < score(&split) {
            plan = vec![(all, whole)];
        }
    }
    let mut rows = vec![BitVec::zeros(2 * n); 2 * n];
    for (block, pieces) in &plan {
        let mut next = 0;
        for piece in pieces {
            for (e, f) in symplectic_basis(piece) {
                let q = block[next];
                next += 1;
                rows[q] = embed(&e, block, n);
                rows[q + n] = embed(&f, block, n);
            }
        }
        debug_assert_eq!(next, block.len());
    }
    let mut b = SymplecticMatrix::new(BitMatrix::from_rows(2 * n, rows))?;
    let mut s_min = b.compose(s).compose(&b.inverse());
    if qubit_cost(&s_min, phi).qubit_cost > original.qubit_cost {
        b = SymplecticMatrix::identity(n);
        s_min = s.clone();
    }
    let b_circuit = synthesize(&b)?;
    let s_circuit = synthesize_tableau(&CliffordTableau { s: s.clone(), phi: phi.to_vec() })?;
    let chain = b_circuit.then(&s_circuit).then(&b_circuit.inverse());
    let tableau = circuit_symplectic(&chain);
    debug_assert_eq!(tableau.s, s_min);
    let (structure, s_min_circuit) = blockwise_circuit(&tableau)?;
    Ok(MinimizedSymmetry {
        b_circuit,
        b,
        s_min: tableau,
        s_min_circuit,
        structure,
    })
}

/// Block structure of a tableau and a circuit for it whose gates each stay
/// inside one block.
fn blockwise_circuit(t: &CliffordTableau) -> Result<(BlockStructure, CliffordCircuit)> {
    let n = t.s.n;
    let structure = qubit_cost(&t.s, &t.phi);
    let mut c = CliffordCircuit::new(n);
    for block in &structure.blocks {
        let local = SymplecticMatrix::new(restrict(&t.s, block))?;
        c.gates.extend(synthesize(&local)?.embed(n, block).gates);
    }
    fix_phases(&mut c, &t.phi)?;
    Ok((structure, c))
}

/// A symmetry taken as is, without a basis change.
pub fn as_blockwise(t: &CliffordTableau) -> Result<MinimizedSymmetry> {
    t.s.check()?;
    let (structure, s_min_circuit) = blockwise_circuit(t)?;
    Ok(MinimizedSymmetry {
        b_circuit: CliffordCircuit::new(t.s.n),
        b: SymplecticMatrix::identity(t.s.n),
        s_min: t.clone(),
        s_min_circuit,
        structure,
    })
}

/// `U H U† = H` up to coefficient tolerance.
pub fn is_symmetry(h: &HamiltonianTableau, c: &CliffordCircuit, tol: f64) -> Result<bool> {
    let a = canonicalize(h);
    let b = canonicalize(&apply_clifford(h, c)?);
    Ok(a.terms.len() == b.terms.len()
        && a.terms
            .iter()
            .zip(&b.terms)
            .all(|(x, y)| x.p == y.p && coeff_eq(x.value(), y.value(), tol)))
}

/// Blocks of `s_min` that together form a standalone symmetry.
#[derive(Clone, Debug)]
pub struct BlockGroup {
    /// Indices into `structure.blocks`.
    pub blocks: Vec<usize>,
    pub qubits: Vec<usize>,
    pub circuit: CliffordCircuit,
}

/// Subsets tried per group before giving up and merging everything left.
const GROUP_SEARCH_LIMIT: usize = 4096;

/// Splits `s_min` into as many independent symmetries of `h_sym` as possible.
/// Expects `h_sym = min.transform(h)`.
pub fn group_blocks(h_sym: &HamiltonianTableau, min: &MinimizedSymmetry, tol: f64) -> Result<Vec<BlockGroup>> {
    let blocks = &min.structure.blocks;
    let make = |ids: Vec<usize>| {
        let mut qubits: Vec<usize> = ids.iter().flat_map(|&i| blocks[i].iter().copied()).collect();
        qubits.sort_unstable();
        let circuit = min.block_circuit(&qubits);
        BlockGroup {
            blocks: ids,
            qubits,
            circuit,
        }
    };
    let mut groups = Vec::new();
    let mut rest = Vec::new();
    for i in 0..blocks.len() {
        let g = make(vec![i]);
        if is_symmetry(h_sym, &g.circuit, tol)? {
            groups.push(g);
        } else {
            rest.push(i);
        }
    }
    // The product of the rest is a symmetry, so is the complement of any
    // symmetric subset of it.
    while !rest.is_empty() {
        let first = rest[0];
        let others = &rest[1..];
        let mut tried = 0;
        let mut found = None;
        'sizes: for size in 1..others.len() {
            for combo in others.iter().copied().combinations(size) {
                tried += 1;
                if tried > GROUP_SEARCH_LIMIT {
                    break 'sizes;
                }
                let mut ids = vec![first];
                ids.extend(combo);
                let g = make(ids);
                if is_symmetry(h_sym, &g.circuit, tol)? {
                    found = Some(g);
                    break 'sizes;
                }
            }
        }
        let g = found.unwrap_or_else(|| make(rest.clone()));
        rest.retain(|i| !g.blocks.contains(i));
        groups.push(g);
    }
    groups.sort_by(|a, b| a.qubits.cmp(&b.qubits));
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{dense_circuit, max_abs_diff};
    use crate::find::{find_symmetries, FindConfig};
    use crate::models::gen_tfi_ladder;
    use crate::symplectic::random_symplectic;
    use crate::synth::random_clifford;
    use crate::C64;

    fn check(s: &SymplecticMatrix, phi: &[u8]) -> MinimizedSymmetry {
        let m = minimize_qubit_cost(s, phi).unwrap();
        assert!(m.b.is_symplectic());
        assert_eq!(circuit_symplectic(&m.b_circuit).s, m.b);
        assert_eq!(m.s_min.s, m.b.compose(s).compose(&m.b.inverse()));
        assert_eq!(circuit_symplectic(&m.s_min_circuit), m.s_min);
        assert!(m.structure.qubit_cost <= qubit_cost(s, phi).qubit_cost);
        assert_eq!(qubit_cost(&m.s_min.s, &m.s_min.phi), m.structure);
        m
    }

    #[test]
    fn cost_of_products() {
        // CX(0,1) ⊗ H(2)
        let c = CliffordCircuit::from_gates(3, vec![Gate::Cx { c: 0, t: 1 }, Gate::H { q: 2 }]).unwrap();
        let t = circuit_symplectic(&c);
        let bs = qubit_cost(&t.s, &t.phi);
        assert_eq!(bs.blocks, vec![vec![0, 1], vec![2]]);
        assert_eq!(bs.qubit_cost, 2);
    }

    #[test]
    fn swap_is_already_minimal() {
        let c = CliffordCircuit::from_gates(3, vec![Gate::Swap { a: 0, b: 1 }]).unwrap();
        let t = circuit_symplectic(&c);
        let m = check(&t.s, &t.phi);
        assert_eq!(m.structure.qubit_cost, 2);
        // nothing to gain, so no basis change
        assert!(m.b.is_identity());
    }

    #[test]
    fn hidden_local_cliffords_are_separated() {
        // H⊗S⊗H⊗S disguised by a random Clifford.
        let local = CliffordCircuit::from_gates(
            4,
            vec![Gate::H { q: 0 }, Gate::S { q: 1 }, Gate::H { q: 2 }, Gate::S { q: 3 }],
        )
        .unwrap();
        for seed in 0..10 {
            let r = random_clifford(4, seed);
            let c = r.inverse().then(&local).then(&r);
            let t = circuit_symplectic(&c);
            let m = check(&t.s, &t.phi);
            assert_eq!(m.structure.qubit_cost, 1, "seed {seed}");
        }
    }

    #[test]
    fn hidden_swaps_become_pairs() {
        let local = CliffordCircuit::from_gates(6, vec![Gate::Swap { a: 0, b: 1 }, Gate::Swap { a: 2, b: 3 }]).unwrap();
        for seed in 0..10 {
            let r = random_clifford(6, seed);
            let c = r.inverse().then(&local).then(&r);
            let t = circuit_symplectic(&c);
            assert_eq!(check(&t.s, &t.phi).structure.qubit_cost, 2, "seed {seed}");
        }
    }

    #[test]
    fn hidden_mixed_structures() {
        use Gate::*;
        let cases: Vec<(usize, Vec<Gate>, usize)> = vec![
            (6, vec![H { q: 0 }, S { q: 1 }, H { q: 2 }, S { q: 3 }, H { q: 4 }, S { q: 5 }], 1),
            (6, vec![Swap { a: 0, b: 1 }, H { q: 2 }, S { q: 3 }, Swap { a: 4, b: 5 }], 1),
            (6, vec![Swap { a: 0, b: 1 }, Cx { c: 2, t: 3 }, Swap { a: 4, b: 5 }], 2),
            (2, vec![Cx { c: 0, t: 1 }], 2),
            (3, vec![S { q: 0 }, H { q: 0 }, S { q: 1 }, H { q: 1 }, S { q: 2 }, H { q: 2 }], 1),
            (5, vec![S { q: 0 }, H { q: 0 }, H { q: 1 }, Cx { c: 2, t: 3 }, S { q: 4 }], 1),
            (6, vec![Cx { c: 0, t: 1 }, Cx { c: 1, t: 2 }, H { q: 3 }, S { q: 4 }, H { q: 5 }], 3),
        ];
        for (k, (n, gates, q)) in cases.into_iter().enumerate() {
            let local = CliffordCircuit::from_gates(n, gates).unwrap();
            let native = circuit_symplectic(&local);
            assert_eq!(check(&native.s, &native.phi).structure.qubit_cost, q, "case {k} native");
            for seed in 0..20 {
                let r = random_clifford(n, 1000 + seed);
                let t = circuit_symplectic(&r.inverse().then(&local).then(&r));
                assert_eq!(check(&t.s, &t.phi).structure.qubit_cost, q, "case {k} seed {seed}");
            }
        }
    }

    #[test]
    fn random_symplectics_keep_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            for _ in 0..5 {
                let s = random_symplectic(n, &mut rng);
                // any Hermitian-consistent phases: a synthesized circuit's plus even shifts
                let base = circuit_symplectic(&synthesize(&s).unwrap()).phi;
                let phi: Vec<u8> = base.iter().map(|p| (p + 2 * rng.gen_range(0..2u8)) & 3).collect();
                check(&s, &phi);
            }
        }
    }

    #[test]
    fn dense_conjugation_matches() {
        for seed in 0..6 {
            let c = random_clifford(3, 100 + seed);
            let t = circuit_symplectic(&c);
            let m = check(&t.s, &t.phi);
            let b = dense_circuit(&m.b_circuit, 1 << 12).unwrap();
            let s = dense_circuit(&c, 1 << 12).unwrap();
            let want = dense_circuit(&m.s_min_circuit, 1 << 12).unwrap();
            let got = b.adjoint() * s * &b;
            // up to a global phase
            let k = (0..8).find(|&j| want[(j, 0)].norm() > 1e-6 || want[(0, j)].norm() > 1e-6).unwrap();
            let (i, j) = if want[(k, 0)].norm() > 1e-6 { (k, 0) } else { (0, k) };
            let ph: C64 = got[(i, j)] / want[(i, j)];
            assert!(max_abs_diff(&got, &(want * ph)) < 1e-12);
        }
    }

    #[test]
    fn tfi_reflection_groups() {
        let h = gen_tfi_ladder(3, 1.0, 0.7).unwrap();
        let rep = find_symmetries(&h, &FindConfig::default());
        for sym in &rep.symmetries {
            let t = circuit_symplectic(&sym.circuit);
            let m = check(&t.s, &t.phi);
            let hs = m.transform(&h).unwrap();
            assert!(is_symmetry(&hs, &m.s_min_circuit, 1e-9).unwrap());
            let groups = group_blocks(&hs, &m, 1e-9).unwrap();
            let covered: usize = groups.iter().map(|g| g.qubits.len()).sum();
            assert_eq!(covered, h.n);
            for g in &groups {
                assert!(is_symmetry(&hs, &g.circuit, 1e-9).unwrap());
            }
        }
    }
}
