//! Exploiting a blockwise symmetry: eigenbases of the blocks, eigenvalue
//! sectors, and the effective qudit Hamiltonian of each sector.
//!
//! Within a sector of degeneracy `d`, basis vector `j` is the product state
//! `⊗_k |λ_{k, l_k}⟩` for the `j`-th index tuple. `j` is written little-endian
//! over the prime factors of `d` (ascending), which become the leading sites
//! of the effective Hamiltonian; untouched sites follow in their old order.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use nalgebra::SymmetricEigen;

use crate::circuit::CliffordCircuit;
use crate::dense::{dense_circuit, DenseOperator};
use crate::error::{Error, Result};
use crate::pauli::{HamiltonianTableau, C64};
use crate::qudit::{QuditHamiltonian, QuditTerm};

/// Largest block diagonalized densely.
pub const MAX_BLOCK_QUBITS: usize = 12;
/// Largest number of index tuples enumerated for one symmetry.
pub const SECTOR_CAP: usize = 1 << 16;
/// Eigenvalue angles closer than this are the same sector.
pub const ANGLE_TOL: f64 = 1e-9;
/// Effective coefficients at or below this magnitude are dropped.
pub const DROP_TOL: f64 = 1e-12;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Angle in `[0, 2π)`, with values just below `2π` folded to 0.
pub fn angle(z: C64) -> f64 {
    let a = z.im.atan2(z.re).rem_euclid(TAU);
    if TAU - a < ANGLE_TOL {
        0.0
    } else {
        a
    }
}

#[derive(Clone, Debug)]
pub struct BlockEigensystem {
    /// Sites the block acts on, ascending; local qubit `i` is `qubits[i]`.
    pub qubits: Vec<usize>,
    /// Sorted by angle.
    pub values: Vec<C64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DenseOperator,
}

impl BlockEigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Orthonormal basis of `span(cols of p)` picked column by column.
fn pivoted_basis(p: &DenseOperator, rank: usize) -> Vec<nalgebra::DVector<C64>> {
    let mut out: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(rank);
    for i in 0..p.ncols() {
        if out.len() == rank {
            break;
        }
        let mut w = p.column(i).into_owned();
        for _ in 0..2 {
            for u in &out {
                let c = u.dotc(&w);
                w -= u * c;
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            out.push(w / C64::new(norm, 0.0));
        }
    }
    out
}

/// Joint eigenbasis of the commuting Hermitian parts of `u`, via `A + tB`.
fn unitary_eigen(u: &DenseOperator) -> Option<(Vec<C64>, DenseOperator)> {
    let dim = u.nrows();
    let ud = u.adjoint();
    let a = (u + &ud) * C64::new(0.5, 0.0);
    let b = (u - &ud) * C64::new(0.0, -0.5);
    'shift: for t in [0.618_033_988_749_895, 0.414_213_562_373_095, 0.302_775_637_731_995] {
        let m = &a + &b * C64::new(t, 0.0);
        let eig = SymmetricEigen::new(m);
        let mut pairs: Vec<(f64, C64, usize)> = Vec::with_capacity(dim);
        for j in 0..dim {
            let v = eig.eigenvectors.column(j);
            let uv = u * v;
            let lam = v.dotc(&uv);
            if (uv - v * lam).norm() > 1e-8 {
                continue 'shift;
            }
            let lam = lam / C64::new(lam.norm(), 0.0);
            pairs.push((angle(lam), lam, j));
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut values = Vec::with_capacity(dim);
        let mut vectors = DenseOperator::zeros(dim, dim);
        let mut col = 0;
        let mut start = 0;
        while start < dim {
            let mut end = start + 1;
            while end < dim && pairs[end].0 - pairs[end - 1].0 < ANGLE_TOL * 1e3 {
                end += 1;
            }
            let mut p = DenseOperator::zeros(dim, dim);
            let mut lam = zero();
            for &(_, l, j) in &pairs[start..end] {
                let v = eig.eigenvectors.column(j);
                p += v * v.adjoint();
                lam += l;
            }
            let lam = lam / C64::new(lam.norm(), 0.0);
            for v in pivoted_basis(&p, end - start) {
                vectors.set_column(col, &v);
                values.push(lam);
                col += 1;
            }
            start = end;
        }
        if col == dim {
            return Some((values, vectors));
        }
    }
    None
}

/// Eigenvalues and eigenvectors of one block's unitary. `local` acts on
/// `qubits.len()` qubits, local qubit `i` standing for `qubits[i]`.
pub fn eigendecompose_block(qubits: &[usize], local: &CliffordCircuit, max_qubits: usize) -> Result<BlockEigensystem> {
    if qubits.len() > max_qubits {
        return Err(Error::BlockTooLarge {
            size: qubits.len(),
            limit: max_qubits,
        });
    }
    if local.n != qubits.len() {
        return Err(Error::DimensionMismatch {
            expected: qubits.len(),
            got: local.n,
        });
    }
    let u = dense_circuit(local, usize::MAX)?;
    let (values, vectors) =
        unitary_eigen(&u).ok_or_else(|| Error::Invalid("block unitary could not be diagonalized".into()))?;
    Ok(BlockEigensystem {
        qubits: qubits.to_vec(),
        values,
        vectors,
    })
}

/// One eigenvalue of a product of blocks and the tuples that produce it.
#[derive(Clone, Debug)]
pub struct SectorSpec {
    pub lambda: C64,
    /// Per-block eigenvector indices; position `j` is sector basis vector `j`.
    pub tuples: Vec<Vec<usize>>,
    pub d: usize,
    /// Prime factors of `d`, ascending.
    pub qudit_dims: Vec<usize>,
}

pub fn prime_factors(mut d: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        while d % p == 0 {
            out.push(p);
            d /= p;
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Groups all index tuples by their product eigenvalue.
pub fn enumerate_sectors(blocks: &[BlockEigensystem], cap: usize) -> Result<Vec<SectorSpec>> {
    let mut total = 1usize;
    for b in blocks {
        total = total
            .checked_mul(b.dim())
            .filter(|&t| t <= cap)
            .ok_or(Error::SectorCap {
                size: blocks.iter().map(|b| b.dim() as f64).product::<f64>() as usize,
                cap,
            })?;
    }
    let mut entries: Vec<(f64, Vec<usize>, C64)> = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut tuple = Vec::with_capacity(blocks.len());
        let mut lam = C64::new(1.0, 0.0);
        for b in blocks {
            let l = rest % b.dim();
            rest /= b.dim();
            tuple.push(l);
            lam *= b.values[l];
        }
        entries.push((angle(lam), tuple, lam));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut sectors: Vec<SectorSpec> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (a, tuple, lam) in entries {
        if a - last >= ANGLE_TOL || sectors.is_empty() {
            sectors.push(SectorSpec {
                lambda: lam,
                tuples: Vec::new(),
                d: 0,
                qudit_dims: Vec::new(),
            });
        }
        last = a;
        let s = sectors.last_mut().unwrap();
        s.tuples.push(tuple);
    }
    for s in &mut sectors {
        s.tuples.sort();
        s.d = s.tuples.len();
        s.qudit_dims = prime_factors(s.d);
    }
    Ok(sectors)
}

/// Dense `X^x Z^z` on a few qubits given as bit masks.
fn local_pauli(k: usize, x: usize, z: usize) -> DenseOperator {
    let d = 1usize << k;
    let mut m = DenseOperator::zeros(d, d);
    for b in 0..d {
        let s = if (z & b).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        m[(b ^ x, b)] = C64::new(s, 0.0);
    }
    m
}

/// Mixed-radix digits of `j`, little-endian.
fn digits(mut j: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let r = j % d;
            j /= d;
            r
        })
        .collect()
}

/// Expands a `d×d` matrix over `⊗ X^a Z^b` on `dims`: `c = Tr[P† M]/d`.
///
/// For a fixed shift `a` the coefficients over `b` are a mixed-radix DFT of
/// the shifted diagonal `M[j + a, j]`, done one axis at a time.
fn expand_generalized(m: &DenseOperator, dims: &[usize]) -> Vec<(Vec<(u32, u32)>, C64)> {
    let d = m.nrows();
    let dig: Vec<Vec<usize>> = (0..d).map(|j| digits(j, dims)).collect();
    let strides: Vec<usize> = dims
        .iter()
        .scan(1, |acc, &dd| {
            let s = *acc;
            *acc *= dd;
            Some(s)
        })
        .collect();
    let index = |ds: &[usize]| ds.iter().zip(&strides).map(|(x, s)| x * s).sum::<usize>();
    // ω_k^{-t} per axis
    let roots: Vec<Vec<C64>> = dims
        .iter()
        .map(|&dd| (0..dd).map(|t| C64::from_polar(1.0, -TAU * t as f64 / dd as f64)).collect())
        .collect();
    let mut out = Vec::new();
    let mut f = vec![zero(); d];
    let mut line = Vec::new();
    for a in 0..d {
        let av = &dig[a];
        for (j, fj) in f.iter_mut().enumerate() {
            let t: Vec<usize> = dig[j].iter().zip(av).zip(dims).map(|((&x, &y), &dd)| (x + y) % dd).collect();
            *fj = m[(index(&t), j)];
        }
        if f.iter().all(|v| v.norm() <= DROP_TOL) {
            continue;
        }
        for (k, &dd) in dims.iter().enumerate() {
            let s = strides[k];
            for base in (0..d).filter(|&i| (i / s) % dd == 0) {
                line.clear();
                line.extend((0..dd).map(|t| f[base + t * s]));
                for b in 0..dd {
                    let mut acc = zero();
                    for (t, v) in line.iter().enumerate() {
                        acc += roots[k][(b * t) % dd] * v;
                    }
                    f[base + b * s] = acc;
                }
            }
        }
        for (b, &v) in f.iter().enumerate() {
            let c = v / d as f64;
            if c.norm() > DROP_TOL {
                let exps = av.iter().zip(&dig[b]).map(|(&x, &y)| (x as u32, y as u32)).collect();
                out.push((exps, c));
            }
        }
    }
    out
}

/// Sites outside every block, in order.
fn pass_sites(n_sites: usize, blocks: &[BlockEigensystem]) -> Vec<usize> {
    let mut inside = vec![false; n_sites];
    for b in blocks {
        for &q in &b.qubits {
            inside[q] = true;
        }
    }
    (0..n_sites).filter(|&s| !inside[s]).collect()
}

fn check_blocks(site_dims: &[usize], blocks: &[BlockEigensystem]) -> Result<()> {
    let mut seen = vec![false; site_dims.len()];
    for b in blocks {
        for &q in &b.qubits {
            if q >= site_dims.len() || site_dims[q] != 2 || seen[q] {
                return Err(Error::Invalid(format!("block site {q} is not a free qubit")));
            }
            seen[q] = true;
        }
    }
    Ok(())
}

/// Effective Hamiltonian of one sector for a generalized Pauli sum whose
/// block sites are qubits.
pub fn effective_qudit(h: &QuditHamiltonian, blocks: &[BlockEigensystem], sector: &SectorSpec) -> Result<QuditHamiltonian> {
    check_blocks(&h.site_dims, blocks)?;
    let pass = pass_sites(h.site_dims.len(), blocks);
    let d = sector.d;
    let mut site_dims = sector.qudit_dims.clone();
    site_dims.extend(pass.iter().map(|&s| h.site_dims[s]));

    // ⟨λ_k,l| P |λ_k,l'⟩ per block and local Pauli
    let mut cache: HashMap<(usize, usize, usize), DenseOperator> = HashMap::new();
    // Terms sharing the same pass-through part are summed before expanding.
    let mut by_tail: BTreeMap<Vec<(u32, u32)>, DenseOperator> = BTreeMap::new();
    for t in &h.terms {
        let mut mats = Vec::with_capacity(blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            let (mut x, mut z) = (0usize, 0usize);
            for (i, &q) in b.qubits.iter().enumerate() {
                let (a, bb) = t.exps[q];
                x |= (a as usize & 1) << i;
                z |= (bb as usize & 1) << i;
            }
            let m = cache.entry((k, x, z)).or_insert_with(|| {
                let p = local_pauli(b.qubits.len(), x, z);
                b.vectors.adjoint() * p * &b.vectors
            });
            mats.push(m.clone());
        }
        let tail: Vec<(u32, u32)> = pass.iter().map(|&s| t.exps[s]).collect();
        let sm = by_tail.entry(tail).or_insert_with(|| DenseOperator::zeros(d, d));
        for (j, tj) in sector.tuples.iter().enumerate() {
            for (jp, tjp) in sector.tuples.iter().enumerate() {
                let mut v = t.c;
                for (k, m) in mats.iter().enumerate() {
                    v *= m[(tj[k], tjp[k])];
                    if v == zero() {
                        break;
                    }
                }
                sm[(j, jp)] += v;
            }
        }
    }
    let mut acc: BTreeMap<Vec<(u32, u32)>, C64> = BTreeMap::new();
    for (tail, sm) in by_tail {
        for (mut exps, c) in expand_generalized(&sm, &sector.qudit_dims) {
            exps.extend(tail.iter().copied());
            *acc.entry(exps).or_insert_with(zero) += c;
        }
    }
    let terms = acc
        .into_iter()
        .filter(|(_, c)| c.norm() > DROP_TOL)
        .map(|(exps, c)| QuditTerm { c, exps })
        .collect();
    Ok(QuditHamiltonian { site_dims, terms })
}

/// Effective Hamiltonian of one sector of a qubit tableau.
pub fn effective_hamiltonian(
    h_sym: &HamiltonianTableau,
    blocks: &[BlockEigensystem],
    sector: &SectorSpec,
) -> Result<QuditHamiltonian> {
    effective_qudit(&QuditHamiltonian::from_qubits(h_sym), blocks, sector)
}

/// Site index → (block, local qubit) for the sector's product basis.
struct Layout {
    site_dims: Vec<usize>,
    pass: Vec<usize>,
    /// Basis vector `j` of the sector over the block sites, as amplitudes
    /// indexed by the block-site configuration.
    vecs: Vec<Vec<C64>>,
    block_sites: Vec<usize>,
}

impl Layout {
    fn new(site_dims: &[usize], blocks: &[BlockEigensystem], sector: &SectorSpec) -> Self {
        let pass = pass_sites(site_dims.len(), blocks);
        let block_sites: Vec<usize> = blocks.iter().flat_map(|b| b.qubits.iter().copied()).collect();
        let g = 1usize << block_sites.len();
        let vecs = sector
            .tuples
            .iter()
            .map(|tuple| {
                (0..g)
                    .map(|cfg| {
                        let mut amp = C64::new(1.0, 0.0);
                        let mut bit = 0;
                        for (b, &l) in blocks.iter().zip(tuple) {
                            let k = b.qubits.len();
                            let local = (cfg >> bit) & ((1 << k) - 1);
                            bit += k;
                            amp *= b.vectors[(local, l)];
                        }
                        amp
                    })
                    .collect()
            })
            .collect();
        Self {
            site_dims: site_dims.to_vec(),
            pass,
            vecs,
            block_sites,
        }
    }

    /// Full index from a block-site configuration and a pass-through index.
    fn index(&self, cfg: usize, mut rest: usize) -> usize {
        let mut digs = vec![0usize; self.site_dims.len()];
        for (i, &s) in self.block_sites.iter().enumerate() {
            digs[s] = (cfg >> i) & 1;
        }
        for &s in &self.pass {
            digs[s] = rest % self.site_dims[s];
            rest /= self.site_dims[s];
        }
        let mut idx = 0;
        let mut stride = 1;
        for (&x, &d) in digs.iter().zip(&self.site_dims) {
            idx += x * stride;
            stride *= d;
        }
        idx
    }

    fn pass_dim(&self) -> usize {
        self.pass.iter().map(|&s| self.site_dims[s]).product()
    }
}

/// Components of `psi` in one sector, in the effective Hamiltonian's basis.
pub fn project_state(psi: &[C64], site_dims: &[usize], blocks: &[BlockEigensystem], sector: &SectorSpec) -> Vec<C64> {
    let lay = Layout::new(site_dims, blocks, sector);
    let d = sector.d;
    let r = lay.pass_dim();
    let mut out = vec![zero(); d * r];
    for rest in 0..r {
        for (j, v) in lay.vecs.iter().enumerate() {
            let mut acc = zero();
            for (cfg, a) in v.iter().enumerate() {
                if *a != zero() {
                    acc += a.conj() * psi[lay.index(cfg, rest)];
                }
            }
            out[j + d * rest] = acc;
        }
    }
    out
}

/// Adds the embedding of a sector state back into the full space.
pub fn lift_state(phi: &[C64], site_dims: &[usize], blocks: &[BlockEigensystem], sector: &SectorSpec, out: &mut [C64]) {
    let lay = Layout::new(site_dims, blocks, sector);
    let d = sector.d;
    for rest in 0..lay.pass_dim() {
        for (j, v) in lay.vecs.iter().enumerate() {
            let c = phi[j + d * rest];
            if c == zero() {
                continue;
            }
            for (cfg, a) in v.iter().enumerate() {
                out[lay.index(cfg, rest)] += a * c;
            }
        }
    }
}

/// One leaf of the exploitation tree.
#[derive(Clone, Debug)]
pub struct Leaf {
    /// Sector index chosen at each level.
    pub path: Vec<usize>,
    pub lambdas: Vec<C64>,
    pub ham: QuditHamiltonian,
}

/// Sector summary per level, for manifests.
#[derive(Clone, Debug)]
pub struct LevelSectors {
    pub path: Vec<usize>,
    pub lambdas: Vec<C64>,
    pub degeneracies: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct ExploitTree {
    pub leaves: Vec<Leaf>,
    pub levels: Vec<LevelSectors>,
}

/// Moves block sites through one exploitation step: old pass-through site
/// `s` becomes `offset + rank of s`.
fn remap(rest: &[Vec<BlockEigensystem>], pass: &[usize], offset: usize) -> Vec<Vec<BlockEigensystem>> {
    rest.iter()
        .map(|sym| {
            sym.iter()
                .map(|b| BlockEigensystem {
                    qubits: b
                        .qubits
                        .iter()
                        .map(|q| offset + pass.iter().position(|p| p == q).expect("symmetries are disjoint"))
                        .collect(),
                    values: b.values.clone(),
                    vectors: b.vectors.clone(),
                })
                .collect()
        })
        .collect()
}

/// Exploits independent symmetries (disjoint sites) one after another,
/// branching on every sector.
pub fn exploit_recursively(
    h: &QuditHamiltonian,
    symmetries: &[Vec<BlockEigensystem>],
    cap: usize,
) -> Result<ExploitTree> {
    let mut tree = ExploitTree::default();
    descend(h, symmetries, cap, &mut Vec::new(), &mut Vec::new(), &mut tree)?;
    Ok(tree)
}

fn descend(
    h: &QuditHamiltonian,
    syms: &[Vec<BlockEigensystem>],
    cap: usize,
    path: &mut Vec<usize>,
    lambdas: &mut Vec<C64>,
    tree: &mut ExploitTree,
) -> Result<()> {
    let Some((first, rest)) = syms.split_first() else {
        tree.leaves.push(Leaf {
            path: path.clone(),
            lambdas: lambdas.clone(),
            ham: h.clone(),
        });
        return Ok(());
    };
    let sectors = enumerate_sectors(first, cap)?;
    tree.levels.push(LevelSectors {
        path: path.clone(),
        lambdas: sectors.iter().map(|s| s.lambda).collect(),
        degeneracies: sectors.iter().map(|s| s.d).collect(),
    });
    let pass = pass_sites(h.site_dims.len(), first);
    for (a, sector) in sectors.iter().enumerate() {
        let eff = effective_qudit(h, first, sector)?;
        let next = remap(rest, &pass, sector.qudit_dims.len());
        path.push(a);
        lambdas.push(sector.lambda);
        descend(&eff, &next, cap, path, lambdas, tree)?;
        path.pop();
        lambdas.pop();
    }
    Ok(())
}

/// Splits a state over the leaves of [`exploit_recursively`], in leaf order.
pub fn project_recursively(
    psi: &[C64],
    site_dims: &[usize],
    symmetries: &[Vec<BlockEigensystem>],
    cap: usize,
) -> Result<Vec<Vec<C64>>> {
    let mut out = Vec::new();
    project_descend(psi, site_dims, symmetries, cap, &mut out)?;
    Ok(out)
}

fn project_descend(
    psi: &[C64],
    site_dims: &[usize],
    syms: &[Vec<BlockEigensystem>],
    cap: usize,
    out: &mut Vec<Vec<C64>>,
) -> Result<()> {
    let Some((first, rest)) = syms.split_first() else {
        out.push(psi.to_vec());
        return Ok(());
    };
    let pass = pass_sites(site_dims.len(), first);
    for sector in enumerate_sectors(first, cap)? {
        let phi = project_state(psi, site_dims, first, &sector);
        let mut dims = sector.qudit_dims.clone();
        dims.extend(pass.iter().map(|&s| site_dims[s]));
        let next = remap(rest, &pass, sector.qudit_dims.len());
        project_descend(&phi, &dims, &next, cap, out)?;
    }
    Ok(())
}

/// Inverse of [`project_recursively`].
pub fn lift_recursively(
    parts: &[Vec<C64>],
    site_dims: &[usize],
    symmetries: &[Vec<BlockEigensystem>],
    cap: usize,
) -> Result<Vec<C64>> {
    let dim: usize = site_dims.iter().product();
    let mut out = vec![zero(); dim];
    let mut next_leaf = 0;
    lift_descend(parts, &mut next_leaf, site_dims, symmetries, cap, &mut out)?;
    Ok(out)
}

fn lift_descend(
    parts: &[Vec<C64>],
    next_leaf: &mut usize,
    site_dims: &[usize],
    syms: &[Vec<BlockEigensystem>],
    cap: usize,
    out: &mut [C64],
) -> Result<()> {
    let Some((first, rest)) = syms.split_first() else {
        out.iter_mut().zip(&parts[*next_leaf]).for_each(|(o, p)| *o += p);
        *next_leaf += 1;
        return Ok(());
    };
    let pass = pass_sites(site_dims.len(), first);
    for sector in enumerate_sectors(first, cap)? {
        let mut dims = sector.qudit_dims.clone();
        dims.extend(pass.iter().map(|&s| site_dims[s]));
        let next = remap(rest, &pass, sector.qudit_dims.len());
        let mut phi = vec![zero(); dims.iter().product()];
        lift_descend(parts, next_leaf, &dims, &next, cap, &mut phi)?;
        lift_state(&phi, site_dims, first, &sector, out);
    }
    Ok(())
}
