//! Brute-force linear algebra used to check every other stage, plus the
//! matrix-free ground-state and time-evolution solvers used in benchmarks.
//!
//! Qubit `k` is bit `k` of the basis index, and
//! `X^x Z^z |b⟩ = (−1)^{z·b} |b ⊕ x⟩`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::circuit::{CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{HamiltonianTableau, PauliVector, C64};
use crate::qudit::{CompiledQudit, QuditHamiltonian};

/// Largest dimension for which full matrices are materialized.
pub const DENSE_CAP: usize = 1 << 12;
/// Largest dimension for matrix-free (vector-only) work.
pub const SPARSE_CAP: usize = 1 << 20;

/// Dimension below which ground states use full diagonalization.
const SMALL_DIM: usize = 512;

pub type DenseOperator = DMatrix<C64>;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::DenseCap { dim, cap })
    } else {
        Ok(())
    }
}

/// Anything that can multiply a vector.
pub trait LinOp {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[C64], out: &mut [C64]);
}

/// Matrix-free Pauli sum on up to 63 qubits (bit masks).
pub struct QubitOp {
    n: usize,
    terms: Vec<(u64, u64, C64)>,
}

impl QubitOp {
    pub fn new(h: &HamiltonianTableau, cap: usize) -> Result<Self> {
        if h.n >= 63 {
            return Err(Error::DenseCap { dim: usize::MAX, cap });
        }
        check_cap(1usize << h.n, cap)?;
        let mask = |b: &crate::gf2::BitVec| b.iter_ones().fold(0u64, |m, q| m | (1 << q));
        Ok(Self {
            n: h.n,
            terms: h
                .terms
                .iter()
                .map(|t| (mask(&t.p.x), mask(&t.p.z), t.value()))
                .collect(),
        })
    }
}

impl LinOp for QubitOp {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = zero());
        for &(x, z, c) in &self.terms {
            let x = x as usize;
            let z = z as usize;
            for (b, &vb) in v.iter().enumerate() {
                let amp = c * vb;
                if (z & b).count_ones() & 1 == 1 {
                    out[b ^ x] -= amp;
                } else {
                    out[b ^ x] += amp;
                }
            }
        }
    }
}

impl LinOp for CompiledQudit {
    fn dim(&self) -> usize {
        CompiledQudit::dim(self)
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        CompiledQudit::apply(self, v, out)
    }
}

impl LinOp for DenseOperator {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        let r = self * DVector::from_column_slice(v);
        out.copy_from_slice(r.as_slice());
    }
}

fn materialize(op: &dyn LinOp) -> DenseOperator {
    let d = op.dim();
    let mut m = DenseOperator::zeros(d, d);
    let mut e = vec![zero(); d];
    let mut col = vec![zero(); d];
    for j in 0..d {
        e[j] = C64::new(1.0, 0.0);
        op.apply(&e, &mut col);
        e[j] = zero();
        m.column_mut(j).copy_from_slice(&col);
    }
    m
}

pub fn pauli_matrix(p: &PauliVector) -> DenseOperator {
    let n = p.n();
    let d = 1usize << n;
    let x = p.x.iter_ones().fold(0usize, |m, q| m | (1 << q));
    let z = p.z.iter_ones().fold(0usize, |m, q| m | (1 << q));
    let mut m = DenseOperator::zeros(d, d);
    for b in 0..d {
        let s = if (z & b).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        m[(b ^ x, b)] = C64::new(s, 0.0);
    }
    m
}

/// Full matrix of a qubit tableau, built term by term.
pub fn dense_tableau(h: &HamiltonianTableau, cap: usize) -> Result<DenseOperator> {
    check_cap(1usize << h.n.min(62), cap)?;
    let d = 1usize << h.n;
    let mut m = DenseOperator::zeros(d, d);
    for t in &h.terms {
        m += pauli_matrix(&t.p) * t.value();
    }
    Ok(m)
}

/// Full matrix of a qudit Hamiltonian (mixed dimensions).
pub fn dense_qudit(h: &QuditHamiltonian, cap: usize) -> Result<DenseOperator> {
    check_cap(h.dim(), cap)?;
    Ok(materialize(&h.compile()))
}

/// Applies `U = g_k ⋯ g_1` to a state in place.
pub fn apply_circuit_vec(c: &CliffordCircuit, psi: &mut [C64]) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for g in &c.gates {
        match *g {
            Gate::H { q } => {
                let m = 1 << q;
                for b in 0..psi.len() {
                    if b & m == 0 {
                        let (a0, a1) = (psi[b], psi[b | m]);
                        psi[b] = (a0 + a1) * r;
                        psi[b | m] = (a0 - a1) * r;
                    }
                }
            }
            Gate::S { q } => {
                let m = 1 << q;
                for (b, a) in psi.iter_mut().enumerate() {
                    if b & m != 0 {
                        *a = C64::new(-a.im, a.re);
                    }
                }
            }
            Gate::X { q } => {
                let m = 1 << q;
                for b in 0..psi.len() {
                    if b & m == 0 {
                        psi.swap(b, b | m);
                    }
                }
            }
            Gate::Z { q } => {
                let m = 1 << q;
                for (b, a) in psi.iter_mut().enumerate() {
                    if b & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cx { c, t } => {
                let (mc, mt) = (1 << c, 1 << t);
                for b in 0..psi.len() {
                    if b & mc != 0 && b & mt == 0 {
                        psi.swap(b, b | mt);
                    }
                }
            }
            Gate::Swap { a, b: q } => {
                let (ma, mb) = (1 << a, 1 << q);
                for b in 0..psi.len() {
                    if b & ma != 0 && b & mb == 0 {
                        psi.swap(b, b ^ ma ^ mb);
                    }
                }
            }
        }
    }
}

/// Full unitary of a circuit.
pub fn dense_circuit(c: &CliffordCircuit, cap: usize) -> Result<DenseOperator> {
    check_cap(1usize << c.n.min(62), cap)?;
    let d = 1usize << c.n;
    let mut m = DenseOperator::zeros(d, d);
    let mut col = vec![zero(); d];
    for j in 0..d {
        col.iter_mut().for_each(|a| *a = zero());
        col[j] = C64::new(1.0, 0.0);
        apply_circuit_vec(c, &mut col);
        m.column_mut(j).copy_from_slice(&col);
    }
    Ok(m)
}

/// `max |U H U† − H|` over all entries, computed one column at a time
/// without materializing any matrix.
pub fn check_invariance(h: &HamiltonianTableau, c: &CliffordCircuit, cap: usize) -> Result<f64> {
    let op = QubitOp::new(h, cap)?;
    let inv = c.inverse();
    let d = op.dim();
    let mut worst = 0.0f64;
    let mut e = vec![zero(); d];
    let mut lhs = vec![zero(); d];
    let mut rhs = vec![zero(); d];
    for j in 0..d {
        e.iter_mut().for_each(|a| *a = zero());
        e[j] = C64::new(1.0, 0.0);
        op.apply(&e, &mut rhs);
        apply_circuit_vec(&inv, &mut e);
        op.apply(&e, &mut lhs);
        apply_circuit_vec(c, &mut lhs);
        for (a, b) in lhs.iter().zip(&rhs) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn spectrum(m: &DenseOperator) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    (a - b).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Seeded Haar-random pure state (normalized complex Gaussian vector).
pub fn haar_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|a| *a /= nv);
    v
}

pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    dot(a, b).norm_sqr() / (dot(a, a).re * dot(b, b).re)
}

/// Lanczos basis with full reorthogonalization.
struct Krylov {
    vecs: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// True when the Krylov space became invariant.
    exhausted: bool,
}

impl Krylov {
    fn start(v0: &[C64]) -> Self {
        let nv = norm(v0);
        Self {
            vecs: vec![v0.iter().map(|a| a / nv).collect()],
            alpha: Vec::new(),
            beta: Vec::new(),
            exhausted: false,
        }
    }

    /// Adds one Lanczos step; returns false once the space is invariant.
    fn step(&mut self, op: &dyn LinOp) -> bool {
        let k = self.alpha.len();
        let mut w = vec![zero(); op.dim()];
        op.apply(&self.vecs[k], &mut w);
        let a = dot(&self.vecs[k], &w).re;
        self.alpha.push(a);
        for _ in 0..2 {
            for v in &self.vecs {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        let b = norm(&w);
        self.beta.push(b);
        let scale = self.alpha.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if b <= 1e-13 * scale || self.vecs.len() == op.dim() {
            self.exhausted = true;
            return false;
        }
        w.iter_mut().for_each(|x| *x /= b);
        self.vecs.push(w);
        true
    }

    fn tridiagonal(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        let m = self.alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        SymmetricEigen::new(t)
    }
}

/// Smallest eigenvalue. Full diagonalization for small dimensions,
/// otherwise Lanczos from a seeded random start.
pub fn ground_state(op: &dyn LinOp) -> f64 {
    let d = op.dim();
    if d == 0 {
        return f64::NAN;
    }
    if d <= SMALL_DIM {
        return spectrum(&materialize(op))[0];
    }
    let mut kr = Krylov::start(&haar_state(d, 0x5eed));
    let mut last = f64::INFINITY;
    loop {
        let more = kr.step(op);
        let m = kr.alpha.len();
        if more && m % 8 != 0 {
            continue;
        }
        let eig = kr.tridiagonal();
        let (i, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let resid = kr.beta[m - 1] * eig.eigenvectors[(m - 1, i)].abs();
        if !more || resid < 1e-11 || (theta - last).abs() < 1e-14 && resid < 1e-8 {
            return theta;
        }
        last = theta;
    }
}

/// `e^{−iHt} ψ` by adaptive Krylov steps with local error below `tol`.
pub fn evolve(op: &dyn LinOp, psi: &[C64], t: f64, tol: f64) -> Vec<C64> {
    if t == 0.0 || psi.is_empty() {
        return psi.to_vec();
    }
    const MAX_KRYLOV: usize = 40;
    let mut state = psi.to_vec();
    let mut remaining = t;
    let mut tau = t;
    while remaining.abs() > 0.0 {
        let nv = norm(&state);
        let mut kr = Krylov::start(&state);
        while kr.alpha.len() < MAX_KRYLOV && kr.step(op) {}
        let eig = kr.tridiagonal();
        let m = kr.alpha.len();
        tau = if tau.abs() > remaining.abs() { remaining } else { tau };
        let y = loop {
            // y = Q e^{−iΘτ} Qᵀ e1
            let mut y = vec![zero(); m];
            for k in 0..m {
                let q0 = eig.eigenvectors[(0, k)];
                let ph = C64::from_polar(q0, -eig.eigenvalues[k] * tau);
                for (j, yj) in y.iter_mut().enumerate() {
                    *yj += ph * eig.eigenvectors[(j, k)];
                }
            }
            let err = if kr.exhausted {
                0.0
            } else {
                kr.beta[m - 1] * y[m - 1].norm() * nv
            };
            if err <= tol * (tau / t).abs() || tau.abs() < t.abs() * 1e-12 {
                break y;
            }
            tau /= 2.0;
        };
        let mut next = vec![zero(); state.len()];
        for (j, v) in kr.vecs.iter().take(m).enumerate() {
            axpy(y[j] * nv, v, &mut next);
        }
        state = next;
        remaining -= tau;
        if remaining.abs() < t.abs() * 1e-14 {
            break;
        }
    }
    state
}
