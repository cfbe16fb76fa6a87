//! Symplectic matrices over GF(2) and Clifford tableaus.
//!
//! Row-vector convention: a Pauli `p = [x|z]` maps to `p · S`, so row `k` of
//! `S` is the image of the k-th generator in the order
//! `X_0 .. X_{n-1}, Z_0 .. Z_{n-1}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::pauli::{sp_vec, PauliVector};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    pub n: usize,
    pub m: BitMatrix,
}

impl std::fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Symplectic(n={}) {:?}", self.n, self.m)
    }
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            m: BitMatrix::identity(2 * n),
        }
    }

    /// Wraps a `2n × 2n` matrix after checking `S Ω Sᵀ = Ω`.
    pub fn new(m: BitMatrix) -> Result<Self> {
        let s = Self::new_unchecked(m)?;
        s.check()?;
        Ok(s)
    }

    pub fn new_unchecked(m: BitMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
            return Err(Error::Invalid(format!(
                "symplectic matrix must be 2n x 2n, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { n: m.nrows() / 2, m })
    }

    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let m = BitMatrix::from_strs(rows).ok_or_else(|| Error::Parse("bad bit rows".into()))?;
        Self::new(m)
    }

    /// Returns the first `(i, j)` with `⟨r_i, r_j⟩ ≠ Ω_ij`, if any.
    pub fn violation(&self) -> Option<(usize, usize)> {
        let n = self.n;
        for i in 0..2 * n {
            for j in i..2 * n {
                let want = j == i + n && i < n;
                if sp_vec(self.m.row(i), self.m.row(j)) != want {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn check(&self) -> Result<()> {
        match self.violation() {
            None => Ok(()),
            Some((row, col)) => Err(Error::NotSymplectic { row, col }),
        }
    }

    pub fn is_symplectic(&self) -> bool {
        self.violation().is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_identity()
    }

    pub fn row(&self, i: usize) -> &BitVec {
        self.m.row(i)
    }

    /// `p · S` on a concatenated vector.
    pub fn apply_vec(&self, v: &BitVec) -> BitVec {
        self.m.left_mul_vec(v)
    }

    pub fn apply(&self, p: &PauliVector) -> PauliVector {
        PauliVector::from_vec(&self.apply_vec(&p.to_vec()))
    }

    /// `self · other`: first `self`, then `other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            n: self.n,
            m: self.m.mul(&other.m),
        }
    }

    /// `S⁻¹ = Ω Sᵀ Ω`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let n = self.n;
        let t = self.m.transpose();
        let mut out = BitMatrix::zeros(2 * n, 2 * n);
        for i in 0..2 * n {
            let src = t.row(if i < n { i + n } else { i - n });
            let r = out.row_mut(i);
            for j in src.iter_ones() {
                r.set(if j < n { j + n } else { j - n }, true);
            }
        }
        SymplecticMatrix { n, m: out }
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.m.rows().iter().map(|r| r.to_string()).collect()
    }
}

/// Symplectic matrix plus the `Z_4` phase picked up by each generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    pub s: SymplecticMatrix,
    pub phi: Vec<u8>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        Self {
            s: SymplecticMatrix::identity(n),
            phi: vec![0; 2 * n],
        }
    }
}

/// Uniformly random element of `Sp(2n, 2)`.
///
/// Builds a symplectic basis one hyperbolic pair at a time; each new vector
/// is drawn uniformly from the symplectic complement of the pairs so far.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymplecticMatrix {
    let dim = 2 * n;
    let mut pairs: Vec<(BitVec, BitVec)> = Vec::with_capacity(n);
    let random_vec = |rng: &mut R| {
        let mut v = BitVec::zeros(dim);
        for i in 0..dim {
            if rng.gen::<bool>() {
                v.set(i, true);
            }
        }
        v
    };
    let project = |u: &mut BitVec, pairs: &[(BitVec, BitVec)]| {
        for (v, w) in pairs {
            let a = sp_vec(u, w);
            let b = sp_vec(u, v);
            if a {
                u.xor_assign(v);
            }
            if b {
                u.xor_assign(w);
            }
        }
    };
    for _ in 0..n {
        let v = loop {
            let mut u = random_vec(rng);
            project(&mut u, &pairs);
            if !u.is_zero() {
                break u;
            }
        };
        let w = loop {
            let mut u = random_vec(rng);
            project(&mut u, &pairs);
            if sp_vec(&v, &u) {
                break u;
            }
        };
        pairs.push((v, w));
    }
    let mut rows = vec![BitVec::zeros(dim); dim];
    for (k, (v, w)) in pairs.into_iter().enumerate() {
        rows[k] = v;
        rows[k + n] = w;
    }
    SymplecticMatrix {
        n,
        m: BitMatrix::from_rows(dim, rows),
    }
}
