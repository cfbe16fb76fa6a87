//! Pauli strings, weighted Pauli sums and their commutation structure.
//!
//! A term stores `c · i^eta · X^x Z^z`, where `X^x Z^z` is the per-qubit
//! ordered product. The letter `Y` therefore maps to `x = z = 1` with one
//! extra unit of `eta`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

pub type C64 = Complex64;

/// Default relative tolerance for comparing coefficients.
pub const COEFF_TOL: f64 = 1e-9;

/// Multiplies `c` by `i^eta` exactly (no trigonometry).
#[inline]
pub fn rotate(c: C64, eta: u8) -> C64 {
    match eta & 3 {
        0 => c,
        1 => C64::new(-c.im, c.re),
        2 => -c,
        _ => C64::new(c.im, -c.re),
    }
}

/// Relative equality used for coefficient classes.
pub fn coeff_eq(a: C64, b: C64, tol: f64) -> bool {
    let scale = a.norm().max(b.norm()).max(1.0);
    (a - b).norm() <= tol * scale
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliVector {
    pub x: BitVec,
    pub z: BitVec,
}

impl PauliVector {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn new(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len());
        Self { x, z }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// The concatenated `[x | z]` vector of length `2n`.
    pub fn to_vec(&self) -> BitVec {
        BitVec::concat(&self.x, &self.z)
    }

    pub fn from_vec(v: &BitVec) -> Self {
        let n = v.len() / 2;
        Self {
            x: v.slice(0, n),
            z: v.slice(n, n),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of positions where both x and z are set.
    pub fn y_count(&self) -> usize {
        self.x.and(&self.z).count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&q| self.x.get(q) || self.z.get(q))
            .collect()
    }

    /// Letter string (`I`, `X`, `Y`, `Z`), qubit 0 first. The letters describe
    /// `i^{y_count} X^x Z^z`.
    pub fn letters(&self) -> String {
        (0..self.n())
            .map(|q| match (self.x.get(q), self.z.get(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }

    /// Parses a letter string; returns the vector and the number of `Y`s.
    pub fn parse_letters(s: &str) -> Result<(Self, usize)> {
        let n = s.chars().count();
        let mut p = Self::identity(n);
        let mut ys = 0;
        for (q, ch) in s.chars().enumerate() {
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => p.x.set(q, true),
                'Z' => p.z.set(q, true),
                'Y' => {
                    p.x.set(q, true);
                    p.z.set(q, true);
                    ys += 1;
                }
                other => return Err(Error::Parse(format!("unexpected Pauli letter {other:?}"))),
            }
        }
        Ok((p, ys))
    }

    /// Product `self · other` as `(i^k, X^x Z^z)` with `k` in 0..4.
    pub fn mul(&self, other: &PauliVector) -> (u8, PauliVector) {
        // X^a Z^b X^c Z^d = (-1)^{b·c} X^{a+c} Z^{b+d}
        let sign = if self.z.dot(&other.x) { 2 } else { 0 };
        (
            sign,
            PauliVector {
                x: self.x.xor(&other.x),
                z: self.z.xor(&other.z),
            },
        )
    }
}

impl fmt::Debug for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters())
    }
}

/// `⟨a, b⟩ = a Ω bᵀ mod 2`; true iff the operators anticommute.
pub fn symplectic_product(a: &PauliVector, b: &PauliVector) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    Ok(sp(a, b))
}

#[inline]
pub(crate) fn sp(a: &PauliVector, b: &PauliVector) -> bool {
    let mut acc = 0u64;
    let (ax, az, bx, bz) = (a.x.words(), a.z.words(), b.x.words(), b.z.words());
    for k in 0..ax.len() {
        acc ^= (ax[k] & bz[k]) ^ (az[k] & bx[k]);
    }
    acc.count_ones() & 1 == 1
}

/// Symplectic form on concatenated `[x|z]` vectors of length `2n`.
pub fn sp_vec(a: &BitVec, b: &BitVec) -> bool {
    let n = a.len() / 2;
    let mut s = false;
    for i in a.iter_ones() {
        let j = if i < n { i + n } else { i - n };
        s ^= b.get(j);
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub c: C64,
    pub eta: u8,
    pub p: PauliVector,
}

impl PauliTerm {
    pub fn new(c: C64, eta: u8, p: PauliVector) -> Self {
        Self { c, eta: eta & 3, p }
    }

    /// Builds a term from a letter string, folding `Y` phases into `eta`.
    pub fn from_label(c: C64, eta: u8, label: &str) -> Result<Self> {
        let (p, ys) = PauliVector::parse_letters(label)?;
        Ok(Self::new(c, (eta as usize + ys) as u8 & 3, p))
    }

    /// The complex prefactor of `X^x Z^z`.
    pub fn value(&self) -> C64 {
        rotate(self.c, self.eta)
    }

    /// Phase relative to the letter form, i.e. `eta - #Y mod 4`.
    pub fn label_eta(&self) -> u8 {
        ((self.eta as usize + 4 - self.p.y_count() % 4) % 4) as u8
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTableau {
    pub n: usize,
    pub terms: Vec<PauliTerm>,
}

impl HamiltonianTableau {
    pub fn new(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn from_terms(n: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.p.n(),
                });
            }
        }
        Ok(Self { n, terms })
    }

    /// Convenience constructor from `(real coefficient, label)` pairs.
    pub fn from_labels(n: usize, items: &[(f64, &str)]) -> Result<Self> {
        let mut h = Self::new(n);
        for &(c, l) in items {
            h.push_label(C64::new(c, 0.0), l)?;
        }
        Ok(h)
    }

    pub fn push_label(&mut self, c: C64, label: &str) -> Result<()> {
        let t = PauliTerm::from_label(c, 0, label)?;
        if t.p.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: t.p.n(),
            });
        }
        self.terms.push(t);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term is Hermitian as an operator.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        // (X^x Z^z)† = (-1)^{x·z} X^x Z^z
        self.terms.iter().all(|t| {
            let v = t.value();
            let s = if t.p.y_count() % 2 == 1 { -1.0 } else { 1.0 };
            (v.conj() * s - v).norm() <= tol * v.norm().max(1.0)
        })
    }
}

/// Merges equal Pauli vectors, drops zero terms and sorts by `[x|z]`.
pub fn canonicalize(h: &HamiltonianTableau) -> HamiltonianTableau {
    canonicalize_with(h, 0.0)
}

/// As [`canonicalize`], dropping terms with `|c| <= drop_tol`.
pub fn canonicalize_with(h: &HamiltonianTableau, drop_tol: f64) -> HamiltonianTableau {
    let mut acc: BTreeMap<BitVec, (PauliVector, C64)> = BTreeMap::new();
    for t in &h.terms {
        let e = acc
            .entry(t.p.to_vec())
            .or_insert_with(|| (t.p.clone(), C64::new(0.0, 0.0)));
        e.1 += t.value();
    }
    let terms = acc
        .into_values()
        .filter(|(_, v)| v.norm() > drop_tol)
        .map(|(p, v)| {
            let (c, eta) = split_phase(v);
            PauliTerm { c, eta, p }
        })
        .collect();
    HamiltonianTableau { n: h.n, terms }
}

/// Splits `v = c · i^eta` with `arg c ∈ (−π/4, π/4]`.
pub fn split_phase(v: C64) -> (C64, u8) {
    let theta = v.im.atan2(v.re);
    let k = ((theta - std::f64::consts::FRAC_PI_4) / std::f64::consts::FRAC_PI_2).ceil() as i64;
    let eta = k.rem_euclid(4) as u8;
    (rotate(v, (4 - eta) & 3), eta)
}

/// `G[i][j] = ⟨p_i, p_j⟩`.
pub fn gram_matrix(h: &HamiltonianTableau) -> BitMatrix {
    let m = h.terms.len();
    let mut g = BitMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            if sp(&h.terms[i].p, &h.terms[j].p) {
                g.set(i, j, true);
                g.set(j, i, true);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(s: &str) -> PauliVector {
        PauliVector::parse_letters(s).unwrap().0
    }

    #[test]
    fn x_and_z_anticommute() {
        assert!(symplectic_product(&pv("X"), &pv("Z")).unwrap());
        assert!(!symplectic_product(&pv("X"), &pv("X")).unwrap());
        assert!(!symplectic_product(&pv("XX"), &pv("YY")).unwrap());
        assert!(symplectic_product(&pv("X"), &pv("XX")).is_err());
    }

    #[test]
    fn y_letter_carries_phase() {
        let t = PauliTerm::from_label(C64::new(1.0, 0.0), 0, "Y").unwrap();
        assert_eq!(t.eta, 1);
        assert_eq!(t.label_eta(), 0);
        assert_eq!(t.p.letters(), "Y");
    }

    #[test]
    fn cancelling_terms_vanish() {
        let h = HamiltonianTableau::from_terms(
            1,
            vec![
                PauliTerm::new(C64::new(1.0, 0.0), 0, pv("X")),
                PauliTerm::new(C64::new(1.0, 0.0), 2, pv("X")),
            ],
        )
        .unwrap();
        assert!(canonicalize(&h).is_empty());
    }

    #[test]
    fn merged_phase_is_minus_i() {
        let h = HamiltonianTableau::from_terms(
            1,
            vec![
                PauliTerm::new(C64::new(2.0, 0.0), 3, pv("Z")),
                PauliTerm::new(C64::new(1.0, 0.0), 1, pv("Z")),
            ],
        )
        .unwrap();
        let c = canonicalize(&h);
        assert_eq!(c.len(), 1);
        let v = c.terms[0].value();
        assert!((v - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn single_phase_term_is_untouched() {
        let h = HamiltonianTableau::from_terms(
            1,
            vec![PauliTerm::new(C64::new(1.0, 0.0), 1, pv("X"))],
        )
        .unwrap();
        assert_eq!(canonicalize(&h), h);
    }

    #[test]
    fn split_phase_boundaries() {
        for (v, eta) in [
            (C64::new(1.0, 1.0), 0),
            (C64::new(-1.0, 1.0), 1),
            (C64::new(-1.0, -1.0), 2),
            (C64::new(1.0, -1.0), 3),
            (C64::new(-3.0, 0.0), 2),
        ] {
            let (c, e) = split_phase(v);
            assert_eq!(e, eta, "{v}");
            assert!((rotate(c, e) - v).norm() < 1e-15);
        }
    }

    #[test]
    fn product_sign() {
        // Z·X = -X·Z
        let (k, p) = pv("Z").mul(&pv("X"));
        assert_eq!(k, 2);
        assert_eq!(p, pv("Y"));
    }

    #[test]
    fn gram_of_x_z() {
        let h = HamiltonianTableau::from_labels(1, &[(1.0, "X"), (1.0, "Z")]).unwrap();
        let g = gram_matrix(&h);
        assert!(!g.get(0, 0) && g.get(0, 1) && g.get(1, 0) && !g.get(1, 1));
        let single = HamiltonianTableau::from_labels(1, &[(1.0, "X")]).unwrap();
        assert!(!gram_matrix(&single).get(0, 0));
    }
}
