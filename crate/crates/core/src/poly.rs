//! Polynomials over GF(2) and their factorization.

use std::fmt;

use rand::Rng;

use crate::gf2::{BitMatrix, BitVec};

/// Polynomial over GF(2); bit `i` of the packed words is the coefficient of `x^i`.
/// Always normalized: no trailing zero words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(Vec<u64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![1])
    }

    pub fn x() -> Self {
        Poly(vec![2])
    }

    /// From coefficients, lowest degree first.
    pub fn from_coeffs(c: &[bool]) -> Self {
        let mut w = vec![0u64; c.len().div_ceil(64)];
        for (i, &b) in c.iter().enumerate() {
            if b {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        Poly(w).normalized()
    }

    fn normalized(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.0.last()?;
        Some((self.0.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    fn flip(&mut self, i: usize) {
        if self.0.len() <= i / 64 {
            self.0.resize(i / 64 + 1, 0);
        }
        self.0[i / 64] ^= 1 << (i % 64);
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (a, b) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut w = a.0.clone();
        for (x, y) in w.iter_mut().zip(&b.0) {
            *x ^= y;
        }
        Poly(w).normalized()
    }

    fn shl(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let (words, bits) = (k / 64, k % 64);
        let mut w = vec![0u64; self.0.len() + words + 1];
        for (i, &x) in self.0.iter().enumerate() {
            w[i + words] ^= x << bits;
            if bits > 0 {
                w[i + words + 1] ^= x >> (64 - bits);
            }
        }
        Poly(w).normalized()
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut acc = Poly::zero();
        let Some(d) = o.degree() else { return acc };
        for i in 0..=d {
            if o.coeff(i) {
                acc = acc.add(&self.shl(i));
            }
        }
        acc
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            q.flip(rd - dd);
            r = r.add(&d.shl(rd - dd));
        }
        (q.normalized(), r)
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero());
        q
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }

    pub fn derivative(&self) -> Poly {
        let mut d = Poly::zero();
        if let Some(deg) = self.degree() {
            for i in (1..=deg).step_by(2) {
                if self.coeff(i) {
                    d.flip(i - 1);
                }
            }
        }
        d.normalized()
    }

    /// Square root of a polynomial in `x²` (Frobenius inverse).
    fn sqrt(&self) -> Poly {
        let mut r = Poly::zero();
        if let Some(deg) = self.degree() {
            for i in (0..=deg).step_by(2) {
                if self.coeff(i) {
                    r.flip(i / 2);
                }
            }
        }
        r.normalized()
    }

    /// `x^deg · f(1/x)`.
    pub fn reciprocal(&self) -> Poly {
        let Some(d) = self.degree() else { return Poly::zero() };
        let c: Vec<bool> = (0..=d).map(|i| self.coeff(d - i)).collect();
        Poly::from_coeffs(&c)
    }

    /// `f(T)` for a square matrix, by Horner's rule.
    pub fn eval_matrix(&self, t: &BitMatrix) -> BitMatrix {
        let n = t.nrows();
        let mut acc = BitMatrix::zeros(n, n);
        let Some(d) = self.degree() else { return acc };
        for i in (0..=d).rev() {
            acc = acc.mul(t);
            if self.coeff(i) {
                for r in 0..n {
                    acc.row_mut(r).flip(r);
                }
            }
        }
        acc
    }

    /// `v · f(T)` without forming the matrix.
    pub fn eval_vec(&self, t: &BitMatrix, v: &BitVec) -> BitVec {
        let mut acc = BitVec::zeros(v.len());
        let Some(d) = self.degree() else { return acc };
        let mut p = v.clone();
        for i in 0..=d {
            if self.coeff(i) {
                acc.xor_assign(&p);
            }
            if i < d {
                p = t.left_mul_vec(&p);
            }
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else { return write!(f, "0") };
        let terms: Vec<String> = (0..=d)
            .rev()
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn square_free(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in square_free(&f.sqrt()) {
            out.push((g, 2 * m));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in square_free(&c.sqrt()) {
            out.push((g, 2 * m));
        }
    }
    out
}

fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut h = Poly::x().rem(&f);
    let mut i = 1;
    while f.degree().unwrap_or(0) >= 2 * i {
        h = h.mulmod(&h, &f);
        let g = f.gcd(&h.add(&Poly::x()));
        if !g.is_one() {
            f = f.div_exact(&g);
            h = h.rem(&f);
            out.push((g, i));
        }
        i += 1;
    }
    if f.degree().unwrap_or(0) > 0 {
        let d = f.degree().unwrap();
        out.push((f, d));
    }
    out
}

/// Splits a product of distinct degree-`d` irreducibles (Cantor–Zassenhaus
/// with the absolute trace, since the field has characteristic 2).
fn equal_degree<R: Rng + ?Sized>(g: &Poly, d: usize, rng: &mut R, out: &mut Vec<Poly>) {
    let deg = g.degree().unwrap_or(0);
    if deg == d {
        out.push(g.clone());
        return;
    }
    loop {
        let a = Poly::from_coeffs(&(0..deg).map(|_| rng.gen()).collect::<Vec<bool>>());
        let mut t = a.clone();
        let mut p = a;
        for _ in 1..d {
            p = p.mulmod(&p, g);
            t = t.add(&p);
        }
        let h = g.gcd(&t);
        let hd = h.degree().unwrap_or(0);
        if hd > 0 && hd < deg {
            equal_degree(&h, d, rng, out);
            equal_degree(&g.div_exact(&h), d, rng, out);
            return;
        }
    }
}

/// Irreducible factors of a nonzero polynomial with multiplicities, sorted.
pub fn factor<R: Rng + ?Sized>(f: &Poly, rng: &mut R) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    for (sf, m) in square_free(f) {
        for (g, d) in distinct_degree(&sf) {
            let mut parts = Vec::new();
            equal_degree(&g, d, rng, &mut parts);
            out.extend(parts.into_iter().map(|p| (p, m)));
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Poly {
        // lowest degree first
        Poly::from_coeffs(&s.chars().map(|c| c == '1').collect::<Vec<bool>>())
    }

    fn product(fs: &[(Poly, usize)]) -> Poly {
        let mut acc = Poly::one();
        for (f, m) in fs {
            for _ in 0..*m {
                acc = acc.mul(f);
            }
        }
        acc
    }

    #[test]
    fn arithmetic() {
        // (1 + x)² = 1 + x²
        assert_eq!(p("11").mul(&p("11")), p("101"));
        let (q, r) = p("1101").divrem(&p("11"));
        assert_eq!(q.mul(&p("11")).add(&r), p("1101"));
        assert_eq!(p("101").derivative(), Poly::zero());
        assert_eq!(p("1101").reciprocal(), p("1011"));
        assert_eq!(p("11").shl(130).degree(), Some(131));
    }

    #[test]
    fn factors_known_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (1 + x)^4 (1 + x + x²)
        let f = p("11").mul(&p("11")).mul(&p("11")).mul(&p("11")).mul(&p("111"));
        assert_eq!(factor(&f, &mut rng), vec![(p("11"), 4), (p("111"), 1)]);
        // x^15 + 1 splits into all irreducibles of degree dividing 4, except x
        let mut c = vec![false; 16];
        c[0] = true;
        c[15] = true;
        let fs = factor(&Poly::from_coeffs(&c), &mut rng);
        assert_eq!(fs.len(), 5);
        assert!(fs.iter().all(|(_, m)| *m == 1));
        assert_eq!(product(&fs), Poly::from_coeffs(&c));
    }

    #[test]
    fn random_products_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let deg = rng.gen_range(1..40);
            let mut c: Vec<bool> = (0..=deg).map(|_| rng.gen()).collect();
            c[deg] = true;
            let f = Poly::from_coeffs(&c);
            let fs = factor(&f, &mut rng);
            assert_eq!(product(&fs), f);
            for (g, _) in &fs {
                // irreducible: only trivial factors when refactored
                assert_eq!(factor(g, &mut rng), vec![(g.clone(), 1)]);
            }
        }
    }

    #[test]
    fn matrix_evaluation_matches_vector_evaluation() {
        let t = BitMatrix::from_strs(&["0110", "1011", "0001", "1000"]).unwrap();
        let f = p("1101");
        let m = f.eval_matrix(&t);
        for i in 0..4 {
            let e = BitVec::unit(4, i);
            assert_eq!(m.left_mul_vec(&e), f.eval_vec(&t, &e));
        }
    }
}
