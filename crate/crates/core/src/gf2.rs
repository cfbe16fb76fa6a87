//! Bit-packed linear algebra over GF(2).
//!
//! Vectors are stored little-endian in `u64` words: bit `i` lives in word
//! `i / 64` at position `i % 64`. Bits past `len` are always zero.

use std::cmp::Ordering;
use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn parse(s: &str) -> Option<Self> {
        let mut v = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                _ => return None,
            }
        }
        Some(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Parity of the bitwise AND, i.e. the standard dot product mod 2.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    /// Copies `len` bits starting at `start` into a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn concat(a: &BitVec, b: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(a.len + b.len);
        for i in a.iter_ones() {
            out.set(i, true);
        }
        for i in b.iter_ones() {
            out.set(a.len + i, true);
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl Ord for BitVec {
    /// Lexicographic order with bit 0 most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.len.min(other.len);
        let mut k = 0;
        while k * WORD < n {
            let a = self.words[k];
            let b = other.words[k];
            if a != b {
                let diff = (a ^ b).trailing_zeros() as usize;
                if k * WORD + diff < n {
                    return if (a >> diff) & 1 == 1 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
            }
            k += 1;
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Result of [`gf2_solve`]: a particular solution (if any) plus the rank and
/// pivot columns found by elimination.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Option<BitVec>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        Self { cols, rows }
    }

    pub fn from_strs(rows: &[&str]) -> Option<Self> {
        let parsed: Option<Vec<BitVec>> = rows.iter().map(|r| BitVec::parse(r)).collect();
        let parsed = parsed?;
        let cols = parsed.first().map_or(0, |r| r.len());
        if parsed.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self { cols, rows: parsed })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut BitVec {
        &mut self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i].set(j, v)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    /// `rows[dst] ^= rows[src]`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let (s, d) = if src < dst {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        d.xor_assign(s);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows.len());
        let mut out = BitVec::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// Matrix times column vector: `self · v`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols);
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows.len());
        BitMatrix {
            cols: other.cols,
            rows: self.rows.iter().map(|r| other.left_mul_vec(r)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows.len() == self.cols
            && self.rows.iter().enumerate().all(|(i, r)| {
                r.count_ones() == 1 && r.get(i)
            })
    }

    /// In-place reduced row echelon form; returns pivot columns.
    ///
    /// Pivot rule: for each column left to right, the lowest-index
    /// remaining row with a one in that column.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(r, p);
            for i in 0..self.rows.len() {
                if i != r && self.rows[i].get(c) {
                    self.add_row(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for i in 0..n {
            aug.rows[i] = BitVec::concat(&self.rows[i], &BitVec::unit(n, i));
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(BitMatrix {
            cols: n,
            rows: aug.rows.iter().map(|r| r.slice(n, n)).collect(),
        })
    }

    /// Basis of the right null space `{x : self · x = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = BitVec::zeros(self.cols);
            x.set(free, true);
            for (r, &p) in pivots.iter().enumerate() {
                if m.rows[r].get(free) {
                    x.set(p, true);
                }
            }
            basis.push(x);
        }
        basis
    }
}

/// Solves `A x = b` over GF(2), picking free variables as zero.
pub fn gf2_solve(a: &BitMatrix, b: &BitVec) -> Solution {
    assert_eq!(a.nrows(), b.len(), "rhs length must match row count");
    let k = a.ncols();
    let mut aug = BitMatrix::zeros(a.nrows(), k + 1);
    for i in 0..a.nrows() {
        let mut row = BitVec::zeros(k + 1);
        for j in a.row(i).iter_ones() {
            row.set(j, true);
        }
        if b.get(i) {
            row.set(k, true);
        }
        aug.rows[i] = row;
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&k) {
        let rank = pivots.len() - 1;
        return Solution {
            x: None,
            rank,
            pivots: pivots[..rank].to_vec(),
        };
    }
    let mut x = BitVec::zeros(k);
    for (r, &p) in pivots.iter().enumerate() {
        if aug.rows[r].get(k) {
            x.set(p, true);
        }
    }
    Solution {
        x: Some(x),
        rank: pivots.len(),
        pivots,
    }
}

/// Incremental basis for a subspace, tracking how each stored vector is
/// expressed in terms of the inserted originals.
///
/// Stored vectors are kept reduced against each other's pivots, so
/// [`RowBasis::reduce`] is a single pass.
#[derive(Clone, Debug)]
pub struct RowBasis {
    dim: usize,
    tags: usize,
    vecs: Vec<BitVec>,
    combos: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowBasis {
    /// `dim` is the ambient dimension, `tags` the number of original vectors
    /// that combinations are recorded against.
    pub fn new(dim: usize, tags: usize) -> Self {
        Self {
            dim,
            tags,
            vecs: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    /// Reduces `v` against the basis; returns the residual and the set of
    /// originals whose sum was subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut r = v.clone();
        let mut combo = BitVec::zeros(self.tags);
        for ((b, c), &p) in self.vecs.iter().zip(&self.combos).zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(b);
                combo.xor_assign(c);
            }
        }
        (r, combo)
    }

    /// Inserts original vector `tag`. Returns `Err(combo)` if it is dependent,
    /// where `combo` lists the originals that sum to it.
    pub fn insert(&mut self, v: &BitVec, tag: usize) -> Result<(), BitVec> {
        assert_eq!(v.len(), self.dim);
        let (r, mut combo) = self.reduce(v);
        let Some(p) = r.first_one() else {
            return Err(combo);
        };
        combo.flip(tag);
        for (b, c) in self.vecs.iter_mut().zip(self.combos.iter_mut()) {
            if b.get(p) {
                b.xor_assign(&r);
                c.xor_assign(&combo);
            }
        }
        self.vecs.push(r);
        self.combos.push(combo);
        self.pivots.push(p);
        Ok(())
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }
}
