//! Colored commutation graph of a Hamiltonian tableau.
//!
//! Term vertices come first (in tableau order), then one auxiliary vertex
//! per linear dependency ("circuit") among the Pauli vectors.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::Error;
use crate::gf2::{BitMatrix, BitVec, RowBasis};
use crate::pauli::{coeff_eq, gram_matrix, HamiltonianTableau};

/// Which dependency circuits become auxiliary vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CircuitPolicy {
    /// Fundamental circuits w.r.t. the lowest-index row basis.
    #[default]
    Fundamental,
    /// Fundamental circuits plus every circuit with at most `L` rows.
    Bounded(usize),
    /// Only circuits with at most `L` rows. This set is defined without
    /// reference to a basis, so every symmetry maps it to itself.
    Short(usize),
    /// No auxiliary vertices.
    None,
}

impl FromStr for CircuitPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("unknown circuit policy {s:?}"));
        match s {
            "fundamental" => Ok(Self::Fundamental),
            "none" => Ok(Self::None),
            _ => {
                let (kind, l) = s.split_once(':').ok_or_else(bad)?;
                let l: usize = l.parse().map_err(|_| bad())?;
                match kind {
                    "bounded" => Ok(Self::Bounded(l)),
                    "short" => Ok(Self::Short(l)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl std::fmt::Display for CircuitPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Fundamental => write!(f, "fundamental"),
            Self::Bounded(l) => write!(f, "bounded:{l}"),
            Self::Short(l) => write!(f, "short:{l}"),
            Self::None => write!(f, "none"),
        }
    }
}

/// Circuits as sorted row-index lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CircuitSet {
    pub circuits: Vec<Vec<usize>>,
}

/// Coefficient classes, numbered in `(Re, Im)` order of their representatives.
pub fn coefficient_colors(h: &HamiltonianTableau, tol: f64) -> Vec<usize> {
    let mut reps: Vec<crate::pauli::C64> = Vec::new();
    let mut class = Vec::with_capacity(h.terms.len());
    for t in &h.terms {
        match reps.iter().position(|&r| coeff_eq(r, t.c, tol)) {
            Some(k) => class.push(k),
            None => {
                class.push(reps.len());
                reps.push(t.c);
            }
        }
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| {
        (reps[a].re, reps[a].im)
            .partial_cmp(&(reps[b].re, reps[b].im))
            .unwrap()
    });
    let mut rank = vec![0; reps.len()];
    for (r, &k) in order.iter().enumerate() {
        rank[k] = r;
    }
    class.into_iter().map(|k| rank[k]).collect()
}

fn fundamental(h: &HamiltonianTableau) -> Vec<Vec<usize>> {
    let m = h.terms.len();
    let mut basis = RowBasis::new(2 * h.n, m);
    let mut out = Vec::new();
    for (i, t) in h.terms.iter().enumerate() {
        if let Err(combo) = basis.insert(&t.p.to_vec(), i) {
            let mut c: Vec<usize> = combo.iter_ones().collect();
            c.push(i);
            c.sort_unstable();
            out.push(c);
        }
    }
    out
}

/// All circuits with at most `max_len` rows. Sums of `(k−1)`-subsets are
/// matched against a row lookup, then minimality is checked by rank.
fn short_circuits(h: &HamiltonianTableau, max_len: usize) -> Vec<Vec<usize>> {
    let vecs: Vec<BitVec> = h.terms.iter().map(|t| t.p.to_vec()).collect();
    let m = vecs.len();
    let mut by_vec: HashMap<&BitVec, usize> = HashMap::new();
    for (i, v) in vecs.iter().enumerate() {
        by_vec.entry(v).or_insert(i);
    }
    let mut out = Vec::new();
    for (i, v) in vecs.iter().enumerate() {
        if v.is_zero() {
            out.push(vec![i]);
        }
    }
    if max_len < 2 {
        return out;
    }
    // Canonical rows are distinct, so no circuit has exactly two elements.
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        acc: &BitVec,
        stack: &mut Vec<usize>,
        max_len: usize,
        vecs: &[BitVec],
        by_vec: &HashMap<&BitVec, usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if stack.len() >= 2 {
            if let Some(&j) = by_vec.get(acc) {
                if j > *stack.last().unwrap() {
                    let mut c = stack.clone();
                    c.push(j);
                    if is_minimal(&c, vecs) {
                        out.push(c);
                    }
                }
            }
        }
        if stack.len() + 1 >= max_len {
            return;
        }
        for i in start..vecs.len() {
            if vecs[i].is_zero() {
                continue;
            }
            stack.push(i);
            let next = acc.xor(&vecs[i]);
            rec(i + 1, &next, stack, max_len, vecs, by_vec, out);
            stack.pop();
        }
    }
    if m > 0 {
        let zero = BitVec::zeros(vecs[0].len());
        rec(0, &zero, &mut stack, max_len, &vecs, &by_vec, &mut out);
    }
    out
}

fn is_minimal(c: &[usize], vecs: &[BitVec]) -> bool {
    // A zero-sum set is a circuit iff dropping any element leaves it independent.
    let rows: Vec<BitVec> = c[1..].iter().map(|&i| vecs[i].clone()).collect();
    let dim = vecs[0].len();
    BitMatrix::from_rows(dim, rows).rank() == c.len() - 1
}

pub fn find_circuits(h: &HamiltonianTableau, policy: CircuitPolicy) -> CircuitSet {
    let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
    match policy {
        CircuitPolicy::Fundamental => set.extend(fundamental(h)),
        CircuitPolicy::Bounded(l) => {
            set.extend(fundamental(h));
            set.extend(short_circuits(h, l));
        }
        CircuitPolicy::Short(l) => set.extend(short_circuits(h, l)),
        CircuitPolicy::None => {}
    }
    CircuitSet {
        circuits: set.into_iter().collect(),
    }
}

/// Plain undirected vertex-colored graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub colors: Vec<usize>,
    pub adj: Vec<Vec<usize>>,
    bits: BitMatrix,
}

impl Graph {
    pub fn new(colors: Vec<usize>, edges: &[(usize, usize)]) -> Self {
        let v = colors.len();
        let mut adj = vec![Vec::new(); v];
        let mut bits = BitMatrix::zeros(v, v);
        for &(a, b) in edges {
            assert!(a != b, "self loops are not supported");
            if !bits.get(a, b) {
                bits.set(a, b, true);
                bits.set(b, a, true);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Self { colors, adj, bits }
    }

    pub fn order(&self) -> usize {
        self.colors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.bits.get(a, b)
    }

    /// True iff `perm` preserves colors and adjacency.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        perm.len() == self.order()
            && (0..self.order()).all(|v| self.colors[v] == self.colors[perm[v]])
            && (0..self.order()).all(|v| {
                self.adj[v].len() == self.adj[perm[v]].len()
                    && self.adj[v].iter().all(|&u| self.has_edge(perm[v], perm[u]))
            })
    }

    /// DIMACS-like text: `p edge V E`, `n v color` lines, `e u v` lines (1-based).
    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p edge {} {}", self.order(), self.edge_count());
        for (v, c) in self.colors.iter().enumerate() {
            let _ = writeln!(s, "n {} {}", v + 1, c);
        }
        for (a, l) in self.adj.iter().enumerate() {
            for &b in l.iter().filter(|&&b| b > a) {
                let _ = writeln!(s, "e {} {}", a + 1, b + 1);
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianGraph {
    pub graph: Graph,
    pub n_terms: usize,
    pub circuits: CircuitSet,
}

impl HamiltonianGraph {
    pub fn n_aux(&self) -> usize {
        self.graph.order() - self.n_terms
    }
}

pub fn build_graph(h: &HamiltonianTableau, colors: &[usize], circuits: &CircuitSet) -> HamiltonianGraph {
    let m = h.terms.len();
    assert_eq!(colors.len(), m);
    let gram = gram_matrix(h);
    let mut edges = Vec::new();
    for i in 0..m {
        for j in gram.row(i).iter_ones().filter(|&j| j > i) {
            edges.push((i, j));
        }
    }
    let aux_color = colors.iter().copied().max().map_or(0, |c| c + 1);
    let mut all_colors = colors.to_vec();
    for (k, c) in circuits.circuits.iter().enumerate() {
        all_colors.push(aux_color);
        for &i in c {
            edges.push((i, m + k));
        }
    }
    HamiltonianGraph {
        graph: Graph::new(all_colors, &edges),
        n_terms: m,
        circuits: circuits.clone(),
    }
}

/// Colors, circuits and graph in one call.
pub fn hamiltonian_graph(h: &HamiltonianTableau, policy: CircuitPolicy, tol: f64) -> HamiltonianGraph {
    let colors = coefficient_colors(h, tol);
    let circuits = find_circuits(h, policy);
    build_graph(h, &colors, &circuits)
}
