//! Symmetry search: graph automorphisms → verified Clifford symmetries.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorph::{search_automorphisms_with, Control, SearchBudget};
use crate::extract::{extract_symmetry, CandidateSymmetry, Reject};
use crate::graph::{hamiltonian_graph, CircuitPolicy};
use crate::pauli::{HamiltonianTableau, COEFF_TOL};

#[derive(Clone, Debug)]
pub struct FindConfig {
    pub policy: CircuitPolicy,
    pub budget: SearchBudget,
    pub tol: f64,
    /// Stop after this many verified symmetries (0 = no limit).
    pub max_symmetries: usize,
    /// Random group words tried when no generator verifies.
    pub random_words: usize,
    pub seed: u64,
}

impl Default for FindConfig {
    fn default() -> Self {
        Self {
            policy: CircuitPolicy::Short(3),
            budget: SearchBudget::default(),
            tol: COEFF_TOL,
            max_symmetries: 0,
            random_words: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct FindReport {
    pub symmetries: Vec<CandidateSymmetry>,
    pub generators: usize,
    /// Rejection counts keyed by reason.
    pub rejected: BTreeMap<&'static str, usize>,
    pub complete: bool,
    pub nodes: u64,
    pub graph_vertices: usize,
    pub graph_aux: usize,
    /// True when the result comes from the no-aux retry.
    pub fallback: bool,
}

impl FindReport {
    pub fn budget_exhausted(&self) -> bool {
        !self.complete && self.symmetries.is_empty()
    }
}

fn reason(r: &Reject) -> &'static str {
    match r {
        Reject::NotLinear { .. } => "not-linear",
        Reject::Parity { .. } => "parity",
        Reject::Insoluble => "insoluble",
        Reject::Mismatch { .. } => "mismatch",
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // first a, then b
    a.iter().map(|&x| b[x]).collect()
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

struct Collector<'a> {
    h: &'a HamiltonianTableau,
    tol: f64,
    seen: HashSet<Vec<usize>>,
    report: FindReport,
}

impl Collector<'_> {
    fn try_perm(&mut self, pi: Vec<usize>) -> bool {
        if is_identity(&pi) || !self.seen.insert(pi.clone()) {
            return false;
        }
        match extract_symmetry(self.h, &pi, self.tol) {
            Ok(c) => {
                self.report.symmetries.push(c);
                true
            }
            Err(r) => {
                *self.report.rejected.entry(reason(&r)).or_default() += 1;
                false
            }
        }
    }
}

/// Finds verified nontrivial Clifford symmetries of a canonical tableau.
///
/// If the configured circuit policy yields nothing, the search is repeated
/// on the graph without auxiliary vertices.
pub fn find_symmetries(h: &HamiltonianTableau, cfg: &FindConfig) -> FindReport {
    let first = find_with_policy(h, cfg, cfg.policy);
    if !first.symmetries.is_empty() || cfg.policy == CircuitPolicy::None {
        return first;
    }
    let mut second = find_with_policy(h, cfg, CircuitPolicy::None);
    for (k, v) in first.rejected {
        *second.rejected.entry(k).or_default() += v;
    }
    second.nodes += first.nodes;
    second.complete &= first.complete;
    second.fallback = true;
    second
}

fn find_with_policy(h: &HamiltonianTableau, cfg: &FindConfig, policy: CircuitPolicy) -> FindReport {
    let hg = hamiltonian_graph(h, policy, cfg.tol);
    let m = hg.n_terms;
    let mut col = Collector {
        h,
        tol: cfg.tol,
        seen: HashSet::new(),
        report: FindReport {
            graph_vertices: hg.graph.order(),
            graph_aux: hg.n_aux(),
            ..Default::default()
        },
    };
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let limit = cfg.max_symmetries;
    let res = search_automorphisms_with(&hg.graph, cfg.budget, |perm| {
        let pi = perm[..m].to_vec();
        gens.push(pi.clone());
        col.try_perm(pi);
        if limit > 0 && col.report.symmetries.len() >= limit {
            Control::Stop
        } else {
            Control::Continue
        }
    });
    col.report.generators = res.generators.len();
    col.report.nodes = res.nodes;
    col.report.complete = res.complete;

    // Generators need not lift even when other group elements do.
    if col.report.symmetries.is_empty() && gens.len() > 1 {
        'pairs: for a in 0..gens.len() {
            for b in 0..gens.len() {
                if a != b && col.try_perm(compose(&gens[a], &gens[b])) {
                    break 'pairs;
                }
            }
        }
    }
    if col.report.symmetries.is_empty() && !gens.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.random_words {
            let len = rng.gen_range(2..=6);
            let mut w: Vec<usize> = (0..m).collect();
            for _ in 0..len {
                w = compose(&w, &gens[rng.gen_range(0..gens.len())]);
            }
            if col.try_perm(w) {
                break;
            }
        }
    }
    col.report
}
