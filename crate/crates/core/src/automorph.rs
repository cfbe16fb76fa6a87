//! Automorphisms of vertex-colored graphs by equitable refinement and
//! individualization–refinement search with orbit pruning.

use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::hash::{Hash, Hasher};
use std::time::Duration;
#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;

use crate::graph::{Graph, HamiltonianGraph};

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchResult {
    pub generators: Vec<Vec<usize>>,
    /// True iff the whole tree was explored.
    pub complete: bool,
    pub nodes: u64,
}

/// What the caller wants after each new generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Ordered partition; cells are contiguous ranges of `elems`.
#[derive(Clone, Debug)]
pub struct Coloring {
    elems: Vec<usize>,
    pos: Vec<usize>,
    /// Start index of the cell containing each vertex.
    cell: Vec<usize>,
    /// Length of the cell starting at each index (valid at starts only).
    len: Vec<usize>,
}

impl Coloring {
    /// Cells grouped by color, in ascending color order.
    pub fn from_colors(colors: &[usize]) -> Self {
        let v = colors.len();
        let mut elems: Vec<usize> = (0..v).collect();
        elems.sort_by_key(|&x| (colors[x], x));
        let mut c = Coloring {
            pos: vec![0; v],
            cell: vec![0; v],
            len: vec![0; v],
            elems,
        };
        let mut start = 0;
        for i in 0..v {
            c.pos[c.elems[i]] = i;
            if i > 0 && colors[c.elems[i]] != colors[c.elems[i - 1]] {
                c.len[start] = i - start;
                start = i;
            }
            c.cell[c.elems[i]] = start;
        }
        if v > 0 {
            c.len[start] = v - start;
        }
        c
    }

    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.elems.len() {
            let l = self.len[i];
            out.push(self.elems[i..i + l].to_vec());
            i += l;
        }
        out
    }

    fn cell_starts(&self) -> impl Iterator<Item = usize> + '_ {
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.elems.len() {
                return None;
            }
            let s = i;
            i += self.len[s];
            Some(s)
        })
    }

    pub fn is_discrete(&self) -> bool {
        self.cell_starts().all(|s| self.len[s] == 1)
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in self.cell_starts() {
            let l = self.len[s];
            if l > 1 && best.is_none_or(|b| l < self.len[b]) {
                best = Some(s);
            }
        }
        best
    }

    /// Puts `v` into a singleton cell at the front of its cell.
    fn individualize(&mut self, v: usize) -> usize {
        let s = self.cell[v];
        let l = self.len[s];
        let p = self.pos[v];
        let w = self.elems[s];
        self.elems.swap(s, p);
        self.pos[w] = p;
        self.pos[v] = s;
        self.len[s] = 1;
        self.len[s + 1] = l - 1;
        for i in s + 1..s + l {
            self.cell[self.elems[i]] = s + 1;
        }
        s
    }
}

/// Equitable refinement with a Hopcroft-style splitter queue. Returns a hash
/// of the refinement trace, which is identical for nodes related by an
/// automorphism.
fn refine_from(g: &Graph, c: &mut Coloring, queue: &mut VecDeque<usize>, in_queue: &mut [bool]) -> u64 {
    let v = g.order();
    let mut h = DefaultHasher::new();
    let mut count = vec![0usize; v];
    let mut touched: Vec<usize> = Vec::new();
    let mut touched_cells: Vec<usize> = Vec::new();
    let mut cell_mark = vec![false; v];
    while let Some(ws) = queue.pop_front() {
        in_queue[ws] = false;
        let wl = c.len[ws];
        (ws, wl).hash(&mut h);
        for i in ws..ws + wl {
            let w = c.elems[i];
            for &u in &g.adj[w] {
                if count[u] == 0 {
                    touched.push(u);
                }
                count[u] += 1;
                let cs = c.cell[u];
                if !cell_mark[cs] {
                    cell_mark[cs] = true;
                    touched_cells.push(cs);
                }
            }
        }
        touched_cells.sort_unstable();
        for &xs in &touched_cells {
            cell_mark[xs] = false;
            let xl = c.len[xs];
            if xl == 1 {
                (xs, count[c.elems[xs]]).hash(&mut h);
                continue;
            }
            let members = &mut c.elems[xs..xs + xl];
            members.sort_by_key(|&x| count[x]);
            let first = count[members[0]];
            let last = count[members[xl - 1]];
            if first == last {
                (xs, first).hash(&mut h);
                continue;
            }
            // Split into runs of equal count.
            let mut pieces: Vec<(usize, usize)> = Vec::new();
            let mut s = xs;
            for i in xs..xs + xl {
                c.pos[c.elems[i]] = i;
                if i > xs && count[c.elems[i]] != count[c.elems[i - 1]] {
                    pieces.push((s, i - s));
                    s = i;
                }
            }
            pieces.push((s, xs + xl - s));
            for &(ps, pl) in &pieces {
                c.len[ps] = pl;
                for i in ps..ps + pl {
                    c.cell[c.elems[i]] = ps;
                }
                (ps, pl, count[c.elems[ps]]).hash(&mut h);
            }
            if in_queue[xs] {
                for &(ps, _) in &pieces[1..] {
                    in_queue[ps] = true;
                    queue.push_back(ps);
                }
            } else {
                let big = pieces
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1 .1.cmp(&b.1 .1).then(b.0.cmp(&a.0)))
                    .map(|(k, _)| k)
                    .unwrap();
                for (k, &(ps, _)) in pieces.iter().enumerate() {
                    if k != big {
                        in_queue[ps] = true;
                        queue.push_back(ps);
                    }
                }
            }
        }
        for &u in &touched {
            count[u] = 0;
        }
        touched.clear();
        touched_cells.clear();
    }
    // Cell-size profile is part of the invariant.
    for s in c.cell_starts() {
        c.len[s].hash(&mut h);
    }
    h.finish()
}

/// Coarsest equitable refinement of `coloring`.
pub fn refine(g: &Graph, coloring: &Coloring) -> Coloring {
    let mut c = coloring.clone();
    let mut in_queue = vec![false; g.order()];
    let mut queue: VecDeque<usize> = c.cell_starts().collect();
    for &s in &queue {
        in_queue[s] = true;
    }
    refine_from(g, &mut c, &mut queue, &mut in_queue);
    c
}

fn individualize_refine(g: &Graph, c: &Coloring, v: usize) -> (Coloring, u64) {
    let mut c = c.clone();
    let s = c.individualize(v);
    let mut in_queue = vec![false; g.order()];
    in_queue[s] = true;
    let mut queue = VecDeque::from([s]);
    let h = refine_from(g, &mut c, &mut queue, &mut in_queue);
    (c, h)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Wall clock for the time budget; browsers have no `Instant`, so there
/// only the node budget applies.
struct Clock(#[cfg(not(target_arch = "wasm32"))] Instant);

impl Clock {
    fn start() -> Self {
        #[cfg(not(target_arch = "wasm32"))]
        return Clock(Instant::now());
        #[cfg(target_arch = "wasm32")]
        return Clock();
    }

    #[allow(unused_variables)]
    fn exceeded(&self, limit: Duration) -> bool {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed() >= limit;
        #[cfg(target_arch = "wasm32")]
        return false;
    }
}

struct Search<'a> {
    g: &'a Graph,
    budget: SearchBudget,
    start: Clock,
    nodes: u64,
    out_of_budget: bool,
    /// Leaf of the first path.
    zeta: Vec<usize>,
    /// Trace hash at each depth of the first path.
    traces: Vec<u64>,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes >= self.budget.max_nodes
            || (self.nodes % 256 == 0 && self.start.exceeded(self.budget.max_time))
        {
            self.out_of_budget = true;
        }
        !self.out_of_budget
    }

    /// Depth-first search below `c` (at `depth`) for a leaf equivalent to ζ.
    fn find_equivalent(&mut self, c: &Coloring, depth: usize) -> Option<Vec<usize>> {
        let Some(t) = c.target_cell() else {
            let mut perm = vec![0; self.g.order()];
            for (i, &z) in self.zeta.iter().enumerate() {
                perm[z] = c.elems[i];
            }
            return self.g.is_automorphism(&perm).then_some(perm);
        };
        let mut cell: Vec<usize> = c.elems[t..t + c.len[t]].to_vec();
        cell.sort_unstable();
        for w in cell {
            if !self.tick() {
                return None;
            }
            let (child, h) = individualize_refine(self.g, c, w);
            if self.traces.get(depth + 1) != Some(&h) {
                continue;
            }
            if let Some(p) = self.find_equivalent(&child, depth + 1) {
                return Some(p);
            }
            if self.out_of_budget {
                return None;
            }
        }
        None
    }
}

/// Generators of the automorphism group, reported through `on_gen` as they
/// are found. The callback may stop the search early.
pub fn search_automorphisms_with(
    g: &Graph,
    budget: SearchBudget,
    mut on_gen: impl FnMut(&[usize]) -> Control,
) -> SearchResult {
    let v = g.order();
    let mut result = SearchResult {
        complete: true,
        ..Default::default()
    };
    if v == 0 {
        return result;
    }
    let root = Coloring::from_colors(&g.colors);
    let mut in_queue = vec![false; v];
    let mut queue: VecDeque<usize> = root.cell_starts().collect();
    for &s in &queue {
        in_queue[s] = true;
    }
    let mut root = root;
    let h0 = refine_from(g, &mut root, &mut queue, &mut in_queue);

    // First path: always individualize the smallest vertex id of the target cell.
    let mut path = vec![root];
    let mut traces = vec![h0];
    let mut chosen = Vec::new();
    while let Some(t) = path.last().unwrap().target_cell() {
        let c = path.last().unwrap();
        let v0 = *c.elems[t..t + c.len[t]].iter().min().unwrap();
        let (child, h) = individualize_refine(g, c, v0);
        chosen.push((t, v0));
        path.push(child);
        traces.push(h);
    }
    let zeta = path.last().unwrap().elems.clone();
    let mut s = Search {
        g,
        budget,
        start: Clock::start(),
        nodes: path.len() as u64,
        out_of_budget: false,
        zeta,
        traces,
    };
    let mut orbits = UnionFind::new(v);

    'levels: for d in (0..chosen.len()).rev() {
        let (t, v0) = chosen[d];
        let node = &path[d];
        let mut cell: Vec<usize> = node.elems[t..t + node.len[t]].to_vec();
        cell.sort_unstable();
        let mut failed: Vec<usize> = Vec::new();
        for w in cell {
            if w == v0 || orbits.find(w) == orbits.find(v0) {
                continue;
            }
            if failed.iter().any(|&f| orbits.find(f) == orbits.find(w)) {
                continue;
            }
            if !s.tick() {
                break 'levels;
            }
            let (child, h) = individualize_refine(g, node, w);
            let found = if s.traces[d + 1] == h {
                s.find_equivalent(&child, d + 1)
            } else {
                None
            };
            if s.out_of_budget {
                break 'levels;
            }
            match found {
                Some(perm) => {
                    for (a, &b) in perm.iter().enumerate() {
                        orbits.union(a, b);
                    }
                    let stop = on_gen(&perm) == Control::Stop;
                    result.generators.push(perm);
                    if stop {
                        result.complete = false;
                        result.nodes = s.nodes;
                        return result;
                    }
                }
                None => failed.push(w),
            }
        }
    }
    result.complete = !s.out_of_budget;
    result.nodes = s.nodes;
    result
}

pub fn search_automorphisms(g: &Graph, budget: SearchBudget) -> SearchResult {
    search_automorphisms_with(g, budget, |_| Control::Continue)
}

/// Row permutation induced on the term vertices.
pub fn restrict_to_terms(perm: &[usize], hg: &HamiltonianGraph) -> Vec<usize> {
    perm[..hg.n_terms].to_vec()
}
