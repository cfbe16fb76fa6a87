//! End-to-end exploitation: choose symmetries, move to their common frame,
//! split into sectors, and solve the pieces.

use crate::circuit::{circuit_symplectic, CliffordCircuit};
use crate::dense::{apply_circuit_vec, evolve, ground_state, QubitOp, SPARSE_CAP};
use crate::error::Result;
use crate::extract::CandidateSymmetry;
use crate::pauli::{HamiltonianTableau, C64, COEFF_TOL};
use crate::qcost::{as_blockwise, group_blocks, minimize_qubit_cost, BlockGroup, MinimizedSymmetry};
use crate::qudit::QuditHamiltonian;
use crate::sector::{
    eigendecompose_block, exploit_recursively, lift_recursively, project_recursively, BlockEigensystem, ExploitTree,
    MAX_BLOCK_QUBITS, SECTOR_CAP,
};

pub const MAX_GROUP_QUBITS: usize = 8;

#[derive(Clone, Debug)]
pub struct ExploitConfig {
    pub max_block: usize,
    /// Largest symmetry group (in qubits) whose sectors are expanded; the
    /// effective Hamiltonian of a `g`-qubit group can have `~4^g` terms.
    pub max_group: usize,
    pub sector_cap: usize,
    pub tol: f64,
}

impl Default for ExploitConfig {
    fn default() -> Self {
        Self {
            max_block: MAX_BLOCK_QUBITS,
            max_group: MAX_GROUP_QUBITS,
            sector_cap: SECTOR_CAP,
            tol: COEFF_TOL,
        }
    }
}

/// One independent symmetry in the chosen frame.
#[derive(Clone, Debug)]
pub struct PlannedSymmetry {
    /// Index of the symmetry it came from.
    pub source: usize,
    pub qubits: Vec<usize>,
    pub circuit: CliffordCircuit,
    pub blocks: Vec<BlockEigensystem>,
}

#[derive(Clone, Debug)]
pub struct ExploitPlan {
    pub n: usize,
    /// Index of the symmetry whose minimizing frame is used.
    pub chosen: Option<usize>,
    /// Frame change `B̂`; the Hamiltonian is studied as `B̂† H B̂`.
    pub frame: MinimizedSymmetry,
    pub h_sym: HamiltonianTableau,
    pub symmetries: Vec<PlannedSymmetry>,
}

impl ExploitPlan {
    pub fn b_circuit(&self) -> &CliffordCircuit {
        &self.frame.b_circuit
    }

    pub fn eigensystems(&self) -> Vec<Vec<BlockEigensystem>> {
        self.symmetries.iter().map(|s| s.blocks.clone()).collect()
    }
}

/// Groups that act nontrivially and fit the dense limits.
fn usable(groups: Vec<BlockGroup>, cfg: &ExploitConfig) -> Vec<BlockGroup> {
    groups
        .into_iter()
        .filter(|g| {
            let t = circuit_symplectic(&g.circuit);
            !(t.s.is_identity() && t.phi.iter().all(|&p| p == 0))
        })
        .filter(|g| g.qubits.len() <= cfg.max_block.min(cfg.max_group) && (1usize << g.qubits.len()) <= cfg.sector_cap)
        .collect()
}

fn planned(source: usize, min: &MinimizedSymmetry, g: &BlockGroup, cfg: &ExploitConfig) -> Result<PlannedSymmetry> {
    let mut blocks = Vec::with_capacity(g.blocks.len());
    for &bi in &g.blocks {
        let qs = &min.structure.blocks[bi];
        let local = min.block_circuit(qs).restrict_to(qs);
        blocks.push(eigendecompose_block(qs, &local, cfg.max_block)?);
    }
    Ok(PlannedSymmetry {
        source,
        qubits: g.qubits.clone(),
        circuit: g.circuit.clone(),
        blocks,
    })
}

/// Picks the symmetry whose minimized form has the smallest largest group,
/// preferring more covered qubits; then adds groups of the other symmetries
/// that live on still-free qubits of the same frame.
pub fn plan_exploit(h: &HamiltonianTableau, syms: &[CandidateSymmetry], cfg: &ExploitConfig) -> Result<ExploitPlan> {
    let n = h.n;
    let mut best: Option<((usize, isize), usize, MinimizedSymmetry, Vec<BlockGroup>, HamiltonianTableau)> = None;
    for (i, sym) in syms.iter().enumerate() {
        let t = circuit_symplectic(&sym.circuit);
        let min = minimize_qubit_cost(&t.s, &t.phi)?;
        let hs = min.transform(h)?;
        let groups = usable(group_blocks(&hs, &min, cfg.tol)?, cfg);
        if groups.is_empty() {
            continue;
        }
        let largest = groups.iter().map(|g| g.qubits.len()).max().unwrap_or(0);
        let covered: usize = groups.iter().map(|g| g.qubits.len()).sum();
        let score = (largest, -(covered as isize));
        if best.as_ref().map_or(true, |b| score < b.0) {
            best = Some((score, i, min, groups, hs));
        }
    }
    let Some((_, chosen, frame, groups, h_sym)) = best else {
        return Ok(ExploitPlan {
            n,
            chosen: None,
            frame: as_blockwise(&crate::symplectic::CliffordTableau::identity(n))?,
            h_sym: h.clone(),
            symmetries: Vec::new(),
        });
    };
    let mut taken = vec![false; n];
    let mut symmetries = Vec::new();
    for g in &groups {
        g.qubits.iter().for_each(|&q| taken[q] = true);
        symmetries.push(planned(chosen, &frame, g, cfg)?);
    }
    let back = frame.b_circuit.inverse();
    for (i, sym) in syms.iter().enumerate() {
        if i == chosen {
            continue;
        }
        // B̂† T̂ B̂
        let c = frame.b_circuit.then(&sym.circuit).then(&back);
        let other = as_blockwise(&circuit_symplectic(&c))?;
        for g in usable(group_blocks(&h_sym, &other, cfg.tol)?, cfg) {
            if g.qubits.iter().any(|&q| taken[q]) {
                continue;
            }
            g.qubits.iter().for_each(|&q| taken[q] = true);
            symmetries.push(planned(i, &other, &g, cfg)?);
        }
    }
    Ok(ExploitPlan {
        n,
        chosen: Some(chosen),
        frame,
        h_sym,
        symmetries,
    })
}

/// Effective Hamiltonians of every sector combination.
pub fn exploit(plan: &ExploitPlan, cfg: &ExploitConfig) -> Result<ExploitTree> {
    exploit_recursively(&QuditHamiltonian::from_qubits(&plan.h_sym), &plan.eigensystems(), cfg.sector_cap)
}

pub fn plain_ground_energy(h: &HamiltonianTableau) -> Result<f64> {
    Ok(ground_state(&QubitOp::new(h, SPARSE_CAP)?))
}

/// Lowest energy over all leaves, solving one leaf at a time.
pub fn exploited_ground_energy(tree: &ExploitTree) -> f64 {
    tree.leaves
        .iter()
        .map(|l| ground_state(&l.ham.compile()))
        .fold(f64::INFINITY, f64::min)
}

pub fn plain_evolve(h: &HamiltonianTableau, psi: &[C64], t: f64, tol: f64) -> Result<Vec<C64>> {
    Ok(evolve(&QubitOp::new(h, SPARSE_CAP)?, psi, t, tol))
}

/// `e^{−iHt} ψ` computed sector by sector in the symmetry frame.
pub fn exploited_evolve(
    plan: &ExploitPlan,
    tree: &ExploitTree,
    cfg: &ExploitConfig,
    psi: &[C64],
    t: f64,
    tol: f64,
) -> Result<Vec<C64>> {
    let syms = plan.eigensystems();
    let dims = vec![2; plan.n];
    let mut phi = psi.to_vec();
    apply_circuit_vec(&plan.frame.b_circuit.inverse(), &mut phi);
    let parts = project_recursively(&phi, &dims, &syms, cfg.sector_cap)?;
    drop(phi);
    let evolved: Vec<Vec<C64>> = parts
        .iter()
        .zip(&tree.leaves)
        .map(|(p, leaf)| {
            if p.iter().all(|c| c.norm() == 0.0) {
                return p.clone();
            }
            let op = leaf.ham.compile();
            evolve(&op, p, t, tol)
        })
        .collect();
    drop(parts);
    let mut out = lift_recursively(&evolved, &dims, &syms, cfg.sector_cap)?;
    apply_circuit_vec(&plan.frame.b_circuit, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{fidelity, haar_state};
    use crate::find::{find_symmetries, FindConfig};
    use crate::models::{gen_tfi_ladder, gen_xxz_plaquette_ladder};

    fn run(h: &HamiltonianTableau) -> (ExploitPlan, ExploitTree) {
        let cfg = ExploitConfig::default();
        let rep = find_symmetries(h, &FindConfig::default());
        let plan = plan_exploit(h, &rep.symmetries, &cfg).unwrap();
        let tree = exploit(&plan, &cfg).unwrap();
        (plan, tree)
    }

    #[test]
    fn xxz_six_sites_leaf_shape() {
        let h = gen_xxz_plaquette_ladder(3, 1.0, 0.5).unwrap();
        let (plan, tree) = run(&h);
        assert_eq!(plan.symmetries.len(), 3);
        assert_eq!(tree.leaves.len(), 8);
        let mut qutrits: Vec<usize> = tree
            .leaves
            .iter()
            .map(|l| l.ham.site_dims.iter().filter(|&&d| d == 3).count())
            .collect();
        qutrits.sort_unstable();
        assert_eq!(qutrits, vec![0, 1, 1, 1, 2, 2, 2, 3]);
        let total: usize = tree.leaves.iter().map(|l| l.ham.dim()).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn ground_energy_and_evolution_agree() {
        for h in [gen_tfi_ladder(3, 1.0, 0.8).unwrap(), gen_xxz_plaquette_ladder(3, 1.0, 0.5).unwrap()] {
            let (plan, tree) = run(&h);
            assert!(!plan.symmetries.is_empty());
            let e0 = plain_ground_energy(&h).unwrap();
            let e1 = exploited_ground_energy(&tree);
            assert!((e0 - e1).abs() < 1e-8, "{e0} vs {e1}");
            let psi = haar_state(1 << h.n, 4);
            let a = plain_evolve(&h, &psi, 0.7, 1e-12).unwrap();
            let b = exploited_evolve(&plan, &tree, &ExploitConfig::default(), &psi, 0.7, 1e-12).unwrap();
            assert!((1.0 - fidelity(&a, &b)).abs() < 1e-8);
        }
    }
}
