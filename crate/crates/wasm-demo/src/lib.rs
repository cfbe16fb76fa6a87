//! Browser bindings. Every function takes and returns JSON strings so the
//! page needs no generated glue beyond the plain exports.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use cliffsym::circuit::circuit_symplectic;
use cliffsym::dense::{dense_qudit, dense_tableau, spectrum, DENSE_CAP};
use cliffsym::exploit::{exploit, plan_exploit, ExploitConfig};
use cliffsym::find::{find_symmetries, FindConfig};
use cliffsym::io::{parse_json, HamiltonianJson, SymmetryReport};
use cliffsym::models::ModelSpec;
use cliffsym::qcost::{minimize_qubit_cost, qubit_cost};
use cliffsym::{canonicalize, HamiltonianTableau, C64};

/// Browsers have no wall clock for the search; keep it small.
const NODE_BUDGET: u64 = 200_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load(text: &str) -> Result<HamiltonianTableau, String> {
    let j: HamiltonianJson = parse_json(text).map_err(err)?;
    Ok(canonicalize(&j.to_tableau().map_err(err)?))
}

fn find_cfg() -> FindConfig {
    let mut cfg = FindConfig::default();
    cfg.budget.max_nodes = NODE_BUDGET;
    cfg
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

/// Model Hamiltonian as JSON. `size` is the ladder/chain length, or the
/// qubit count for `random-swap`.
#[wasm_bindgen]
pub fn model(family: &str, size: usize, seed: u64) -> Result<String, String> {
    let spec = match family {
        "tfi" => ModelSpec::Tfi { l: size, j: 1.0, h: 0.5 },
        "xxz" => ModelSpec::Xxz {
            l: size,
            j: 1.0,
            delta: 0.5,
        },
        "hubbard" => ModelSpec::Hubbard { l: size, t: 1.0, u: 4.0 },
        "tv" => ModelSpec::Tv {
            l: size,
            t: 1.0,
            v: 1.0,
            w: 0.5,
            seed,
        },
        "random-swap" => ModelSpec::RandomSwap { n: size, seed },
        f => return Err(format!("unknown model family '{f}'")),
    };
    let h = spec.build().map_err(err)?;
    let mut j = HamiltonianJson::from_tableau(&h);
    j.provenance = serde_json::to_value(&spec).ok();
    serde_json::to_string_pretty(&j).map_err(err)
}

/// Finds symmetries and minimizes each one; reports qubit costs and blocks.
#[wasm_bindgen]
pub fn symmetries(hamiltonian: &str) -> Result<String, String> {
    let h = load(hamiltonian)?;
    let rep = find_symmetries(&h, &find_cfg());
    let mut out = Vec::new();
    for sym in &rep.symmetries {
        let t = circuit_symplectic(&sym.circuit);
        let min = minimize_qubit_cost(&t.s, &t.phi).map_err(err)?;
        let r = SymmetryReport::new(sym);
        out.push(json!({
            "moved_terms": r.moved(),
            "gates": sym.circuit.len(),
            "qubit_cost_before": qubit_cost(&sym.s, &[]).qubit_cost,
            "qubit_cost": min.structure.qubit_cost,
            "blocks": min.structure.blocks,
            "B_gates": min.b_circuit.len(),
            "report": r.with_minimized(&min),
        }));
    }
    serde_json::to_string_pretty(&json!({
        "n": h.n,
        "terms": h.len(),
        "complete": rep.complete,
        "nodes": rep.nodes,
        "symmetries": out,
    }))
    .map_err(err)
}

/// Splits into sectors and returns each leaf's spectrum next to the full one.
#[wasm_bindgen]
pub fn sectors(hamiltonian: &str) -> Result<String, String> {
    let h = load(hamiltonian)?;
    if (1usize << h.n.min(63)) > DENSE_CAP {
        return Err(format!("{} qubits is too many for the dense comparison", h.n));
    }
    let cfg = ExploitConfig::default();
    let syms = find_symmetries(&h, &find_cfg()).symmetries;
    let plan = plan_exploit(&h, &syms, &cfg).map_err(err)?;
    let tree = exploit(&plan, &cfg).map_err(err)?;
    let mut leaves = Vec::new();
    let mut union = Vec::new();
    for l in &tree.leaves {
        let sp = spectrum(&dense_qudit(&l.ham, DENSE_CAP).map_err(err)?);
        union.extend_from_slice(&sp);
        leaves.push(json!({
            "path": l.path,
            "lambdas": l.lambdas.iter().map(|&v| pair(v)).collect::<Vec<_>>(),
            "site_dims": l.ham.site_dims,
            "terms": l.ham.terms.len(),
            "spectrum": sp,
        }));
    }
    union.sort_by(f64::total_cmp);
    let full = spectrum(&dense_tableau(&h, DENSE_CAP).map_err(err)?);
    let diff = union.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let groups: Vec<Value> = plan
        .symmetries
        .iter()
        .map(|s| json!({"source": s.source, "qubits": s.qubits}))
        .collect();
    serde_json::to_string_pretty(&json!({
        "n": h.n,
        "groups": groups,
        "leaves": leaves,
        "full_spectrum": full,
        "max_spectrum_difference": if union.len() == full.len() { diff } else { f64::INFINITY },
    }))
    .map_err(err)
}
