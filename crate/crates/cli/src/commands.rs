use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use serde::Serialize;

use cliffsym::automorph::SearchBudget;
use cliffsym::circuit::circuit_symplectic;
use cliffsym::dense::{check_invariance, dense_qudit, dense_tableau, spectrum};
use cliffsym::exploit::{exploit as run_exploit, plan_exploit, ExploitConfig, MAX_GROUP_QUBITS};
use cliffsym::extract::verify_symmetry;
use cliffsym::find::{find_symmetries, FindConfig};
use cliffsym::graph::CircuitPolicy;
use cliffsym::io::{
    circuit_from_gates, leaf_file_name, parse_json, to_json, ExploitJson, HamiltonianJson, LeafJson, Manifest,
    PipelineDoc, SearchStats, SymmetryReport,
};
use cliffsym::models::ModelSpec;
use cliffsym::qcost::{minimize_qubit_cost, qubit_cost};
use cliffsym::sector::{MAX_BLOCK_QUBITS, SECTOR_CAP};
use cliffsym::{canonicalize, Error, HamiltonianTableau};

use crate::Common;

pub const OK: i32 = 0;
pub const NO_SYMMETRY: i32 = 1;
pub const INVALID: i32 = 2;
pub const BUDGET: i32 = 3;
pub const CHECK_FAILED: i32 = 4;

/// Dense checks of invariance must hold to this accuracy.
const INVARIANCE_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self {
            code: INVALID,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DenseCap { .. } | Error::BlockTooLarge { .. } | Error::SectorCap { .. } => BUDGET,
            _ => INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::invalid(e.to_string())
    }
}

pub type CmdResult = Result<i32, CliError>;

pub fn read_input(c: &Common) -> Result<String, CliError> {
    let mut s = String::new();
    match &c.input {
        Some(p) => s = fs::read_to_string(p).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?,
        None => {
            std::io::stdin().read_to_string(&mut s)?;
        }
    }
    Ok(s)
}

pub fn emit_text(c: &Common, text: &str) -> Result<(), CliError> {
    match &c.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit<T: Serialize>(c: &Common, v: &T) -> Result<(), CliError> {
    emit_text(c, &to_json(v))
}

pub fn parse_policy(s: &str) -> Result<CircuitPolicy, CliError> {
    let bad = || CliError::invalid(format!("unknown circuit policy '{s}'"));
    let bound = |l: &str| l.parse::<usize>().map_err(|_| bad());
    match s.split_once(':') {
        None if s == "fundamental" => Ok(CircuitPolicy::Fundamental),
        None if s == "none" => Ok(CircuitPolicy::None),
        Some(("bounded", l)) => Ok(CircuitPolicy::Bounded(bound(l)?)),
        Some(("short", l)) => Ok(CircuitPolicy::Short(bound(l)?)),
        _ => Err(bad()),
    }
}

pub fn find_config(c: &Common) -> Result<FindConfig, CliError> {
    if !(c.budget_seconds > 0.0) || c.budget_nodes == 0 {
        return Err(CliError::invalid("budgets must be positive"));
    }
    Ok(FindConfig {
        policy: parse_policy(&c.circuits)?,
        budget: SearchBudget {
            max_nodes: c.budget_nodes,
            max_time: Duration::from_secs_f64(c.budget_seconds),
        },
        tol: c.tol,
        seed: c.seed,
        ..FindConfig::default()
    })
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// tfi | xxz | hubbard | tv | random-swap
    pub family: String,
    /// Ladder or chain length.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Qubit count (random-swap).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    /// Transverse field (tfi).
    #[arg(long = "h", default_value_t = 0.5)]
    pub h: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long = "t", default_value_t = 1.0)]
    pub t: f64,
    #[arg(long = "U", default_value_t = 4.0)]
    pub u: f64,
    #[arg(long = "V", default_value_t = 1.0)]
    pub v: f64,
    #[arg(long = "W", default_value_t = 0.5)]
    pub w: f64,
}

pub fn model_spec(a: &ModelArgs, seed: u64) -> Result<ModelSpec, CliError> {
    let need_l = || a.l.ok_or_else(|| CliError::invalid(format!("model {} needs --L", a.family)));
    Ok(match a.family.as_str() {
        "tfi" => ModelSpec::Tfi { l: need_l()?, j: a.j, h: a.h },
        "xxz" => ModelSpec::Xxz {
            l: need_l()?,
            j: a.j,
            delta: a.delta,
        },
        "hubbard" => ModelSpec::Hubbard { l: need_l()?, t: a.t, u: a.u },
        "tv" => ModelSpec::Tv {
            l: need_l()?,
            t: a.t,
            v: a.v,
            w: a.w,
            seed,
        },
        "random-swap" => ModelSpec::RandomSwap {
            n: a.n.ok_or_else(|| CliError::invalid("model random-swap needs --n"))?,
            seed,
        },
        f => return Err(CliError::invalid(format!("unknown model family '{f}'"))),
    })
}

pub fn model(c: &Common, a: &ModelArgs) -> CmdResult {
    let spec = model_spec(a, c.seed)?;
    let h = spec.build()?;
    let mut j = HamiltonianJson::from_tableau(&h);
    j.provenance = Some(serde_json::to_value(&spec).expect("model spec serializes"));
    emit(c, &j)?;
    Ok(OK)
}

fn load(c: &Common) -> Result<(PipelineDoc, HamiltonianTableau), CliError> {
    let doc = PipelineDoc::parse(&read_input(c)?)?;
    let h = doc.hamiltonian.to_tableau()?;
    Ok((doc, h))
}

#[derive(Args, Debug)]
pub struct FindArgs {
    /// Stop after this many verified symmetries (0 = all).
    #[arg(long, default_value_t = 0)]
    pub max_symmetries: usize,
}

pub fn find(c: &Common, a: &FindArgs) -> CmdResult {
    let (mut doc, h) = load(c)?;
    let h = canonicalize(&h);
    let cfg = FindConfig {
        max_symmetries: a.max_symmetries,
        ..find_config(c)?
    };
    let rep = find_symmetries(&h, &cfg);
    let mut ranked = Vec::with_capacity(rep.symmetries.len());
    for sym in &rep.symmetries {
        let t = circuit_symplectic(&sym.circuit);
        let q = minimize_qubit_cost(&t.s, &t.phi)?.structure.qubit_cost;
        let r = SymmetryReport::new(sym);
        ranked.push(((q, r.moved()), r));
    }
    // stable: ties keep discovery order
    ranked.sort_by_key(|(k, _)| *k);
    let provenance = doc.hamiltonian.provenance.take();
    doc.hamiltonian = HamiltonianJson {
        provenance,
        ..HamiltonianJson::from_tableau(&h)
    };
    doc.symmetries = ranked.into_iter().map(|(_, r)| r).collect();
    doc.search = Some(SearchStats {
        generators: rep.generators,
        rejected: rep.rejected.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        complete: rep.complete,
        nodes: rep.nodes,
        graph_vertices: rep.graph_vertices,
        graph_aux: rep.graph_aux,
        fallback: rep.fallback,
    });
    doc.exploit = None;
    emit(c, &doc)?;
    Ok(match (doc.symmetries.is_empty(), rep.complete) {
        (false, _) => OK,
        (true, true) => NO_SYMMETRY,
        (true, false) => BUDGET,
    })
}

pub fn minimize(c: &Common) -> CmdResult {
    let (mut doc, _) = load(c)?;
    let n = doc.hamiltonian.n;
    let mut out = Vec::with_capacity(doc.symmetries.len());
    for r in &doc.symmetries {
        let sym = r.candidate(n)?;
        let t = circuit_symplectic(&sym.circuit);
        let min = minimize_qubit_cost(&t.s, &t.phi)?;
        out.push(r.clone().with_minimized(&min));
    }
    doc.symmetries = out;
    emit(c, &doc)?;
    Ok(if doc.symmetries.is_empty() { NO_SYMMETRY } else { OK })
}

#[derive(Args, Debug)]
pub struct ExploitArgs {
    /// Largest block diagonalized densely.
    #[arg(long, default_value_t = MAX_BLOCK_QUBITS)]
    pub max_block: usize,
    /// Largest symmetry group, in qubits, whose sectors are expanded.
    #[arg(long, default_value_t = MAX_GROUP_QUBITS)]
    pub max_group: usize,
    /// Largest number of sector tuples enumerated per level.
    #[arg(long, default_value_t = SECTOR_CAP)]
    pub sector_cap: usize,
    /// Write one file per leaf plus manifest.json here instead of inlining.
    #[arg(long)]
    pub sector_dir: Option<PathBuf>,
}

pub fn exploit(c: &Common, a: &ExploitArgs) -> CmdResult {
    let (mut doc, h) = load(c)?;
    let n = h.n;
    let syms = doc
        .symmetries
        .iter()
        .map(|r| r.candidate(n))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = ExploitConfig {
        max_block: a.max_block,
        max_group: a.max_group,
        sector_cap: a.sector_cap,
        tol: c.tol,
    };
    let plan = plan_exploit(&h, &syms, &cfg)?;
    let tree = run_exploit(&plan, &cfg)?;
    let manifest = Manifest::new(&plan, &tree);
    let leaves: Vec<LeafJson> = tree.leaves.iter().map(LeafJson::from_leaf).collect();
    doc.exploit = Some(match &a.sector_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for l in &leaves {
                fs::write(dir.join(leaf_file_name(&l.path)), to_json(l))?;
            }
            fs::write(dir.join("manifest.json"), to_json(&manifest))?;
            ExploitJson {
                manifest,
                leaves: Vec::new(),
                directory: Some(dir.display().to_string()),
            }
        }
        None => ExploitJson {
            manifest,
            leaves,
            directory: None,
        },
    });
    emit(c, &doc)?;
    Ok(if plan.symmetries.is_empty() { NO_SYMMETRY } else { OK })
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Also run the dense oracle where the dimension allows.
    #[arg(long)]
    pub dense: bool,
}

#[derive(Serialize, Debug)]
struct Check {
    name: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    detail: String,
}

#[derive(Serialize, Debug)]
struct VerifyReport {
    ok: bool,
    checks: Vec<Check>,
}

fn check(name: impl Into<String>, ok: bool, value: Option<f64>, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        ok,
        value,
        detail: detail.into(),
    }
}

fn load_leaves(e: &ExploitJson, input: Option<&Path>) -> Result<Vec<LeafJson>, CliError> {
    let Some(dir) = &e.directory else { return Ok(e.leaves.clone()) };
    let mut dir = PathBuf::from(dir);
    if dir.is_relative() && !dir.exists() {
        if let Some(base) = input.and_then(Path::parent) {
            dir = base.join(dir);
        }
    }
    e.manifest
        .leaves
        .iter()
        .map(|m| {
            let p = dir.join(&m.file);
            let text = fs::read_to_string(&p).map_err(|err| CliError::invalid(format!("{}: {err}", p.display())))?;
            parse_json(&text).map_err(|err| CliError::invalid(format!("{}: {err}", p.display())))
        })
        .collect()
}

pub fn verify(c: &Common, a: &VerifyArgs) -> CmdResult {
    let (doc, h) = load(c)?;
    let n = h.n;
    let dense_ok = a.dense && 1usize.checked_shl(n as u32).is_some_and(|d| d <= c.dense_cap);
    let mut checks = Vec::new();
    if a.dense && !dense_ok {
        checks.push(check("dense", true, None, format!("skipped: 2^{n} exceeds dense cap {}", c.dense_cap)));
    }
    for (k, r) in doc.symmetries.iter().enumerate() {
        let sym = r.candidate(n)?;
        let t = circuit_symplectic(&sym.circuit);
        let tableau = verify_symmetry(&h, &sym.pi, &sym.circuit, c.tol);
        checks.push(check(
            format!("symmetry[{k}].tableau"),
            tableau.is_ok() && t.s.row_strings() == r.s && t.phi == r.phi,
            None,
            tableau.err().map(|e| e.to_string()).unwrap_or_default(),
        ));
        if dense_ok {
            let err = check_invariance(&h, &sym.circuit, c.dense_cap)?;
            checks.push(check(format!("symmetry[{k}].dense"), err < INVARIANCE_TOL, Some(err), ""));
        }
        if let (Some(bg), Some(s_min)) = (&r.b_circuit, &r.s_min) {
            let b = circuit_from_gates(n, bg)?;
            let want = circuit_symplectic(&b.then(&sym.circuit).then(&b.inverse()));
            let st = qubit_cost(&want.s, &want.phi);
            let before = qubit_cost(&sym.s, &[]).qubit_cost;
            let ok = &want.s.row_strings() == s_min
                && st.qubit_cost == r.qubit_cost
                && r.blocks.as_ref().is_none_or(|bl| *bl == st.blocks)
                && st.qubit_cost <= before;
            checks.push(check(
                format!("symmetry[{k}].minimized"),
                ok,
                Some(st.qubit_cost as f64),
                format!("Q {before} -> {}", st.qubit_cost),
            ));
        }
    }
    if let Some(e) = &doc.exploit {
        let leaves = load_leaves(e, c.input.as_deref())?;
        let total: usize = leaves.iter().map(|l| l.site_dims.iter().product::<usize>()).sum();
        checks.push(check(
            "exploit.dimensions",
            total == 1usize << n,
            Some(total as f64),
            format!("{} leaves", leaves.len()),
        ));
        if dense_ok {
            let mut parts = Vec::new();
            for l in &leaves {
                parts.extend(spectrum(&dense_qudit(&l.to_qudit()?, c.dense_cap)?));
            }
            parts.sort_by(f64::total_cmp);
            let full = spectrum(&dense_tableau(&h, c.dense_cap)?);
            let err = if parts.len() == full.len() {
                parts.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            checks.push(check("exploit.spectrum", err < SPECTRUM_TOL, Some(err), ""));
        }
    }
    let ok = checks.iter().all(|c| c.ok);
    emit(c, &VerifyReport { ok, checks })?;
    Ok(if ok { OK } else { CHECK_FAILED })
}
