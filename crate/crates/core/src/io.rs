//! JSON file formats.
//!
//! Everything the command-line pipeline reads or writes goes through the
//! types here, so other tools can produce and check the same files.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::circuit::{circuit_symplectic, CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::exploit::ExploitPlan;
use crate::extract::CandidateSymmetry;
use crate::pauli::{HamiltonianTableau, PauliTerm, C64};
use crate::qcost::MinimizedSymmetry;
use crate::qudit::{QuditHamiltonian, QuditTerm};
use crate::sector::{ExploitTree, Leaf};
use crate::symplectic::{CliffordTableau, SymplecticMatrix};

/// Parses JSON, reporting the line and column of the first problem.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: [f64; 2],
    /// Phase relative to the letter string, in units of `i`.
    pub eta: u8,
    pub pauli: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl HamiltonianJson {
    pub fn from_tableau(h: &HamiltonianTableau) -> Self {
        let terms = h
            .terms
            .iter()
            .map(|t| TermJson {
                c: pair(t.c),
                eta: t.label_eta(),
                pauli: t.p.letters(),
            })
            .collect();
        Self {
            n: h.n,
            terms,
            provenance: None,
        }
    }

    pub fn to_tableau(&self) -> Result<HamiltonianTableau> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            if t.pauli.chars().count() != self.n {
                return Err(Error::Parse(format!(
                    "term {i}: Pauli string has length {}, expected {}",
                    t.pauli.chars().count(),
                    self.n
                )));
            }
            if t.eta > 3 {
                return Err(Error::Parse(format!("term {i}: eta must be in 0..=3")));
            }
            let term = PauliTerm::from_label(C64::new(t.c[0], t.c[1]), t.eta, &t.pauli)
                .map_err(|e| Error::Parse(format!("term {i}: {e}")))?;
            terms.push(term);
        }
        HamiltonianTableau::from_terms(self.n, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticJson {
    pub n: usize,
    pub rows: Vec<String>,
    pub phi: Vec<u8>,
}

impl SymplecticJson {
    pub fn from_tableau(t: &CliffordTableau) -> Self {
        Self {
            n: t.s.n,
            rows: t.s.row_strings(),
            phi: t.phi.clone(),
        }
    }

    pub fn to_tableau(&self) -> Result<CliffordTableau> {
        let s = rows_to_symplectic(self.n, &self.rows)?;
        if self.phi.len() != 2 * self.n || self.phi.iter().any(|&p| p > 3) {
            return Err(Error::Parse(format!("phi needs {} entries in 0..=3", 2 * self.n)));
        }
        Ok(CliffordTableau { s, phi: self.phi.clone() })
    }
}

fn rows_to_symplectic(n: usize, rows: &[String]) -> Result<SymplecticMatrix> {
    if rows.len() != 2 * n || rows.iter().any(|r| r.len() != 2 * n) {
        return Err(Error::Parse(format!("expected {0} rows of {0} bits", 2 * n)));
    }
    let r: Vec<&str> = rows.iter().map(String::as_str).collect();
    SymplecticMatrix::from_strs(&r)
}

pub fn circuit_from_gates(n: usize, gates: &[Gate]) -> Result<CliffordCircuit> {
    CliffordCircuit::from_gates(n, gates.to_vec()).map_err(|e| Error::Parse(format!("circuit: {e}")))
}

/// One verified symmetry, optionally with its minimized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub pi: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<String>,
    pub phi: Vec<u8>,
    pub circuit: Vec<Gate>,
    pub verified: bool,
    pub qubit_cost: usize,
    #[serde(rename = "B_circuit", default, skip_serializing_if = "Option::is_none")]
    pub b_circuit: Option<Vec<Gate>>,
    #[serde(rename = "S_min", default, skip_serializing_if = "Option::is_none")]
    pub s_min: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<usize>>>,
}

impl SymmetryReport {
    pub fn new(sym: &CandidateSymmetry) -> Self {
        let t = circuit_symplectic(&sym.circuit);
        Self {
            pi: sym.pi.clone(),
            s: t.s.row_strings(),
            phi: t.phi,
            circuit: sym.circuit.gates.clone(),
            verified: sym.verified,
            qubit_cost: crate::qcost::qubit_cost(&sym.s, &[]).qubit_cost,
            b_circuit: None,
            s_min: None,
            blocks: None,
        }
    }

    pub fn with_minimized(mut self, m: &MinimizedSymmetry) -> Self {
        self.qubit_cost = m.structure.qubit_cost;
        self.b_circuit = Some(m.b_circuit.gates.clone());
        self.s_min = Some(m.s_min.s.row_strings());
        self.blocks = Some(m.structure.blocks.clone());
        self
    }

    pub fn candidate(&self, n: usize) -> Result<CandidateSymmetry> {
        let circuit = circuit_from_gates(n, &self.circuit)?;
        let s = rows_to_symplectic(n, &self.s)?;
        Ok(CandidateSymmetry {
            pi: self.pi.clone(),
            s,
            circuit,
            verified: self.verified,
        })
    }

    /// Support size of the term permutation.
    pub fn moved(&self) -> usize {
        self.pi.iter().enumerate().filter(|(i, p)| i != *p).count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub generators: usize,
    pub rejected: std::collections::BTreeMap<String, usize>,
    pub complete: bool,
    pub nodes: u64,
    pub graph_vertices: usize,
    pub graph_aux: usize,
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub qubits: Vec<usize>,
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedJson {
    pub source: usize,
    pub qubits: Vec<usize>,
    pub circuit: Vec<Gate>,
    pub blocks: Vec<BlockJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelJson {
    pub path: Vec<usize>,
    pub lambdas: Vec<[f64; 2]>,
    pub degeneracies: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuditTermJson {
    pub c: [f64; 2],
    pub exponents: Vec<[u32; 2]>,
}

/// One sector's effective Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafJson {
    pub site_dims: Vec<usize>,
    pub terms: Vec<QuditTermJson>,
    pub path: Vec<usize>,
}

impl LeafJson {
    pub fn from_leaf(l: &Leaf) -> Self {
        Self {
            site_dims: l.ham.site_dims.clone(),
            terms: l
                .ham
                .terms
                .iter()
                .map(|t| QuditTermJson {
                    c: pair(t.c),
                    exponents: t.exps.iter().map(|&(a, b)| [a, b]).collect(),
                })
                .collect(),
            path: l.path.clone(),
        }
    }

    pub fn to_qudit(&self) -> Result<QuditHamiltonian> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            if t.exponents.len() != self.site_dims.len() {
                return Err(Error::Parse(format!("term {i}: wrong number of exponent pairs")));
            }
            terms.push(QuditTerm {
                c: C64::new(t.c[0], t.c[1]),
                exps: t.exponents.iter().map(|e| (e[0], e[1])).collect(),
            });
        }
        Ok(QuditHamiltonian {
            site_dims: self.site_dims.clone(),
            terms,
        })
    }
}

/// The λ tree plus where each leaf is stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(rename = "B_circuit")]
    pub b_circuit: Vec<Gate>,
    pub symmetries: Vec<PlannedJson>,
    pub levels: Vec<LevelJson>,
    pub leaves: Vec<ManifestLeaf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestLeaf {
    pub file: String,
    pub path: Vec<usize>,
    pub lambdas: Vec<[f64; 2]>,
    pub site_dims: Vec<usize>,
}

pub fn leaf_file_name(path: &[usize]) -> String {
    let p: Vec<String> = path.iter().map(usize::to_string).collect();
    format!("leaf_{}.json", if p.is_empty() { "root".into() } else { p.join("_") })
}

impl Manifest {
    pub fn new(plan: &ExploitPlan, tree: &ExploitTree) -> Self {
        let symmetries = plan
            .symmetries
            .iter()
            .map(|s| PlannedJson {
                source: s.source,
                qubits: s.qubits.clone(),
                circuit: s.circuit.gates.clone(),
                blocks: s
                    .blocks
                    .iter()
                    .map(|b| BlockJson {
                        qubits: b.qubits.clone(),
                        eigenvalues: b.values.iter().map(|&v| pair(v)).collect(),
                    })
                    .collect(),
            })
            .collect();
        let levels = tree
            .levels
            .iter()
            .map(|l| LevelJson {
                path: l.path.clone(),
                lambdas: l.lambdas.iter().map(|&v| pair(v)).collect(),
                degeneracies: l.degeneracies.clone(),
            })
            .collect();
        let leaves = tree
            .leaves
            .iter()
            .map(|l| ManifestLeaf {
                file: leaf_file_name(&l.path),
                path: l.path.clone(),
                lambdas: l.lambdas.iter().map(|&v| pair(v)).collect(),
                site_dims: l.ham.site_dims.clone(),
            })
            .collect();
        Self {
            b_circuit: plan.frame.b_circuit.gates.clone(),
            symmetries,
            levels,
            leaves,
        }
    }
}

/// What flows between pipeline stages: the Hamiltonian plus whatever the
/// earlier stages produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineDoc {
    pub hamiltonian: HamiltonianJson,
    #[serde(default)]
    pub symmetries: Vec<SymmetryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploit: Option<ExploitJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploitJson {
    pub manifest: Manifest,
    /// Inline leaves when no output directory was given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leaves: Vec<LeafJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
}

impl PipelineDoc {
    /// Accepts either a bare Hamiltonian file or a pipeline document.
    pub fn parse(text: &str) -> Result<Self> {
        let v: serde_json::Value = parse_json(text)?;
        if v.get("hamiltonian").is_some() {
            parse_json(text)
        } else {
            Ok(Self {
                hamiltonian: parse_json(text)?,
                symmetries: Vec::new(),
                search: None,
                exploit: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gen_xxz_plaquette_ladder;

    #[test]
    fn hamiltonian_round_trip_keeps_phases() {
        let mut h = HamiltonianTableau::new(2);
        h.push_label(C64::new(1.0, 0.0), "YI").unwrap();
        h.push_label(C64::new(-0.5, 0.25), "XZ").unwrap();
        h.terms[1].eta = 3;
        let j = HamiltonianJson::from_tableau(&h);
        assert_eq!(j.terms[0].eta, 0);
        let text = to_json(&j);
        let back: HamiltonianJson = parse_json(&text).unwrap();
        assert_eq!(back.to_tableau().unwrap(), h);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = parse_json::<HamiltonianJson>("{\n  \"n\": 2,\n  \"terms\": [\n    {\"c\": [1.0]}\n  ]\n}").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let bad = HamiltonianJson {
            n: 3,
            terms: vec![TermJson {
                c: [1.0, 0.0],
                eta: 0,
                pauli: "XX".into(),
            }],
            provenance: None,
        };
        assert!(bad.to_tableau().is_err());
    }

    #[test]
    fn gate_and_symplectic_formats() {
        let text = r#"[{"g":"H","q":0},{"g":"CX","c":0,"t":1},{"g":"S","q":1},{"g":"X","q":0},{"g":"Z","q":1},{"g":"SWAP","a":0,"b":1}]"#;
        let gates: Vec<Gate> = parse_json(text).unwrap();
        let c = circuit_from_gates(2, &gates).unwrap();
        assert_eq!(serde_json::to_string(&c.gates).unwrap(), text);
        let t = circuit_symplectic(&c);
        let j = SymplecticJson::from_tableau(&t);
        assert_eq!(j.rows.len(), 4);
        assert_eq!(parse_json::<SymplecticJson>(&to_json(&j)).unwrap().to_tableau().unwrap(), t);
    }

    #[test]
    fn pipeline_doc_accepts_bare_hamiltonian() {
        let h = gen_xxz_plaquette_ladder(3, 1.0, 0.5).unwrap();
        let text = to_json(&HamiltonianJson::from_tableau(&h));
        let doc = PipelineDoc::parse(&text).unwrap();
        assert!(doc.symmetries.is_empty());
        assert_eq!(doc.hamiltonian.to_tableau().unwrap(), h);
        let again = PipelineDoc::parse(&to_json(&doc)).unwrap();
        assert_eq!(again, doc);
    }
}
