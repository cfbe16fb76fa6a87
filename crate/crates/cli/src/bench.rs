use std::time::Instant;

use clap::Args;

use cliffsym::bench::{loglog_slope, BenchRow, PeakAlloc, CSV_HEADER};
use cliffsym::dense::{fidelity, haar_state};
use cliffsym::exploit::{
    exploit, exploited_evolve, exploited_ground_energy, plain_evolve, plain_ground_energy, plan_exploit,
    ExploitConfig,
};
use cliffsym::find::find_symmetries;
use cliffsym::gram_matrix;
use cliffsym::models::ModelSpec;

use crate::commands::{emit_text, find_config, model_spec, CliError, CmdResult, ModelArgs, OK};
use crate::Common;

const EVOLVE_TIME: f64 = 1.0;
const EVOLVE_TOL: f64 = 1e-12;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// tfi | xxz | hubbard | tv | random-swap
    #[arg(long)]
    pub model: String,
    /// Qubit counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Subset of: find, gram, plain-ground, exploited-ground, plain-evolve,
    /// exploited-evolve. Defaults to `find,gram` for random-swap and the
    /// four solver methods otherwise.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
}

/// Model whose qubit count is `n`.
fn spec_for(model: &str, n: usize, seed: u64) -> Result<ModelSpec, CliError> {
    let per_site = match model {
        "tfi" | "xxz" => 2,
        "hubbard" => 4,
        "tv" | "random-swap" => 1,
        m => return Err(CliError::invalid(format!("unknown model family '{m}'"))),
    };
    if n % per_site != 0 {
        return Err(CliError::invalid(format!("{model} needs n divisible by {per_site}")));
    }
    let args = ModelArgs {
        family: model.into(),
        l: Some(n / per_site),
        n: Some(n),
        j: 1.0,
        h: 0.5,
        delta: 0.5,
        t: 1.0,
        u: 4.0,
        v: 1.0,
        w: 0.5,
    };
    model_spec(&args, seed)
}

pub fn run(c: &Common, a: &BenchArgs, alloc: &PeakAlloc) -> CmdResult {
    let methods: Vec<String> = if !a.methods.is_empty() {
        a.methods.clone()
    } else if a.model == "random-swap" {
        vec!["find".into(), "gram".into()]
    } else {
        ["plain-ground", "exploited-ground", "plain-evolve", "exploited-evolve"]
            .map(String::from)
            .to_vec()
    };
    let fcfg = find_config(c)?;
    let ecfg = ExploitConfig {
        tol: c.tol,
        ..ExploitConfig::default()
    };
    let mut rows: Vec<BenchRow> = Vec::new();
    for &n in &a.sizes {
        let h = spec_for(&a.model, n, c.seed)?.build()?;
        let mut plain_state = None;
        for m in &methods {
            let t0 = Instant::now();
            let (result, peak) = match m.as_str() {
                "find" => {
                    let (r, p) = alloc.measure(|| find_symmetries(&h, &fcfg));
                    (format!("{}", r.symmetries.len()), p)
                }
                "gram" => {
                    let (g, p) = alloc.measure(|| gram_matrix(&h));
                    (format!("M={}", g.nrows()), p)
                }
                "plain-ground" => {
                    let (e, p) = alloc.measure(|| plain_ground_energy(&h));
                    (format!("{:.12}", e?), p)
                }
                "exploited-ground" => {
                    let (e, p) = alloc.measure(|| -> Result<f64, CliError> {
                        let syms = find_symmetries(&h, &fcfg).symmetries;
                        let plan = plan_exploit(&h, &syms, &ecfg)?;
                        Ok(exploited_ground_energy(&exploit(&plan, &ecfg)?))
                    });
                    (format!("{:.12}", e?), p)
                }
                "plain-evolve" => {
                    let psi = haar_state(1 << n, c.seed);
                    let (v, p) = alloc.measure(|| plain_evolve(&h, &psi, EVOLVE_TIME, EVOLVE_TOL));
                    plain_state = Some(v?);
                    ("1".into(), p)
                }
                "exploited-evolve" => {
                    let psi = haar_state(1 << n, c.seed);
                    let (v, p) = alloc.measure(|| -> Result<_, CliError> {
                        let syms = find_symmetries(&h, &fcfg).symmetries;
                        let plan = plan_exploit(&h, &syms, &ecfg)?;
                        let tree = exploit(&plan, &ecfg)?;
                        Ok(exploited_evolve(&plan, &tree, &ecfg, &psi, EVOLVE_TIME, EVOLVE_TOL)?)
                    });
                    let v = v?;
                    let f = plain_state.as_ref().map(|s| format!("{:.12}", fidelity(s, &v)));
                    (f.unwrap_or_else(|| "-".into()), p)
                }
                other => return Err(CliError::invalid(format!("unknown method '{other}'"))),
            };
            rows.push(BenchRow {
                model: a.model.clone(),
                n,
                method: m.clone(),
                seconds: t0.elapsed().as_secs_f64(),
                peak_bytes: peak,
                result,
            });
        }
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    for m in &methods {
        let pts: Vec<&BenchRow> = rows.iter().filter(|r| &r.method == m).collect();
        let xs: Vec<f64> = pts.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = pts.iter().map(|r| r.seconds).collect();
        if let Some(s) = loglog_slope(&xs, &ys) {
            out.push_str(&format!("# slope {m} seconds~n^{s:.3}\n"));
        }
    }
    emit_text(c, &out)?;
    Ok(OK)
}
