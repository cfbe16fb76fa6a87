use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cliffsym"))
}

fn run(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cliffsym-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn xxz_pipeline_verifies_densely() {
    let model = run(&["model", "xxz", "--L", "3"], b"");
    assert_eq!(code(&model), 0);
    let m = json(&model);
    assert_eq!(m["n"], 6);
    assert_eq!(m["provenance"]["family"], "xxz");

    let mut stage = model.stdout;
    for args in [&["find"][..], &["minimize"], &["exploit"]] {
        let o = run(args, &stage);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        stage = o.stdout;
    }
    let doc: serde_json::Value = serde_json::from_slice(&stage).unwrap();
    assert_eq!(doc["exploit"]["leaves"].as_array().unwrap().len(), 8);
    assert!(doc["symmetries"][0]["B_circuit"].is_array());

    let v = run(&["verify", "--dense"], &stage);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stdout));
    let rep = json(&v);
    assert_eq!(rep["ok"], true);
    let names: Vec<&str> = rep["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"exploit.spectrum"));
    assert!(names.iter().any(|n| n.ends_with(".dense")));
}

#[test]
fn find_ranks_by_qubit_cost() {
    let model = run(&["model", "xxz", "--L", "3"], b"");
    let f = json(&run(&["find"], &model.stdout));
    let syms = f["symmetries"].as_array().unwrap();
    assert!(syms.len() >= 3);
    for s in syms {
        assert_eq!(s["verified"], true);
        assert!(s["S"].as_array().unwrap().len() == 12);
    }
    let m = json(&run(&["minimize"], &serde_json::to_vec(&f).unwrap()));
    let costs: Vec<u64> = m["symmetries"].as_array().unwrap().iter().map(|s| s["qubit_cost"].as_u64().unwrap()).collect();
    assert!(costs.windows(2).all(|w| w[0] <= w[1]), "{costs:?}");
}

#[test]
fn sector_directory_round_trip() {
    let dir = scratch("sectors");
    let doc_path = dir.join("doc.json");
    let sectors = dir.join("sectors");
    let model = run(&["model", "xxz", "--L", "3"], b"");
    let found = run(&["find"], &model.stdout);
    let o = run(
        &["exploit", "--sector-dir", sectors.to_str().unwrap(), "--out", doc_path.to_str().unwrap()],
        &found.stdout,
    );
    assert_eq!(code(&o), 0);
    assert!(sectors.join("manifest.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sectors.join("manifest.json")).unwrap()).unwrap();
    let leaves = manifest["leaves"].as_array().unwrap();
    assert_eq!(leaves.len(), 8);
    for l in leaves {
        let leaf: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(sectors.join(l["file"].as_str().unwrap())).unwrap()).unwrap();
        assert_eq!(leaf["site_dims"], l["site_dims"]);
        assert!(leaf["terms"][0]["exponents"].is_array());
    }
    let v = run(&["verify", "--dense", "--input", doc_path.to_str().unwrap()], b"");
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stdout));
}

#[test]
fn single_term_has_no_symmetry() {
    let o = run(&["find"], br#"{"n": 2, "terms": [{"c": [1, 0], "eta": 0, "pauli": "XZ"}]}"#);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["symmetries"].as_array().unwrap().len(), 0);
}

#[test]
fn malformed_input_reports_line() {
    let o = run(&["find"], b"{\"n\": 2,\n \"terms\": [\n  {\"c\": [1]}\n ]}");
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = run(&["find"], br#"{"n": 3, "terms": [{"c": [1, 0], "eta": 0, "pauli": "XZ"}]}"#);
    assert_eq!(code(&o), 2);
    let o = run(&["find", "--circuits", "sometimes"], br#"{"n": 1, "terms": []}"#);
    assert_eq!(code(&o), 2);
}

#[test]
fn exhausted_budget_is_reported() {
    let model = run(&["model", "random-swap", "--n", "8"], b"");
    let o = run(&["find", "--budget-nodes", "1"], &model.stdout);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["search"]["complete"], false);
}

#[test]
fn outputs_are_deterministic() {
    let model = run(&["model", "random-swap", "--n", "10", "--seed", "7"], b"");
    let a = run(&["find"], &model.stdout);
    let b = run(&["find"], &model.stdout);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let ea = run(&["exploit"], &run(&["minimize"], &a.stdout).stdout);
    let eb = run(&["exploit"], &run(&["minimize"], &b.stdout).stdout);
    assert_eq!(ea.stdout, eb.stdout);
}

#[test]
fn bench_prints_csv_with_fit() {
    let o = run(&["bench", "--model", "random-swap", "--sizes", "20,40,80"], b"");
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,n,method,seconds,peak_bytes,result"));
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("random-swap,")).collect();
    assert_eq!(rows.len(), 6);
    assert!(text.contains("# slope find"));
    assert!(text.contains("# slope gram"));
}
