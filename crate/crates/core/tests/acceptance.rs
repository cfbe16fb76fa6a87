//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Runs without the libtest harness so the lines
//! are always visible.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cliffsym::automorph::{search_automorphisms, SearchBudget};
use cliffsym::bench::{loglog_slope, PeakAlloc};
use cliffsym::dense::{
    check_invariance, dense_circuit, dense_qudit, dense_tableau, fidelity, haar_state, max_abs_diff, spectrum,
    DENSE_CAP,
};
use cliffsym::exploit::{
    exploit, exploited_evolve, exploited_ground_energy, plain_evolve, plain_ground_energy, plan_exploit,
    ExploitConfig,
};
use cliffsym::find::{find_symmetries, FindConfig};
use cliffsym::graph::Graph;
use cliffsym::models::{gen_random_injected_swap, gen_tfi_ladder, gen_xxz_plaquette_ladder};
use cliffsym::qcost::minimize_qubit_cost;
use cliffsym::sector::{effective_hamiltonian, eigendecompose_block, enumerate_sectors, MAX_BLOCK_QUBITS, SECTOR_CAP};
use cliffsym::symplectic::{random_symplectic, SymplecticMatrix};
use cliffsym::{
    apply_clifford, canonicalize, circuit_symplectic, gram_matrix, random_clifford, synthesize, HamiltonianTableau,
    PauliTerm, PauliVector, C64,
};

#[global_allocator]
static ALLOC: PeakAlloc = PeakAlloc::new();

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: &[(&str, bool)], extra: String) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() {
        extra
    } else {
        format!("failed: {}; {extra}", failed.join(", "))
    };
    Outcome {
        pass: failed.is_empty(),
        detail,
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// ---------------------------------------------------------------------------

/// Two-qubit worked example: Y⊗I and X⊗Y (coefficient 1) swapped by the
/// symmetry, I⊗Y (coefficient 2) fixed.
fn worked_example() -> Outcome {
    let t0 = Instant::now();
    let h = HamiltonianTableau::from_labels(2, &[(1.0, "YI"), (1.0, "XY"), (2.0, "IY")]).unwrap();
    let rep = find_symmetries(&h, &FindConfig::default());
    let Some(sym) = rep.symmetries.iter().find(|s| s.verified && !s.is_trivial()) else {
        return outcome(&[("symmetry found", false)], String::new());
    };
    let t = circuit_symplectic(&sym.circuit);
    let min = minimize_qubit_cost(&t.s, &t.phi).unwrap();
    let q = min.structure.qubit_cost;

    let blocks: Vec<_> = min
        .structure
        .blocks
        .iter()
        .map(|qs| eigendecompose_block(qs, &min.block_circuit(qs).restrict_to(qs), MAX_BLOCK_QUBITS).unwrap())
        .collect();
    // λ11 = (i−1)/√2, λ12 = −λ11 on one block; λ21 = 1, λ22 = −1 on the
    // other. A tableau fixes each block only up to a global phase.
    let l11 = c(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let expected = [vec![l11, -l11], vec![c(1.0, 0.0), c(-1.0, 0.0)]];
    let matches = |vals: &[C64], want: &[C64]| {
        vals.len() == want.len() && {
            let ph = vals[0] / want[0];
            (ph.norm() - 1.0).abs() < 1e-10
                && want.iter().all(|&w| vals.iter().any(|&v| (v - w * ph).norm() < 1e-10))
        }
    };
    let lambdas_ok = blocks.len() == 2
        && ((matches(&blocks[0].values, &expected[0]) && matches(&blocks[1].values, &expected[1]))
            || (matches(&blocks[0].values, &expected[1]) && matches(&blocks[1].values, &expected[0])));

    let hs = min.transform(&h).unwrap();
    let sectors = enumerate_sectors(&blocks, SECTOR_CAP).unwrap();
    let split_ok = sectors.len() == 2
        && sectors.iter().all(|s| s.d == 2)
        && matches(&[sectors[0].lambda, sectors[1].lambda], &[l11, -l11]);
    let effective: Vec<_> = sectors.iter().map(|s| effective_hamiltonian(&hs, &blocks, s).unwrap()).collect();
    let mut sector_spectra: Vec<Vec<f64>> =
        effective.iter().map(|e| spectrum(&dense_qudit(e, DENSE_CAP).unwrap())).collect();
    sector_spectra.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let union = sorted(sector_spectra.concat());
    let full = spectrum(&dense_tableau(&h, DENSE_CAP).unwrap());
    let dense_ok = max_gap(&union, &full) < 1e-10;

    // Printed one-qubit tableaus: √2·I + √2·X ± 2·Y.
    let printed = |sign: f64| {
        HamiltonianTableau::from_labels(1, &[(SQRT_2, "I"), (SQRT_2, "X"), (2.0 * sign, "Y")]).unwrap()
    };
    let mut printed_spectra: Vec<Vec<f64>> =
        [1.0, -1.0].iter().map(|&s| spectrum(&dense_tableau(&printed(s), DENSE_CAP).unwrap())).collect();
    printed_spectra.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let printed_ok = sector_spectra.len() == 2
        && sector_spectra.iter().zip(&printed_spectra).all(|(a, b)| max_gap(a, b) < 1e-10);
    let want_mags = [SQRT_2, SQRT_2, 2.0];
    let mags_ok = effective.iter().all(|e| {
        let mags = sorted(e.terms.iter().map(|t| t.c.norm()).collect());
        max_gap(&mags, &want_mags) < 1e-10
    });
    let secs = t0.elapsed().as_secs_f64();

    let block_values: Vec<Vec<String>> = blocks
        .iter()
        .map(|b| b.values.iter().map(|v| format!("{:.3}{:+.3}i", v.re, v.im)).collect())
        .collect();
    let mags: Vec<String> = effective
        .iter()
        .map(|e| format!("{:?}", sorted(e.terms.iter().map(|t| (t.c.norm() * 1e6).round() / 1e6).collect())))
        .collect();
    outcome(
        &[
            ("verified symmetry", sym.verified),
            ("Q(S_min)=1", q == 1),
            ("block eigenvalues", lambdas_ok),
            ("sector split", split_ok),
            ("leaf spectra = dense spectrum", dense_ok),
            ("spectra = printed tableaus", printed_ok),
            ("magnitudes {√2,√2,2}", mags_ok),
            ("runtime < 1 s", secs < 1.0),
        ],
        format!(
            "Q={q}, block eigenvalues {block_values:?}, sector spectra {sector_spectra:.4?} vs printed {printed_spectra:.4?}, magnitudes {mags:?}, {secs:.3} s"
        ),
    )
}

// ---------------------------------------------------------------------------

/// Reversal of the ladder columns, identity inside each rung.
fn rung_reversal(l: usize) -> Vec<usize> {
    (0..2 * l).map(|i| 2 * (l - 1 - i / 2) + i % 2).collect()
}

/// `[[Π, 0], [1, Π]]` in either orientation of the row convention.
fn has_tfi_structure(s: &SymplecticMatrix, l: usize) -> bool {
    let n = 2 * l;
    let pi = rung_reversal(l);
    let perm_ok = (0..n).all(|i| {
        (0..n).all(|j| s.m.get(i, j) == (pi[i] == j) && s.m.get(n + i, n + j) == (pi[i] == j))
    });
    let block = |r0: usize, c0: usize, v: bool| (0..n).all(|i| (0..n).all(|j| s.m.get(r0 + i, c0 + j) == v));
    perm_ok && ((block(n, 0, true) && block(0, n, false)) || (block(0, n, true) && block(n, 0, false)))
}

fn tfi_ladder() -> Outcome {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut notes = Vec::new();
    for l in [3, 5, 8] {
        let t0 = Instant::now();
        let h = gen_tfi_ladder(l, 1.0, 0.5).unwrap();
        let rep = find_symmetries(&h, &FindConfig::default());
        let mut structured = false;
        let mut q2 = false;
        let mut worst = 0.0f64;
        for sym in rep.symmetries.iter().filter(|s| s.verified && !s.is_trivial()) {
            structured |= has_tfi_structure(&sym.s, l);
            let t = circuit_symplectic(&sym.circuit);
            q2 |= minimize_qubit_cost(&t.s, &t.phi).unwrap().structure.qubit_cost == 2;
            if h.n <= 12 {
                worst = worst.max(check_invariance(&h, &sym.circuit, DENSE_CAP).unwrap());
            }
        }
        let secs = t0.elapsed().as_secs_f64();
        checks.push((format!("L={l} symmetry"), structured || q2));
        checks.push((format!("L={l} dense"), worst < 1e-10));
        checks.push((format!("L={l} < 60 s"), secs < 60.0));
        notes.push(format!(
            "L={l}: {} syms, S_TFI form {structured}, Q=2 {q2}, dense {worst:.1e}, {secs:.2} s",
            rep.symmetries.len()
        ));
    }
    let refs: Vec<(&str, bool)> = checks.iter().map(|(a, b)| (a.as_str(), *b)).collect();
    outcome(&refs, notes.join("; "))
}

// ---------------------------------------------------------------------------

fn xxz_ladder() -> Outcome {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut notes = Vec::new();
    let cfg = ExploitConfig::default();
    for n in [6, 8, 10] {
        let h = gen_xxz_plaquette_ladder(n / 2, 1.0, 0.5).unwrap();
        let syms = find_symmetries(&h, &FindConfig::default()).symmetries;
        let plan = plan_exploit(&h, &syms, &cfg).unwrap();
        let tree = exploit(&plan, &cfg).unwrap();
        let mut qutrits: Vec<usize> = tree
            .leaves
            .iter()
            .map(|l| l.ham.site_dims.iter().filter(|&&d| d == 3).count())
            .collect();
        qutrits.sort_unstable();
        let union = sorted(
            tree.leaves
                .iter()
                .flat_map(|l| spectrum(&dense_qudit(&l.ham, DENSE_CAP).unwrap()))
                .collect(),
        );
        let full = spectrum(&dense_tableau(&h, DENSE_CAP).unwrap());
        let gap = max_gap(&union, &full);
        let small_d = tree.leaves.iter().all(|l| l.ham.site_dims.iter().all(|&d| d <= 3))
            && tree.levels.iter().all(|lv| lv.degeneracies.iter().all(|&d| d <= 3));
        checks.push((format!("n={n} leaves"), tree.leaves.len() == 1 << (n / 2)));
        checks.push((format!("n={n} largest leaf"), qutrits.last() == Some(&(n / 2))));
        checks.push((format!("n={n} spectra"), gap < 1e-8));
        checks.push((format!("n={n} d≤3"), small_d));
        if n == 6 {
            checks.push(("n=6 multiset".into(), qutrits == [0, 1, 1, 1, 2, 2, 2, 3]));
        }
        notes.push(format!("n={n}: {} leaves, qutrits {:?}, Δspec {gap:.1e}", tree.leaves.len(), qutrits));
    }
    let refs: Vec<(&str, bool)> = checks.iter().map(|(a, b)| (a.as_str(), *b)).collect();
    outcome(&refs, notes.join("; "))
}

// ---------------------------------------------------------------------------

fn random_swap() -> Outcome {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut notes = Vec::new();
    let mut worst = 0.0f64;
    for n in 4..=10 {
        let mut found = 0;
        let mut rejected: BTreeMap<&str, usize> = BTreeMap::new();
        for seed in 0..50 {
            let h = gen_random_injected_swap(n, seed).unwrap();
            let rep = find_symmetries(&h, &FindConfig::default());
            if rep.symmetries.iter().any(|s| s.verified && !s.is_trivial()) {
                found += 1;
            }
            for s in &rep.symmetries {
                worst = worst.max(check_invariance(&h, &s.circuit, DENSE_CAP).unwrap());
            }
            for (k, v) in rep.rejected {
                *rejected.entry(k).or_default() += v;
            }
        }
        checks.push((format!("n={n} ≥95%"), found * 100 >= 95 * 50));
        notes.push(format!("n={n} {found}/50 rejected {rejected:?}"));
    }
    checks.push(("dense < 1e-10".into(), worst < 1e-10));
    notes.push(format!("worst dense {worst:.1e}"));
    let refs: Vec<(&str, bool)> = checks.iter().map(|(a, b)| (a.as_str(), *b)).collect();
    outcome(&refs, notes.join("; "))
}

// ---------------------------------------------------------------------------

fn random_hamiltonian(n: usize, m: usize, rng: &mut ChaCha8Rng) -> HamiltonianTableau {
    let terms = (0..m)
        .map(|_| {
            let mut p = PauliVector::identity(n);
            for q in 0..n {
                p.x.set(q, rng.gen());
                p.z.set(q, rng.gen());
            }
            let coeff = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            PauliTerm::new(coeff, rng.gen_range(0..4), p)
        })
        .collect();
    HamiltonianTableau::from_terms(n, terms).unwrap()
}

fn group_order(v: usize, gens: &[Vec<usize>]) -> usize {
    let id: Vec<usize> = (0..v).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen.len()
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let symplectic = (0..1000).all(|_| {
        let n = rng.gen_range(1..=64);
        let s = random_symplectic(n, &mut rng);
        s.is_symplectic() && circuit_symplectic(&synthesize(&s).unwrap()).s == s
    });
    let conjugation = (0..200).all(|_| {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=12);
        let h = random_hamiltonian(n, m, &mut rng);
        let g = random_clifford(n, rng.gen());
        let u = dense_circuit(&g, DENSE_CAP).unwrap();
        let want = &u * dense_tableau(&h, DENSE_CAP).unwrap() * u.adjoint();
        let got = dense_tableau(&apply_clifford(&h, &g).unwrap(), DENSE_CAP).unwrap();
        max_abs_diff(&want, &got) < 1e-12
    });
    let gram = (0..200).all(|_| {
        let h = random_hamiltonian(rng.gen_range(1..=24), rng.gen_range(1..=40), &mut rng);
        let g = random_clifford(h.n, rng.gen());
        gram_matrix(&apply_clifford(&h, &g).unwrap()) == gram_matrix(&h)
    });
    let canonical = (0..200).all(|_| {
        let mut h = random_hamiltonian(rng.gen_range(1..=5), rng.gen_range(1..=20), &mut rng);
        let dup: Vec<PauliTerm> = h.terms.iter().step_by(2).cloned().collect();
        h.terms.extend(dup);
        let once = canonicalize(&h);
        canonicalize(&once) == once
            && max_abs_diff(&dense_tableau(&h, DENSE_CAP).unwrap(), &dense_tableau(&once, DENSE_CAP).unwrap()) < 1e-12
    });
    let automorphisms = (0..300).all(|_| {
        let v = rng.gen_range(1..=8);
        let colors = rng.gen_range(1..=3);
        let p_edge = rng.gen_range(0.1..0.9);
        let cols: Vec<usize> = (0..v).map(|_| rng.gen_range(0..colors)).collect();
        let edges: Vec<(usize, usize)> = (0..v).tuple_combinations().filter(|_| rng.gen_bool(p_edge)).collect();
        let g = Graph::new(cols, &edges);
        let brute = (0..v).permutations(v).filter(|p| g.is_automorphism(p)).count();
        let res = search_automorphisms(&g, SearchBudget::default());
        res.complete && res.generators.iter().all(|p| g.is_automorphism(p)) && group_order(v, &res.generators) == brute
    });
    outcome(
        &[
            ("(a) symplectic round trip", symplectic),
            ("(b) dense conjugation", conjugation),
            ("(c) gram invariance", gram),
            ("(d) canonicalize idempotent", canonical),
            ("(e) automorphism groups", automorphisms),
        ],
        "1000/200/200/200/300 cases".into(),
    )
}

// ---------------------------------------------------------------------------

fn scaling() -> Outcome {
    // Gram matrix cost against the number of terms.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ms = [300usize, 500, 800, 1200, 2000, 3000];
    let mut secs = Vec::new();
    for &m in &ms {
        let h = random_hamiltonian(64, m, &mut rng);
        let best = (0..7)
            .map(|_| {
                let t0 = Instant::now();
                std::hint::black_box(gram_matrix(&h));
                t0.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min);
        secs.push(best);
    }
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let slope = loglog_slope(&xs, &secs).unwrap_or(f64::NAN);

    let h = gen_random_injected_swap(500, 1).unwrap();
    let t0 = Instant::now();
    let rep = find_symmetries(&h, &FindConfig::default());
    let find_secs = t0.elapsed().as_secs_f64();
    let found_500 = rep.symmetries.iter().any(|s| s.verified && !s.is_trivial());

    // Plain vs exploited solvers.
    let cfg = ExploitConfig::default();
    let mut agree = true;
    let mut notes = Vec::new();
    let mut peaks = (0, 0);
    let cases = [
        ("tfi", 8, gen_tfi_ladder(4, 1.0, 0.5).unwrap()),
        ("xxz", 10, gen_xxz_plaquette_ladder(5, 1.0, 0.5).unwrap()),
        ("xxz", 14, gen_xxz_plaquette_ladder(7, 1.0, 0.5).unwrap()),
    ];
    for (name, n, h) in &cases {
        let (e0, p0) = ALLOC.measure(|| plain_ground_energy(h).unwrap());
        let ((e1, plan, tree), p1) = ALLOC.measure(|| {
            let syms = find_symmetries(h, &FindConfig::default()).symmetries;
            let plan = plan_exploit(h, &syms, &cfg).unwrap();
            let tree = exploit(&plan, &cfg).unwrap();
            (exploited_ground_energy(&tree), plan, tree)
        });
        let psi = haar_state(1 << n, 3);
        let a = plain_evolve(h, &psi, 1.0, 1e-12).unwrap();
        let b = exploited_evolve(&plan, &tree, &cfg, &psi, 1.0, 1e-12).unwrap();
        let f = fidelity(&a, &b);
        agree &= (e0 - e1).abs() < 1e-8 && (1.0 - f).abs() < 1e-8;
        notes.push(format!("{name} n={n}: ΔE {:.1e}, 1−F {:.1e}", (e0 - e1).abs(), (1.0 - f).abs()));
        peaks = (p0, p1);
    }
    notes.push(format!("peak plain {} B vs exploited {} B at n=14", peaks.0, peaks.1));
    outcome(
        &[
            ("gram slope 2.0±0.3", (slope - 2.0).abs() <= 0.3),
            ("n=500 find < 15 min", find_secs < 900.0 && found_500),
            ("energies and fidelities", agree),
            ("exploited peak < plain", peaks.1 < peaks.0),
        ],
        format!("gram slope {slope:.3}, n=500 find {find_secs:.1} s, {}", notes.join(", ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("1 worked two-qubit example", worked_example),
        ("2 TFI ladder", tfi_ladder),
        ("3 XXZ plaquette ladder", xxz_ladder),
        ("4 random injected SWAP", random_swap),
        ("5 property suite", properties),
        ("6 scaling", scaling),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let t0 = Instant::now();
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} criterion {name} ({:.1} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of 6 criteria passed", 6 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
