//! Benchmark Hamiltonians.
//!
//! Ladders use column-major site numbering `i = 2c + r` (column `c`,
//! row `r ∈ {0, 1}`). Fermionic models use Jordan–Wigner with mode index
//! `2·site + σ` (spin-interleaved) and `n = (I − Z)/2`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::apply_clifford;
use crate::error::{Error, Result};
use crate::pauli::{canonicalize, HamiltonianTableau, PauliTerm, PauliVector, C64};
use crate::synth::random_clifford;

/// Which model to build, with its couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelSpec {
    Tfi { l: usize, j: f64, h: f64 },
    Xxz { l: usize, j: f64, delta: f64 },
    Hubbard { l: usize, t: f64, u: f64 },
    Tv { l: usize, t: f64, v: f64, w: f64, seed: u64 },
    RandomSwap { n: usize, seed: u64 },
}

impl ModelSpec {
    pub fn build(&self) -> Result<HamiltonianTableau> {
        match *self {
            ModelSpec::Tfi { l, j, h } => gen_tfi_ladder(l, j, h),
            ModelSpec::Xxz { l, j, delta } => gen_xxz_plaquette_ladder(l, j, delta),
            ModelSpec::Hubbard { l, t, u } => gen_hubbard_ladder(l, t, u),
            ModelSpec::Tv { l, t, v, w, seed } => gen_tv_chain(l, t, v, w, seed),
            ModelSpec::RandomSwap { n, seed } => gen_random_injected_swap(n, seed),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Tfi { .. } => "tfi",
            ModelSpec::Xxz { .. } => "xxz",
            ModelSpec::Hubbard { .. } => "hubbard",
            ModelSpec::Tv { .. } => "tv",
            ModelSpec::RandomSwap { .. } => "random-swap",
        }
    }
}

fn real(c: f64) -> C64 {
    C64::new(c, 0.0)
}

/// Term from `(qubit, letter)` pairs.
fn term(n: usize, c: f64, ops: &[(usize, char)]) -> PauliTerm {
    let mut label = vec!['I'; n];
    for &(q, l) in ops {
        label[q] = l;
    }
    let s: String = label.into_iter().collect();
    PauliTerm::from_label(real(c), 0, &s).expect("letters are valid")
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invalid(msg.into()))
    }
}

/// Ladder bonds: rungs `(2c, 2c+1)` and legs `(2c+r, 2c+2+r)`.
fn ladder_bonds(l: usize) -> Vec<(usize, usize)> {
    let mut b = Vec::new();
    for c in 0..l {
        b.push((2 * c, 2 * c + 1));
    }
    for c in 0..l.saturating_sub(1) {
        for r in 0..2 {
            b.push((2 * c + r, 2 * c + 2 + r));
        }
    }
    b
}

pub fn gen_tfi_ladder(l: usize, j: f64, h: f64) -> Result<HamiltonianTableau> {
    need(l >= 2, "TFI ladder needs L >= 2")?;
    let n = 2 * l;
    let mut terms: Vec<PauliTerm> = ladder_bonds(l)
        .into_iter()
        .map(|(a, b)| term(n, j, &[(a, 'Z'), (b, 'Z')]))
        .collect();
    terms.extend((0..n).map(|i| term(n, h, &[(i, 'X')])));
    Ok(canonicalize(&HamiltonianTableau::from_terms(n, terms)?))
}

/// Pairs coupled in the plaquette ladder: both rungs of every plaquette and
/// all four cross pairs between neighbouring rungs.
pub fn xxz_pairs(l: usize) -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    for c in 0..l {
        p.push((2 * c, 2 * c + 1));
    }
    for c in 0..l.saturating_sub(1) {
        for a in [2 * c, 2 * c + 1] {
            for b in [2 * c + 2, 2 * c + 3] {
                p.push((a, b));
            }
        }
    }
    p
}

pub fn gen_xxz_plaquette_ladder(l: usize, j: f64, delta: f64) -> Result<HamiltonianTableau> {
    need(l >= 2, "XXZ ladder needs L >= 2")?;
    let n = 2 * l;
    let mut terms = Vec::new();
    for (a, b) in xxz_pairs(l) {
        terms.push(term(n, j, &[(a, 'X'), (b, 'X')]));
        terms.push(term(n, j, &[(a, 'Y'), (b, 'Y')]));
        terms.push(term(n, j * delta, &[(a, 'Z'), (b, 'Z')]));
    }
    Ok(canonicalize(&HamiltonianTableau::from_terms(n, terms)?))
}

/// `c†_a c_b + c†_b c_a = ½(X Z⋯Z X + Y Z⋯Z Y)` for `a < b`.
fn hopping(n: usize, a: usize, b: usize, coeff: f64) -> [PauliTerm; 2] {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let string: Vec<(usize, char)> = (a + 1..b).map(|k| (k, 'Z')).collect();
    let mut xx = vec![(a, 'X'), (b, 'X')];
    xx.extend(string.iter().copied());
    let mut yy = vec![(a, 'Y'), (b, 'Y')];
    yy.extend(string);
    [term(n, coeff / 2.0, &xx), term(n, coeff / 2.0, &yy)]
}

/// `c · n_a n_b` with `n = (I − Z)/2`.
fn density_density(n: usize, a: usize, b: usize, c: f64) -> [PauliTerm; 4] {
    [
        term(n, c / 4.0, &[]),
        term(n, -c / 4.0, &[(a, 'Z')]),
        term(n, -c / 4.0, &[(b, 'Z')]),
        term(n, c / 4.0, &[(a, 'Z'), (b, 'Z')]),
    ]
}

/// `−t Σ_{⟨ij⟩σ} (c†_{iσ} c_{jσ} + h.c.) + U Σ_i n_{i↑} n_{i↓}` on a 2×L ladder.
pub fn gen_hubbard_ladder(l: usize, t: f64, u: f64) -> Result<HamiltonianTableau> {
    need(l >= 2, "Hubbard ladder needs L >= 2")?;
    let sites = 2 * l;
    let n = 2 * sites;
    let mode = |site: usize, s: usize| 2 * site + s;
    let mut terms = Vec::new();
    for (a, b) in ladder_bonds(l) {
        for s in 0..2 {
            terms.extend(hopping(n, mode(a, s), mode(b, s), -t));
        }
    }
    for i in 0..sites {
        terms.extend(density_density(n, mode(i, 0), mode(i, 1), u));
    }
    Ok(canonicalize(&HamiltonianTableau::from_terms(n, terms)?))
}

/// Spinless chain: `−t Σ (c†_i c_{i+1} + h.c.) + V Σ n_i n_{i+1} + Σ ε_i n_i`,
/// `ε_i` uniform in `[−W, W]`.
pub fn gen_tv_chain(l: usize, t: f64, v: f64, w: f64, seed: u64) -> Result<HamiltonianTableau> {
    need(l >= 2, "tV chain needs L >= 2")?;
    let n = l;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for i in 0..l - 1 {
        terms.extend(hopping(n, i, i + 1, -t));
        terms.extend(density_density(n, i, i + 1, v));
    }
    for i in 0..l {
        let eps = if w > 0.0 { rng.gen_range(-w..=w) } else { 0.0 };
        terms.push(term(n, eps / 2.0, &[]));
        terms.push(term(n, -eps / 2.0, &[(i, 'Z')]));
    }
    let h = HamiltonianTableau::from_terms(n, terms)?;
    Ok(canonicalize(&h))
}

/// Coefficients shared by mirror pairs in the random model.
const RATIONALS: [f64; 8] = [1.0, -1.0, 0.5, -0.5, 2.0, -2.0, 1.5, -0.75];

/// ~3n/2 random Hermitian Paulis plus their mirrors under the swap of the
/// two halves, scrambled by a random Clifford. For odd `n` the last qubit is
/// left out of the swap.
pub fn gen_random_injected_swap(n: usize, seed: u64) -> Result<HamiltonianTableau> {
    need(n >= 2, "random swap model needs n >= 2")?;
    let swap = half_swap(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mirror = |p: &PauliVector| {
        let mut q = PauliVector::identity(n);
        for (i, &j) in swap.iter().enumerate() {
            q.x.set(j, p.x.get(i));
            q.z.set(j, p.z.get(i));
        }
        q
    };
    let orbits = 3 * n / 2;
    let mut seen: HashSet<PauliVector> = HashSet::new();
    let mut terms = Vec::new();
    let mut drawn = 0;
    while drawn < orbits {
        let mut p = PauliVector::identity(n);
        for i in 0..n {
            p.x.set(i, rng.gen());
            p.z.set(i, rng.gen());
        }
        if p.is_identity() || seen.contains(&p) {
            continue;
        }
        let q = mirror(&p);
        let c = *RATIONALS.choose(&mut rng).unwrap();
        // Hermitian: i^{#Y} X^x Z^z with a real coefficient.
        let eta = (p.y_count() % 4) as u8;
        seen.insert(p.clone());
        terms.push(PauliTerm::new(real(c), eta, p.clone()));
        if q != p {
            seen.insert(q.clone());
            terms.push(PauliTerm::new(real(c), eta, q));
        }
        drawn += 1;
    }
    let h = HamiltonianTableau::from_terms(n, terms)?;
    let scramble = random_clifford(n, seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(canonicalize(&apply_clifford(&h, &scramble)?))
}

/// The half-swap as a qubit permutation (`q ↔ q + ⌊n/2⌋`, last qubit fixed
/// when `n` is odd).
pub fn half_swap(n: usize) -> Vec<usize> {
    let half = n / 2;
    (0..n).map(|q| if q < 2 * half { (q + half) % (2 * half) } else { q }).collect()
}
