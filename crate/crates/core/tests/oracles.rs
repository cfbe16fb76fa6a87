//! Model constructors and random sampling against independent oracles:
//! second-quantized Fock-space matrices, Kronecker-product spin matrices,
//! and a χ² test of the symplectic sampler.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use cliffsym::dense::{dense_tableau, max_abs_diff, DENSE_CAP};
use cliffsym::models::{gen_hubbard_ladder, gen_tfi_ladder, gen_tv_chain, gen_xxz_plaquette_ladder, xxz_pairs};
use cliffsym::symplectic::random_symplectic;
use cliffsym::C64;

type M = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `c†_a c_b` on `modes` fermionic modes; mode `k` is bit `k` of the
/// occupation index, with the sign counting occupied modes below.
fn hop(modes: usize, a: usize, b: usize) -> M {
    let d = 1usize << modes;
    let mut m = M::zeros(d, d);
    for s in 0..d {
        if s >> b & 1 == 0 {
            continue;
        }
        let s1 = s & !(1 << b);
        let sign_b = (s1 & ((1 << b) - 1)).count_ones();
        if s1 >> a & 1 == 1 {
            continue;
        }
        let s2 = s1 | (1 << a);
        let sign_a = (s1 & ((1 << a) - 1)).count_ones();
        let sign = if (sign_a + sign_b) % 2 == 0 { 1.0 } else { -1.0 };
        m[(s2, s)] += c(sign, 0.0);
    }
    m
}

fn number(modes: usize, a: usize) -> M {
    let d = 1usize << modes;
    M::from_diagonal(&nalgebra::DVector::from_fn(d, |s, _| c((s >> a & 1) as f64, 0.0)))
}

/// Rungs `(2c, 2c+1)` and legs `(2c+r, 2c+2+r)`, written out independently.
fn ladder(l: usize) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (0..l).map(|c| (2 * c, 2 * c + 1)).collect();
    for col in 0..l - 1 {
        b.push((2 * col, 2 * col + 2));
        b.push((2 * col + 1, 2 * col + 3));
    }
    b
}

#[test]
fn hubbard_matches_fock_space() {
    let (l, t, u) = (2, 1.0, 4.0);
    let sites = 2 * l;
    let modes = 2 * sites;
    let d = 1 << modes;
    let mut h = M::zeros(d, d);
    for (i, j) in ladder(l) {
        for s in 0..2 {
            let (a, b) = (2 * i + s, 2 * j + s);
            h -= (hop(modes, a, b) + hop(modes, b, a)) * c(t, 0.0);
        }
    }
    for i in 0..sites {
        h += number(modes, 2 * i) * number(modes, 2 * i + 1) * c(u, 0.0);
    }
    let got = dense_tableau(&gen_hubbard_ladder(l, t, u).unwrap(), DENSE_CAP).unwrap();
    assert!(max_abs_diff(&h, &got) < 1e-12);
}

#[test]
fn tv_chain_matches_fock_space() {
    let (l, t, v, w, seed) = (7, 1.0, 1.0, 0.5, 11);
    let d = 1 << l;
    let mut h = M::zeros(d, d);
    for i in 0..l - 1 {
        h -= (hop(l, i, i + 1) + hop(l, i + 1, i)) * c(t, 0.0);
        h += number(l, i) * number(l, i + 1) * c(v, 0.0);
    }
    // same disorder stream as the constructor
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..l {
        let eps: f64 = rng.gen_range(-w..=w);
        h += number(l, i) * c(eps, 0.0);
    }
    let got = dense_tableau(&gen_tv_chain(l, t, v, w, seed).unwrap(), DENSE_CAP).unwrap();
    assert!(max_abs_diff(&h, &got) < 1e-12);
}

fn pauli(ch: char) -> M {
    match ch {
        'X' => M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        'Y' => M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        'Z' => M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        _ => M::identity(2, 2),
    }
}

/// Product of single-site operators; qubit `q` is bit `q` of the index.
fn kron_ops(n: usize, ops: &[(usize, char)]) -> M {
    let by: HashMap<usize, char> = ops.iter().copied().collect();
    let mut m = M::identity(1, 1);
    for q in (0..n).rev() {
        m = m.kronecker(&pauli(*by.get(&q).unwrap_or(&'I')));
    }
    m
}

#[test]
fn tfi_ladder_matches_kronecker_products() {
    let (l, j, hx) = (4, 1.0, 0.5);
    let n = 2 * l;
    let mut h = M::zeros(1 << n, 1 << n);
    for (a, b) in ladder(l) {
        h += kron_ops(n, &[(a, 'Z'), (b, 'Z')]) * c(j, 0.0);
    }
    for q in 0..n {
        h += kron_ops(n, &[(q, 'X')]) * c(hx, 0.0);
    }
    let got = dense_tableau(&gen_tfi_ladder(l, j, hx).unwrap(), DENSE_CAP).unwrap();
    assert!(max_abs_diff(&h, &got) < 1e-12);
}

#[test]
fn xxz_ladder_matches_kronecker_products() {
    let (l, j, delta) = (3, 1.0, 0.5);
    let n = 2 * l;
    let pairs = xxz_pairs(l);
    // two rungs per plaquette are shared; each rung pair plus four crossings
    assert_eq!(pairs.len(), l + 4 * (l - 1));
    let mut h = M::zeros(1 << n, 1 << n);
    for &(a, b) in &pairs {
        h += kron_ops(n, &[(a, 'X'), (b, 'X')]) * c(j, 0.0);
        h += kron_ops(n, &[(a, 'Y'), (b, 'Y')]) * c(j, 0.0);
        h += kron_ops(n, &[(a, 'Z'), (b, 'Z')]) * c(j * delta, 0.0);
    }
    let got = dense_tableau(&gen_xxz_plaquette_ladder(l, j, delta).unwrap(), DENSE_CAP).unwrap();
    assert!(max_abs_diff(&h, &got) < 1e-12);
}

/// |Sp(4, 2)| = 2^4 (2^2 − 1)(2^4 − 1) = 720; draws should be uniform.
#[test]
fn symplectic_sampler_is_uniform_on_sp4() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 72_000;
    let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
    for _ in 0..draws {
        let s = random_symplectic(2, &mut rng);
        assert!(s.is_symplectic());
        *counts.entry(s.row_strings()).or_default() += 1;
    }
    assert_eq!(counts.len(), 720);
    let expected = draws as f64 / 720.0;
    let chi2: f64 = counts.values().map(|&k| (k as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(719.0).unwrap().cdf(chi2);
    assert!(p > 1e-3, "chi2 = {chi2}, p = {p}");
}
