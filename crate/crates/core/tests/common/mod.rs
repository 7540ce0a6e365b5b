#![allow(dead_code)]

use std::path::Path;

use bayesian_perceptron::{Activation, SquareMatrix, Weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Random SPD matrix `A·Aᵀ/n + jitter·I` with entries of order one.
pub fn random_cov<R: Rng>(rng: &mut R, n: usize, jitter: f64) -> SquareMatrix<f64> {
    let a: Vec<f64> = uniform_vec(rng, n * n, -1.0, 1.0);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s: f64 = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum();
                    s / n as f64 + if i == j { jitter } else { 0.0 }
                })
                .collect()
        })
        .collect();
    SquareMatrix::from_rows(rows).unwrap()
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Weights {
    let mean = uniform_vec(rng, n, -2.0, 2.0);
    Weights::new(mean, random_cov(rng, n, 0.05)).unwrap()
}

pub fn min_eigenvalue(c: &SquareMatrix<f64>) -> f64 {
    c.symmetric_eigenvalues()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

pub fn activation_from_columns(kind: &str, alpha: &str, beta: &str) -> Activation<f64> {
    match kind {
        "sigmoid" => Activation::Sigmoid,
        "pwl" => Activation::pwl(alpha.parse().unwrap(), beta.parse().unwrap()).unwrap(),
        other => panic!("unknown activation {other}"),
    }
}

/// Rows of a tab-separated fixture, skipping `#` comments and the header.
pub fn fixture_rows(name: &str) -> Vec<Vec<String>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| l.split('\t').map(str::to_owned).collect())
        .collect()
}

pub fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}
