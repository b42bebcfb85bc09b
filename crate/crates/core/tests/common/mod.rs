//! Shared fixtures and seeded random instance generators.
#![allow(dead_code)] // each test binary uses its own subset

use num::complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circuit_amoeba::support::{validate_support, CircuitPolynomial, ExponentVector};

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 1 + z1^2 z2 + z1 z2^2 + c z1 z2 (the reference barycentric instance).
pub fn sheared_deltoid(c: Complex64) -> CircuitPolynomial {
    CircuitPolynomial::from_parts(
        vec![vec![0, 0], vec![2, 1], vec![1, 2]],
        vec![1, 1],
        vec![cx(1.0, 0.0); 3],
        c,
    )
    .unwrap()
}

/// 1 + z1^3 + z2^3 + c z1 z2 (the deltoid instance).
pub fn deltoid(c: Complex64) -> CircuitPolynomial {
    CircuitPolynomial::from_parts(
        vec![vec![0, 0], vec![3, 0], vec![0, 3]],
        vec![1, 1],
        vec![cx(1.0, 0.0); 3],
        c,
    )
    .unwrap()
}

/// 1 + 2.4 z1^2 z2 + (1+1.3i) z1 z2^8 + c z1 z2^3 (the rotated instance).
pub fn rotated(c: Complex64) -> CircuitPolynomial {
    CircuitPolynomial::from_parts(
        vec![vec![0, 0], vec![2, 1], vec![1, 8]],
        vec![1, 3],
        vec![cx(1.0, 0.0), cx(2.4, 0.0), cx(1.0, 1.3)],
        c,
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random n = 2 circuit support with coordinates bounded by `coord_max`.
/// Rejection sampling over vertex pairs plus an interior-lattice-point
/// search; deterministic for a fixed rng state.
pub fn random_support(
    rng: &mut ChaCha8Rng,
    coord_max: i64,
) -> (Vec<Vec<i64>>, Vec<i64>) {
    loop {
        let a1 = vec![rng.gen_range(-coord_max..=coord_max), rng.gen_range(-coord_max..=coord_max)];
        let a2 = vec![rng.gen_range(-coord_max..=coord_max), rng.gen_range(-coord_max..=coord_max)];
        let det = a1[0] * a2[1] - a1[1] * a2[0];
        if det.abs() < 3 {
            continue; // too thin to contain an interior lattice point
        }
        let alphas = vec![vec![0, 0], a1.clone(), a2.clone()];
        let los: Vec<i64> = (0..2).map(|i| 0.min(a1[i]).min(a2[i])).collect();
        let his: Vec<i64> = (0..2).map(|i| 0.max(a1[i]).max(a2[i])).collect();
        let mut interior = Vec::new();
        for x in los[0]..=his[0] {
            for y in los[1]..=his[1] {
                let cand = ExponentVector::new(vec![x, y]);
                let sup = validate_support(
                    alphas.iter().cloned().map(ExponentVector::new).collect(),
                    cand.clone(),
                );
                if sup.is_ok() {
                    interior.push(vec![x, y]);
                }
            }
        }
        if interior.is_empty() {
            continue;
        }
        let y = interior[rng.gen_range(0..interior.len())].clone();
        return (alphas, y);
    }
}

/// Random n = 2 barycentric support: α(1) free, α(2) = 3y − α(1).
pub fn random_barycentric_support(rng: &mut ChaCha8Rng) -> (Vec<Vec<i64>>, Vec<i64>) {
    loop {
        let y = vec![rng.gen_range(1..=3), rng.gen_range(1..=3)];
        let a1 = vec![rng.gen_range(-4..=6), rng.gen_range(-4..=6)];
        let a2 = vec![3 * y[0] - a1[0], 3 * y[1] - a1[1]];
        let alphas = vec![vec![0, 0], a1, a2];
        let valid = validate_support(
            alphas.iter().cloned().map(ExponentVector::new).collect(),
            ExponentVector::new(y.clone()),
        );
        if valid.map(|s| s.is_barycentric()).unwrap_or(false) {
            return (alphas, y);
        }
    }
}

/// Random nonzero coefficient with log-uniform modulus in [e^−1, e^1].
pub fn random_coefficient(rng: &mut ChaCha8Rng) -> Complex64 {
    let modulus = rng.gen_range(-1.0f64..1.0).exp();
    let arg = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(modulus, arg)
}
