//! Equilibrium points, the invariant Θ, and the coarse genus bounds.
//!
//! eq(y) is the unique log-space point where all outer monomials share one
//! modulus; eq(j) additionally balances the inner monomial against all
//! outer ones except the j-th. |Θ| = Π |b_i|^{det M_i / det M} controls the
//! two coarse thresholds: |c| ≤ |Θ| forces a solid amoeba, while
//! |c| > (n+1)·|Θ| forces the bounded complement component to exist.

use num::complex::Complex64;
use num::integer::gcd;
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::support::{CircuitPolynomial, SupportMatrices};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquilibriumError {
    #[error("the inner coefficient is zero, so eq(j) is undefined")]
    InnerCoefficientZero,
}

/// Condition threshold above which a support is flagged as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e12;

/// All equilibrium data of one polynomial.
#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub eq_y: Vec<f64>,
    /// eq(0), …, eq(n); only defined when c ≠ 0.
    pub eq_j: Option<Vec<Vec<f64>>>,
    pub theta_abs: f64,
    /// Distinct values of Π b_i^{det M_i / det M}; at most |det M| of them.
    pub theta_branches: Vec<Complex64>,
    /// True when the linear systems involved exceed the condition threshold.
    pub ill_conditioned: bool,
}

/// Solves M^t x = −Log|(b_1,…,b_n)|.
pub fn equilibrium_point_y(f: &CircuitPolynomial, m: &SupportMatrices) -> Vec<f64> {
    let rhs: Vec<f64> = f.outer_coefficients()[1..]
        .iter()
        .map(|b| -b.norm().ln())
        .collect();
    linalg::solve_integer_system(&m.m_transpose(), &rhs)
        .expect("validated support has nonsingular M")
}

/// Solves the n equations log|b_i| + ⟨α(i),w⟩ = log|c| + ⟨y,w⟩ for i ≠ j.
pub fn equilibrium_point_j(
    f: &CircuitPolynomial,
    j: usize,
) -> Result<Vec<f64>, EquilibriumError> {
    let c = f.inner_coefficient();
    if c.norm() == 0.0 {
        return Err(EquilibriumError::InnerCoefficientZero);
    }
    let n = f.dim();
    assert!(j <= n, "equilibrium index out of range");
    let support = f.support();
    let log_c = c.norm().ln();
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut rhs: Vec<f64> = Vec::with_capacity(n);
    for i in 0..=n {
        if i == j {
            continue;
        }
        rows.push(
            support
                .alpha(i)
                .sub(support.inner())
                .entries()
                .to_vec(),
        );
        rhs.push(log_c - f.outer_coefficients()[i].norm().ln());
    }
    Ok(linalg::solve_integer_system(&rows, &rhs)
        .expect("rows α(i)−y for i≠j are linearly independent for a valid support"))
}

/// |Θ| in log space plus the full branch list of the multi-valued product.
pub fn theta(f: &CircuitPolynomial, m: &SupportMatrices) -> (f64, Vec<Complex64>) {
    let det = m.det_m as f64;
    let log_abs: f64 = f.outer_coefficients()[1..]
        .iter()
        .zip(&m.det_m_j)
        .map(|(b, &dj)| (dj as f64 / det) * b.norm().ln())
        .sum();
    let theta_abs = log_abs.exp();

    let principal_arg: f64 = f.outer_coefficients()[1..]
        .iter()
        .zip(&m.det_m_j)
        .map(|(b, &dj)| (dj as f64 / det) * b.arg())
        .sum();
    // Branch multipliers: exp(2πi·Σ det M_j k_j / det M) over k ∈ Z^n forms
    // the cyclic group of order |det M| / gcd(det M, det M_1, …, det M_n).
    let d = m.det_m.unsigned_abs();
    let g = m
        .det_m_j
        .iter()
        .fold(d, |acc, &dj| gcd(acc, dj.unsigned_abs()));
    let count = (d / g).max(1);
    let branches = (0..count)
        .map(|k| {
            let arg = principal_arg + std::f64::consts::TAU * (g as f64) * (k as f64) / (d as f64);
            Complex64::from_polar(theta_abs, arg)
        })
        .collect();
    (theta_abs, branches)
}

/// The two coarse thresholds of the solid/genus-1 classification.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RoughBounds {
    /// |c| at or below this value guarantees a solid amoeba.
    pub solid_if_below: f64,
    /// |c| strictly above this value guarantees genus 1.
    pub genus1_if_above: f64,
}

pub fn rough_bounds(f: &CircuitPolynomial, m: &SupportMatrices) -> RoughBounds {
    let (theta_abs, _) = theta(f, m);
    RoughBounds {
        solid_if_below: theta_abs,
        genus1_if_above: (f.dim() as f64 + 1.0) * theta_abs,
    }
}

/// Verdict of the coarse bounds alone; `None` when they are inconclusive.
pub fn rough_classify(f: &CircuitPolynomial, m: &SupportMatrices) -> Option<bool> {
    let bounds = rough_bounds(f, m);
    let c_abs = f.inner_coefficient().norm();
    if c_abs <= bounds.solid_if_below {
        Some(false) // solid
    } else if c_abs > bounds.genus1_if_above {
        Some(true) // genus 1
    } else {
        None
    }
}

/// S(w): the sum of the largest n−1 outer monomial norms at w, computed on
/// the inner-exponent-at-origin form (all exponents shifted by −y). Some
/// κ ≥ S(w) puts w on the amoeba of the |c| = κ family.
pub fn pointwise_lower_bound(f: &CircuitPolynomial, w: &[f64]) -> f64 {
    let support = f.support();
    let mut norms: Vec<f64> = (0..=f.dim())
        .map(|i| {
            let shifted = support.alpha(i).sub(support.inner());
            f.outer_coefficients()[i].norm() * shifted.dot(w).exp()
        })
        .collect();
    norms.sort_by(|a, b| b.total_cmp(a));
    norms[..f.dim() - 1].iter().sum()
}

/// Assembles the full equilibrium record.
pub fn equilibrium_data(f: &CircuitPolynomial, m: &SupportMatrices) -> EquilibriumData {
    let eq_y = equilibrium_point_y(f, m);
    let eq_j = if f.inner_coefficient().norm() > 0.0 {
        Some(
            (0..=f.dim())
                .map(|j| equilibrium_point_j(f, j).expect("c != 0 checked above"))
                .collect(),
        )
    } else {
        None
    };
    let (theta_abs, theta_branches) = theta(f, m);
    let ill_conditioned = linalg::condition_estimate(&m.m_transpose()) > CONDITION_WARNING;
    EquilibriumData {
        eq_y,
        eq_j,
        theta_abs,
        theta_branches,
        ill_conditioned,
    }
}
