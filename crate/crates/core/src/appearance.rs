//! Extremal phases, extreme opposition, the appearance point and the sharp
//! genus-switch threshold κ*.
//!
//! A phase φ is extremal when all outer monomials share one argument; the
//! matching inner arguments arg(c) = π − ⟨φ,y⟩ are the extreme-opposition
//! set. The appearance point a(f) = eq(y) + s* minimizes the convex norm
//! sum e^{−⟨s,y⟩} + Σ |b_j| e^{⟨s,α(j)−y⟩}; its minimum value is the sharp
//! threshold κ* = |Θ̂|·(1 + Σ det M̂_j / det M̂) at which the bounded
//! complement component last switches on.

use std::f64::consts::TAU;

use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::support::{CircuitPolynomial, CircuitSupport, SupportMatrices};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AppearanceError {
    #[error("the inner coefficient is zero, so extreme opposition is undefined")]
    InnerCoefficientZero,
}

/// All solutions of M^t φ ≡ −arg(b) (mod 2π) with their induced
/// extreme-opposition inner arguments.
#[derive(Clone, Debug, Serialize)]
pub struct ExtremalPhaseSet {
    /// Exactly |det M| phases in [0,2π)^n.
    pub phases: Vec<Vec<f64>>,
    /// Distinct values of π − ⟨φ, y⟩ mod 2π, sorted.
    pub extreme_arg_c: Vec<f64>,
}

/// Closed-form appearance data.
#[derive(Clone, Debug, Serialize)]
pub struct AppearanceData {
    /// γ_j = log(det M̂_j / det M̂).
    pub gamma: Vec<f64>,
    /// a(f) = eq(y) + s*, the solution of M^t x = γ − Log|b|.
    pub a_point: Vec<f64>,
    pub theta_hat_abs: f64,
    /// κ* = |Θ̂|·(1 + Σ det M̂_j / det M̂).
    pub kappa_star: f64,
    /// True when Σ α(j) = (n+1)·y; then γ = 0, a = eq(y) and κ* = (n+1)|Θ|.
    pub barycentric: bool,
}

fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Angular distance in [0, π].
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Enumerates all |det M| extremal phases by solving the congruence through
/// the Smith normal form of M^t: the lattice (M^t)^{-1}Z^n / Z^n is
/// generated by the columns of V scaled by the inverse elementary divisors.
pub fn extremal_phases(f: &CircuitPolynomial, m: &SupportMatrices) -> ExtremalPhaseSet {
    let n = f.dim();
    let mt = m.m_transpose();
    let rhs: Vec<f64> = f.outer_coefficients()[1..]
        .iter()
        .map(|b| -b.arg())
        .collect();
    let particular = linalg::solve_integer_system(&mt, &rhs)
        .expect("validated support has nonsingular M");
    let (_, s, v) = linalg::smith_normal_form(&mt).expect("snf of nonsingular integer matrix");

    let mut phases = Vec::with_capacity(m.det_m.unsigned_abs() as usize);
    let mut counters = vec![0i64; n];
    loop {
        let mut phi = particular.clone();
        for (j, &t) in counters.iter().enumerate() {
            if s[j] != 0 {
                let frac = t as f64 / s[j] as f64;
                for i in 0..n {
                    phi[i] += TAU * v[i][j] as f64 * frac;
                }
            }
        }
        phases.push(phi.iter().map(|&x| wrap_tau(x)).collect::<Vec<f64>>());
        // odometer over t_j ∈ {0, …, s_j − 1}
        let mut done = true;
        for j in 0..n {
            counters[j] += 1;
            if counters[j] < s[j] {
                done = false;
                break;
            }
            counters[j] = 0;
        }
        if done {
            break;
        }
    }
    debug_assert_eq!(phases.len(), m.det_m.unsigned_abs() as usize);

    let y = f.support().inner();
    let mut extreme: Vec<f64> = phases
        .iter()
        .map(|phi| wrap_tau(std::f64::consts::PI - y.dot(phi)))
        .collect();
    extreme.sort_by(f64::total_cmp);
    extreme.dedup_by(|a, b| angular_distance(*a, *b) < 1e-9);
    if extreme.len() > 1 && angular_distance(extreme[0], *extreme.last().unwrap()) < 1e-9 {
        extreme.pop();
    }
    ExtremalPhaseSet {
        phases,
        extreme_arg_c: extreme,
    }
}

/// True iff arg(c) sits within `tol` (angular distance) of some
/// extreme-opposition argument.
pub fn is_extreme_opposition(
    f: &CircuitPolynomial,
    m: &SupportMatrices,
    tol: f64,
) -> Result<bool, AppearanceError> {
    let c = f.inner_coefficient();
    if c.norm() == 0.0 {
        return Err(AppearanceError::InnerCoefficientZero);
    }
    let set = extremal_phases(f, m);
    let arg = wrap_tau(c.arg());
    Ok(set
        .extreme_arg_c
        .iter()
        .any(|&e| angular_distance(arg, e) <= tol))
}

pub fn is_barycentric(support: &CircuitSupport) -> bool {
    support.is_barycentric()
}

/// Computes γ, the appearance point, |Θ̂| and κ*.
pub fn appearance_point(f: &CircuitPolynomial, m: &SupportMatrices) -> AppearanceData {
    let n = f.dim();
    let det_hat = m.det_m_hat as f64;
    for &dj in &m.det_m_hat_j {
        assert!(
            (dj as f64 / det_hat) > 0.0,
            "det M̂_j / det M̂ must be positive for an interior inner point"
        );
    }
    let barycentric = f.support().is_barycentric();
    let gamma: Vec<f64> = if barycentric {
        vec![0.0; n] // exact shortcut: det M̂_j = det M̂
    } else {
        m.det_m_hat_j
            .iter()
            .map(|&dj| (dj as f64 / det_hat).ln())
            .collect()
    };
    let rhs: Vec<f64> = gamma
        .iter()
        .zip(&f.outer_coefficients()[1..])
        .map(|(&g, b)| g - b.norm().ln())
        .collect();
    let a_point = linalg::solve_integer_system(&m.m_transpose(), &rhs)
        .expect("validated support has nonsingular M");

    let det = m.det_m as f64;
    let log_theta_hat: f64 = (0..n)
        .map(|i| {
            let q = m.det_m_j[i] as f64 / det;
            q * (f.outer_coefficients()[i + 1].norm().ln() - gamma[i])
        })
        .sum();
    let theta_hat_abs = log_theta_hat.exp();
    let ratio_sum: f64 = m
        .det_m_hat_j
        .iter()
        .map(|&dj| dj as f64 / det_hat)
        .sum();
    let kappa_star = theta_hat_abs * (1.0 + ratio_sum);
    AppearanceData {
        gamma,
        a_point,
        theta_hat_abs,
        kappa_star,
        barycentric,
    }
}

/// Minimizes the convex sum Σ r_i e^{⟨s, α(i) − y⟩} (all r_i > 0) by damped
/// Newton iteration. Returns (minimizer, minimum value). The closed-form
/// identity min = r_0 · κ*(r/r_0) is asserted against this in tests.
pub fn convex_norm_minimum(
    support: &CircuitSupport,
    radii: &[f64],
    grad_tol: f64,
) -> (Vec<f64>, f64) {
    let n = support.dim();
    let dirs: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            support
                .alpha(i)
                .sub(support.inner())
                .entries()
                .iter()
                .map(|&v| v as f64)
                .collect()
        })
        .collect();
    let eval = |s: &[f64]| -> (f64, Vec<f64>, Vec<Vec<f64>>) {
        let mut val = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = vec![vec![0.0; n]; n];
        for (i, d) in dirs.iter().enumerate() {
            let e = radii[i] * d.iter().zip(s).map(|(a, b)| a * b).sum::<f64>().exp();
            val += e;
            for k in 0..n {
                grad[k] += e * d[k];
                for l in 0..n {
                    hess[k][l] += e * d[k] * d[l];
                }
            }
        }
        (val, grad, hess)
    };
    let mut s = vec![0.0; n];
    let (mut val, mut grad, mut hess) = eval(&s);
    for _ in 0..200 {
        let gnorm = grad.iter().fold(0.0f64, |a, &g| a.max(g.abs()));
        if gnorm <= grad_tol * (1.0 + val) {
            break;
        }
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let step = match linalg::solve_f64(&hess, &neg) {
            Ok(d) => d,
            Err(_) => neg, // fall back to steepest descent
        };
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = s.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            let (cv, cg, ch) = eval(&cand);
            if cv < val || t < 1e-12 {
                s = cand;
                val = cv;
                grad = cg;
                hess = ch;
                break;
            }
            t *= 0.5;
        }
    }
    (s, val)
}
