//! The discriminant binomial of a circuit support and singular-point
//! verification.
//!
//! Polynomials of this class admit a torus singular point exactly when
//! c^N equals a rational constant times Π b_i^{N·det M_i / det M}, where N
//! clears all exponents to integers. The singular point itself is explicit:
//! the monomial values are b_i z^{α(i)} = det M̂_i / det M̂, which pins
//! Log|z*| to the appearance point; the phases come from the same integer
//! congruence machinery as the extremal phases.

use num::complex::Complex64;
use num::integer::gcd;
use num::{BigInt, BigRational, One, Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::support::{support_matrices, CircuitPolynomial, CircuitSupport, SupportMatrices};

#[derive(Debug, Error, PartialEq)]
pub enum DiscriminantError {
    #[error("the inner coefficient is zero; no such polynomial is discriminantal")]
    InnerCoefficientZero,
    #[error("phase lift failed: no branch reproduces a singular point (best residual {0:.3e})")]
    LiftFailed(f64),
}

/// The cleared binomial c^N − rhs_constant · Π b_i^{e_i} = 0.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantBinomial {
    /// Smallest positive N with N·det M_i/det M integral for all i.
    pub clearing_exponent: u32,
    /// Exponents on (b_1, …, b_n, c) of the monic left-hand side c^N.
    pub lhs_exponents: Vec<i64>,
    /// Exponents e_i = N·det M_i/det M on (b_1, …, b_n, c) of the right side.
    pub rhs_exponents: Vec<i64>,
    /// (−K)^N · Π (det M̂ / det M̂_i)^{e_i} with K = 1 + Σ det M̂_j/det M̂,
    /// as an exact rational (numerator, denominator) pair in decimal text.
    pub rhs_constant_num: String,
    pub rhs_constant_den: String,
    #[serde(skip)]
    rhs_constant: BigRational,
}

impl DiscriminantBinomial {
    pub fn rhs_constant(&self) -> &BigRational {
        &self.rhs_constant
    }
}

/// Builds the discriminant binomial of a support. The representative is
/// normalized with a monic c^N term.
pub fn discriminant_binomial(support: &CircuitSupport) -> DiscriminantBinomial {
    let m = support_matrices(support).expect("validated support");
    discriminant_binomial_from(&m, support.dim())
}

fn discriminant_binomial_from(m: &SupportMatrices, n: usize) -> DiscriminantBinomial {
    let d = m.det_m.unsigned_abs();
    let g = m
        .det_m_j
        .iter()
        .fold(d, |acc, &dj| gcd(acc, dj.unsigned_abs()));
    let big_n = (d / g) as u32;
    let exps: Vec<i64> = m
        .det_m_j
        .iter()
        .map(|&dj| {
            debug_assert_eq!((big_n as i64 * dj) % m.det_m, 0);
            big_n as i64 * dj / m.det_m
        })
        .collect();
    // K = (det M̂ + Σ det M̂_j) / det M̂
    let sum_hat: i64 = m.det_m_hat_j.iter().sum();
    let k = BigRational::new(
        BigInt::from(m.det_m_hat + sum_hat),
        BigInt::from(m.det_m_hat),
    );
    let mut constant = (-k).pow(big_n as i32);
    for (i, &e) in exps.iter().enumerate() {
        let ratio = BigRational::new(BigInt::from(m.det_m_hat), BigInt::from(m.det_m_hat_j[i]));
        constant *= ratio.pow(e as i32);
    }
    let mut lhs = vec![0i64; n + 1];
    lhs[n] = big_n as i64;
    let mut rhs = exps.clone();
    rhs.push(0);
    DiscriminantBinomial {
        clearing_exponent: big_n,
        lhs_exponents: lhs,
        rhs_exponents: rhs,
        rhs_constant_num: constant.numer().to_string(),
        rhs_constant_den: constant.denom().to_string(),
        rhs_constant: constant,
    }
}

/// log|q| for a big rational, stable for values far outside f64 range.
fn log_abs_big(q: &BigRational) -> f64 {
    fn log_abs_int(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits <= 1000 {
            v.abs().to_f64().map(|x| x.ln()).unwrap_or(f64::NEG_INFINITY)
        } else {
            let shift = bits - 64;
            let top = (v.abs() >> shift).to_f64().unwrap_or(1.0);
            top.ln() + (shift as f64) * std::f64::consts::LN_2
        }
    }
    log_abs_int(q.numer()) - log_abs_int(q.denom())
}

/// Evaluates the binomial membership |c^N − rhs| / max(|c^N|, |rhs|) < tol
/// in log/argument space so huge clearing exponents cannot overflow.
pub fn in_discriminant(f: &CircuitPolynomial, tol: f64) -> Result<bool, DiscriminantError> {
    let c = f.inner_coefficient();
    if c.norm() == 0.0 {
        return Err(DiscriminantError::InnerCoefficientZero);
    }
    let binomial = discriminant_binomial(f.support());
    let n_exp = binomial.clearing_exponent as f64;
    let log_lhs = n_exp * c.norm().ln();
    let arg_lhs = n_exp * c.arg();
    let mut log_rhs = log_abs_big(&binomial.rhs_constant);
    let mut arg_rhs = if binomial.rhs_constant.is_negative() {
        std::f64::consts::PI
    } else {
        0.0
    };
    for (b, &e) in f.outer_coefficients()[1..]
        .iter()
        .zip(&binomial.rhs_exponents)
    {
        log_rhs += e as f64 * b.norm().ln();
        arg_rhs += e as f64 * b.arg();
    }
    // t = lhs/rhs; membership is |t − 1|/max(|t|,1) < tol
    let log_t = log_lhs - log_rhs;
    if log_t.abs() > 700.0 {
        return Ok(false);
    }
    let t = Complex64::from_polar(log_t.exp(), arg_lhs - arg_rhs);
    Ok((t - Complex64::one()).norm() / t.norm().max(1.0) < tol)
}

/// A verified torus singular point.
#[derive(Clone, Debug, Serialize)]
pub struct SingularPoint {
    pub z: Vec<crate::io::ComplexRepr>,
    pub residual_f: f64,
    pub residual_partials: Vec<f64>,
}

/// Solves for the singular point of a discriminantal polynomial: monomial
/// values are forced to b_i z^{α(i)} = det M̂_i/det M̂, the log-moduli follow
/// by one exact linear solve and the phases by branch enumeration.
pub fn singular_point(f: &CircuitPolynomial) -> Result<SingularPoint, DiscriminantError> {
    let c = f.inner_coefficient();
    if c.norm() == 0.0 {
        return Err(DiscriminantError::InnerCoefficientZero);
    }
    let n = f.dim();
    let m = support_matrices(f.support()).expect("validated support");
    // target monomial values v_i = z^{α(i)}
    let targets: Vec<Complex64> = (0..n)
        .map(|i| {
            Complex64::new(m.det_m_hat_j[i] as f64 / m.det_m_hat as f64, 0.0)
                / f.outer_coefficients()[i + 1]
        })
        .collect();
    let mt = m.m_transpose();
    let log_rhs: Vec<f64> = targets.iter().map(|v| v.norm().ln()).collect();
    let x = linalg::solve_integer_system(&mt, &log_rhs).expect("nonsingular M");
    let arg_rhs: Vec<f64> = targets.iter().map(|v| v.arg()).collect();
    let particular = linalg::solve_integer_system(&mt, &arg_rhs).expect("nonsingular M");
    let (_, s, v) = linalg::smith_normal_form(&mt).expect("snf of integer matrix");

    let mut best: Option<(f64, Vec<Complex64>, f64, Vec<f64>)> = None;
    let mut counters = vec![0i64; n];
    loop {
        let mut phi = particular.clone();
        for (j, &t) in counters.iter().enumerate() {
            if s[j] != 0 {
                let frac = t as f64 / s[j] as f64;
                for i in 0..n {
                    phi[i] += std::f64::consts::TAU * v[i][j] as f64 * frac;
                }
            }
        }
        let z: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(x[i].exp(), phi[i]))
            .collect();
        let (rf, rp) = singular_residuals(f, &x, &phi);
        let score = rf.max(rp.iter().copied().fold(0.0, f64::max));
        if best.as_ref().is_none_or(|(b, ..)| score < *b) {
            best = Some((score, z, rf, rp));
        }
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
    let (score, z, residual_f, residual_partials) = best.expect("at least one branch");
    if score > 1e-8 {
        return Err(DiscriminantError::LiftFailed(score));
    }
    Ok(SingularPoint {
        z: z.into_iter().map(crate::io::ComplexRepr::from).collect(),
        residual_f,
        residual_partials,
    })
}

/// Relative residuals of f and of the scaled partials z_j ∂_j f at
/// z = exp(x + iφ), evaluated from exponent data to avoid pow loops.
fn singular_residuals(f: &CircuitPolynomial, x: &[f64], phi: &[f64]) -> (f64, Vec<f64>) {
    let n = f.dim();
    let support = f.support();
    let mono = |coef: Complex64, a: &crate::support::ExponentVector| -> Complex64 {
        coef * Complex64::from_polar(a.dot(x).exp(), a.dot(phi))
    };
    let mut terms: Vec<(Complex64, &crate::support::ExponentVector)> = f
        .outer_coefficients()
        .iter()
        .enumerate()
        .map(|(i, &b)| (b, support.alpha(i)))
        .collect();
    terms.push((f.inner_coefficient(), support.inner()));

    let mut val = Complex64::new(0.0, 0.0);
    let mut scale_f = 0.0f64;
    let mut partial = vec![Complex64::new(0.0, 0.0); n];
    let mut scale_p = vec![0.0f64; n];
    for (coef, a) in &terms {
        let t = mono(*coef, a);
        val += t;
        scale_f += t.norm();
        for j in 0..n {
            let tj = t * a[j] as f64;
            partial[j] += tj;
            scale_p[j] += tj.norm();
        }
    }
    let rf = val.norm() / scale_f.max(f64::MIN_POSITIVE);
    let rp = partial
        .iter()
        .zip(&scale_p)
        .map(|(p, &s)| p.norm() / s.max(f64::MIN_POSITIVE))
        .collect();
    (rf, rp)
}
