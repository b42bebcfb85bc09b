//! Lopsidedness certificates and the rotation-product refinement.
//!
//! The norm sequence f{w} lists |m_i(Log⁻¹|w|)| for every monomial; when a
//! single entry exceeds the sum of all the others the point is certified
//! outside the amoeba with the dominant exponent as complement order. The
//! refinement f̃_r multiplies all coordinate rotations of f by r-th roots of
//! unity; it has the same amoeba and a strictly better lopsidedness region.

use std::collections::BTreeMap;

use num::complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::support::{CircuitPolynomial, ExponentVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LopsidedError {
    #[error("expansion budget exceeded: {0}")]
    ExpansionBudgetExceeded(String),
}

/// A general sparse Laurent polynomial, not restricted to circuits.
/// Zero coefficients are never stored and exponent keys are unique.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePolynomial {
    terms: BTreeMap<ExponentVector, Complex64>,
    dim: usize,
}

impl SparsePolynomial {
    pub fn new(dim: usize) -> Self {
        SparsePolynomial {
            terms: BTreeMap::new(),
            dim,
        }
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (ExponentVector, Complex64)>,
    ) -> Self {
        let mut p = SparsePolynomial::new(dim);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: ExponentVector, c: Complex64) {
        debug_assert_eq!(e.dim(), self.dim);
        let entry = self.terms.entry(e.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() == 0.0 {
            self.terms.remove(&e);
        }
    }

    /// Drops terms with |coef| below `rel` times the largest coefficient.
    pub fn cleaned(mut self, rel: f64) -> Self {
        let max = self
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if max > 0.0 {
            self.terms.retain(|_, c| c.norm() >= rel * max);
        }
        self
    }

    /// Full product with exact sparse accumulation.
    pub fn multiply(&self, other: &SparsePolynomial) -> SparsePolynomial {
        let mut out = SparsePolynomial::new(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                let entry = out.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| c.norm() > 0.0);
        out
    }

    /// f(e^{iθ_1}z_1, …, e^{iθ_n}z_n): each coefficient picks up e^{i⟨θ,a⟩}.
    pub fn rotated(&self, theta: &[f64]) -> SparsePolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c * Complex64::from_polar(1.0, e.dot(theta))))
            .collect();
        SparsePolynomial {
            terms,
            dim: self.dim,
        }
    }
}

impl From<&CircuitPolynomial> for SparsePolynomial {
    fn from(f: &CircuitPolynomial) -> Self {
        let mut p = SparsePolynomial::new(f.dim());
        for (i, b) in f.outer_coefficients().iter().enumerate() {
            p.add_term(f.support().alpha(i).clone(), *b);
        }
        let c = f.inner_coefficient();
        if c.norm() > 0.0 {
            p.add_term(f.support().inner().clone(), c);
        }
        p
    }
}

/// The monomial norms of a polynomial at Log⁻¹|w|, with the dominant index
/// when one norm exceeds the sum of all others. Norms can overflow to
/// infinity for extreme w; `log_norms` carries the overflow-free values the
/// dominance test actually uses.
#[derive(Clone, Debug, Serialize)]
pub struct NormSequence {
    pub exponents: Vec<ExponentVector>,
    pub norms: Vec<f64>,
    pub log_norms: Vec<f64>,
    pub dominant: Option<usize>,
}

impl NormSequence {
    pub fn is_lopsided(&self) -> bool {
        self.dominant.is_some()
    }
}

fn log_sum_exp(vals: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = vals.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + vals.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Evaluates f{w} in log space.
pub fn norm_sequence(p: &SparsePolynomial, w: &[f64]) -> NormSequence {
    let mut exponents = Vec::with_capacity(p.len());
    let mut log_norms = Vec::with_capacity(p.len());
    for (e, c) in p.terms() {
        exponents.push(e.clone());
        log_norms.push(c.norm().ln() + e.dot(w));
    }
    let norms: Vec<f64> = log_norms.iter().map(|&l| l.exp()).collect();
    // Only the largest entry can dominate the sum of the others.
    let dominant = (0..log_norms.len())
        .max_by(|&i, &j| log_norms[i].total_cmp(&log_norms[j]))
        .filter(|&i| {
            let rest = log_sum_exp(
                log_norms
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &l)| l),
            );
            log_norms[i] > rest
        });
    NormSequence {
        exponents,
        norms,
        log_norms,
        dominant,
    }
}

/// If f{w} is lopsided, returns the dominant exponent as a certified
/// complement order.
pub fn lopsided_outside_certificate(p: &SparsePolynomial, w: &[f64]) -> Option<ExponentVector> {
    let ns = norm_sequence(p, w);
    ns.dominant.map(|i| ns.exponents[i].clone())
}

/// True iff g has the same support as f and the same coefficient moduli
/// (relative tolerance 1e-12), i.e. g lies on the coefficient torus of f.
pub fn in_coefficient_torus(f: &SparsePolynomial, g: &SparsePolynomial) -> bool {
    if f.len() != g.len() {
        return false;
    }
    f.terms().zip(g.terms()).all(|((ea, ca), (eb, cb))| {
        ea == eb && (ca.norm() - cb.norm()).abs() <= 1e-12 * ca.norm().max(cb.norm())
    })
}

/// Checks that the norm sequence at w is invariant under 25 deterministic
/// pseudo-random coefficient-phase rotations: the dominant index must match
/// exactly, the norms up to the rounding of |e^{iψ}·b| (≤ 1e-14 relative).
pub fn torus_invariance_check(p: &SparsePolynomial, w: &[f64], seed: u64) -> bool {
    let base = norm_sequence(p, w);
    let mut state = seed | 1;
    let mut next = || {
        // xorshift64*; plenty for phase sampling and keeps the crate free of
        // an RNG dependency.
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        let v = state.wrapping_mul(0x2545_F491_4F6C_DD1D);
        (v >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU
    };
    for _ in 0..25 {
        let rotated = SparsePolynomial::from_terms(
            p.dim(),
            p.terms()
                .map(|(e, c)| (e.clone(), c * Complex64::from_polar(1.0, next()))),
        );
        if !in_coefficient_torus(p, &rotated) {
            return false;
        }
        let ns = norm_sequence(&rotated, w);
        if ns.dominant != base.dominant {
            return false;
        }
        let ok = ns.log_norms.iter().zip(&base.log_norms).all(|(a, b)| {
            (a - b).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs()))
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Expansion limits for the rotation product.
#[derive(Clone, Copy, Debug)]
pub struct ExpansionBudget {
    pub max_r: u32,
    pub max_dim: usize,
    pub max_terms: usize,
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        ExpansionBudget {
            max_r: 3,
            max_dim: 2,
            max_terms: 100_000,
        }
    }
}

/// f̃_r: the product of f(e^{2πik_1/r}z_1, …, e^{2πik_n/r}z_n) over all
/// k ∈ {0,…,r−1}^n, expanded by sparse multiplication. Coefficients below
/// 1e-13 of the largest are dropped to clean exact cancellations.
pub fn purbhoo_refine(p: &SparsePolynomial, r: u32) -> Result<SparsePolynomial, LopsidedError> {
    purbhoo_refine_with(p, r, ExpansionBudget::default())
}

pub fn purbhoo_refine_with(
    p: &SparsePolynomial,
    r: u32,
    budget: ExpansionBudget,
) -> Result<SparsePolynomial, LopsidedError> {
    assert!(r >= 1, "rotation order must be at least 1");
    if r == 1 {
        return Ok(p.clone());
    }
    if r > budget.max_r {
        return Err(LopsidedError::ExpansionBudgetExceeded(format!(
            "r = {r} exceeds the configured maximum {}",
            budget.max_r
        )));
    }
    if p.dim() > budget.max_dim {
        return Err(LopsidedError::ExpansionBudgetExceeded(format!(
            "dimension {} exceeds the configured maximum {}",
            p.dim(),
            budget.max_dim
        )));
    }
    let n = p.dim();
    let mut acc = SparsePolynomial::from_terms(
        n,
        [(
            ExponentVector::new(vec![0; n]),
            Complex64::new(1.0, 0.0),
        )],
    );
    let mut k = vec![0u32; n];
    loop {
        let theta: Vec<f64> = k
            .iter()
            .map(|&ki| std::f64::consts::TAU * ki as f64 / r as f64)
            .collect();
        acc = acc.multiply(&p.rotated(&theta));
        if acc.len() > budget.max_terms {
            return Err(LopsidedError::ExpansionBudgetExceeded(format!(
                "intermediate expansion reached {} terms (limit {})",
                acc.len(),
                budget.max_terms
            )));
        }
        let mut done = true;
        for slot in k.iter_mut() {
            *slot += 1;
            if *slot < r {
                done = false;
                break;
            }
            *slot = 0;
        }
        if done {
            break;
        }
    }
    Ok(acc.cleaned(1e-13))
}

/// Recovers the base-polynomial complement order from a dominant exponent
/// of f̃_r by dividing through the factor count r^n.
pub fn recover_order(dominant: &ExponentVector, r: u32, dim: usize) -> Option<ExponentVector> {
    let factor = (r as i64).pow(dim as u32);
    let mut order = Vec::with_capacity(dim);
    for &e in dominant.entries() {
        if e % factor != 0 {
            return None; // dominant exponent is not a scaled lattice point
        }
        order.push(e / factor);
    }
    Some(ExponentVector::new(order))
}

/// Lopsidedness of f̃_r at w, with the complement order recovered by
/// dividing the dominant exponent by r^n (the factor count).
pub fn refined_membership(
    p: &SparsePolynomial,
    w: &[f64],
    r: u32,
) -> Result<Option<ExponentVector>, LopsidedError> {
    let refined = purbhoo_refine(p, r)?;
    let Some(dom) = lopsided_outside_certificate(&refined, w) else {
        return Ok(None);
    };
    Ok(recover_order(&dom, r, p.dim()))
}
