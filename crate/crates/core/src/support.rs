//! Circuit supports and circuit polynomials.
//!
//! A circuit support is an n-simplex with integer vertices α(0),…,α(n)
//! together with one lattice point y strictly inside it. A circuit
//! polynomial attaches nonzero complex coefficients b_i to the vertices and
//! an inner coefficient c (possibly zero) to y. Polynomials are normalized
//! eagerly on construction so that α(0) = 0 and b_0 = 1; every downstream
//! module assumes this form.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError};

/// Hard cap on the ambient dimension for exact (non-scanning) paths.
pub const MAX_DIMENSION: usize = 6;
/// Exponent entries beyond this magnitude would risk determinant overflow.
pub const MAX_EXPONENT_ABS: i64 = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum SupportError {
    #[error("dimension must satisfy 1 <= n <= {MAX_DIMENSION}, got {0}")]
    DimensionOutOfRange(usize),
    #[error("expected {expected} vectors of length {n}, got vector {index} of length {len}")]
    DimensionMismatch {
        expected: usize,
        n: usize,
        index: usize,
        len: usize,
    },
    #[error("exponent entry {0} exceeds the safe magnitude {MAX_EXPONENT_ABS}")]
    ExponentTooLarge(i64),
    #[error("simplex vertices are affinely dependent")]
    DegenerateSimplex,
    #[error("inner point lies on the boundary or outside of the simplex")]
    PointNotInterior,
    #[error("outer coefficient b[{0}] must be nonzero")]
    ZeroOuterCoefficient(usize),
    #[error("coefficient is not finite")]
    NonFiniteCoefficient,
    #[error("expected {expected} outer coefficients, got {got}")]
    CoefficientCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A lattice exponent vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl std::fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// ⟨self, w⟩ with a real vector.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.0.iter().zip(w).map(|(&a, &x)| a as f64 * x).sum()
    }

    pub fn sub(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, k: i64) -> ExponentVector {
        ExponentVector(self.0.iter().map(|&a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

/// Validated circuit support: simplex vertices plus one interior lattice point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitSupport {
    n: usize,
    alphas: Vec<ExponentVector>,
    y: ExponentVector,
    /// Barycentric coordinates of y w.r.t. α(0..n); strictly positive.
    bary: Vec<f64>,
}

impl CircuitSupport {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Simplex vertices α(0), …, α(n).
    pub fn alphas(&self) -> &[ExponentVector] {
        &self.alphas
    }

    pub fn alpha(&self, i: usize) -> &ExponentVector {
        &self.alphas[i]
    }

    pub fn inner(&self) -> &ExponentVector {
        &self.y
    }

    /// Barycentric coordinates of the inner point (cached at validation).
    pub fn barycentric_coordinates(&self) -> &[f64] {
        &self.bary
    }

    pub fn is_normalized(&self) -> bool {
        self.alphas[0].is_zero()
    }

    /// Exact test for Σ_{j=1}^n α(j) = (n+1)·y (assumes α(0) = 0).
    pub fn is_barycentric(&self) -> bool {
        debug_assert!(self.is_normalized());
        let n = self.n;
        (0..n).all(|i| {
            let s: i64 = self.alphas[1..].iter().map(|a| a[i]).sum();
            s == (n as i64 + 1) * self.y[i]
        })
    }

    /// Lattice points of the simplex, i.e. candidate orders for complement
    /// components. Enumerated over the bounding box with an exact interior
    /// test; fine for the small simplices this crate handles.
    pub fn lattice_points(&self) -> Vec<ExponentVector> {
        let n = self.n;
        let lo: Vec<i64> = (0..n)
            .map(|i| self.alphas.iter().map(|a| a[i]).min().unwrap())
            .collect();
        let hi: Vec<i64> = (0..n)
            .map(|i| self.alphas.iter().map(|a| a[i]).max().unwrap())
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        'outer: loop {
            let p = ExponentVector::new(cur.clone());
            if self.contains_lattice_point(&p) {
                out.push(p);
            }
            for i in 0..n {
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    continue 'outer;
                }
                cur[i] = lo[i];
            }
            break;
        }
        out
    }

    /// Exact membership of an integer point in the closed simplex.
    pub fn contains_lattice_point(&self, p: &ExponentVector) -> bool {
        match barycentric_numerators(&self.alphas, p) {
            Ok((dets, det)) => {
                let sign = det.signum();
                let mut rest = det;
                for &d in &dets {
                    if d * sign < 0 {
                        return false;
                    }
                    rest -= d;
                }
                rest * sign >= 0
            }
            Err(_) => false,
        }
    }
}

/// A circuit polynomial Σ b_i z^{α(i)} + c z^y, stored in normalized form.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitPolynomial {
    support: CircuitSupport,
    b: Vec<Complex64>,
    c: Complex64,
}

/// Derived integer matrices of a normalized support. M has columns
/// α(1),…,α(n); M_j replaces column j by y; M̂ has columns α(j) − y and
/// M̂_j again replaces column j by y. All determinants are exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportMatrices {
    pub m: Vec<Vec<i64>>,
    pub det_m: i64,
    pub det_m_j: Vec<i64>,
    pub m_hat: Vec<Vec<i64>>,
    pub det_m_hat: i64,
    pub det_m_hat_j: Vec<i64>,
}

impl SupportMatrices {
    /// M^t as rows, the shape used by every linear system in this crate.
    pub fn m_transpose(&self) -> Vec<Vec<i64>> {
        transpose(&self.m)
    }

    pub fn m_hat_transpose(&self) -> Vec<Vec<i64>> {
        transpose(&self.m_hat)
    }
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

/// Cramer numerators det(cols with column i replaced by p − α(0)) together
/// with det of the simplex edge matrix. Shared by validation and the exact
/// lattice-point test.
fn barycentric_numerators(
    alphas: &[ExponentVector],
    p: &ExponentVector,
) -> Result<(Vec<i64>, i64), LinalgError> {
    let n = alphas.len() - 1;
    let col = |k: usize, i: usize| alphas[k + 1][i] - alphas[0][i];
    let base: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|k| col(k, i)).collect())
        .collect();
    let det = linalg::det_bareiss(&base)?;
    let rhs: Vec<i64> = (0..n).map(|i| p[i] - alphas[0][i]).collect();
    let mut dets = Vec::with_capacity(n);
    for j in 0..n {
        let mut mj = base.clone();
        for i in 0..n {
            mj[i][j] = rhs[i];
        }
        dets.push(linalg::det_bareiss(&mj)?);
    }
    Ok((dets, det))
}

/// Validates simplex vertices and the inner point, returning a support with
/// cached barycentric coordinates.
pub fn validate_support(
    alphas: Vec<ExponentVector>,
    y: ExponentVector,
) -> Result<CircuitSupport, SupportError> {
    let n = y.dim();
    if !(1..=MAX_DIMENSION).contains(&n) {
        return Err(SupportError::DimensionOutOfRange(n));
    }
    if alphas.len() != n + 1 {
        return Err(SupportError::DimensionMismatch {
            expected: n + 1,
            n,
            index: alphas.len(),
            len: 0,
        });
    }
    for (index, a) in alphas.iter().enumerate() {
        if a.dim() != n {
            return Err(SupportError::DimensionMismatch {
                expected: n + 1,
                n,
                index,
                len: a.dim(),
            });
        }
    }
    for v in alphas.iter().chain(std::iter::once(&y)) {
        if let Some(&e) = v.entries().iter().find(|e| e.abs() > MAX_EXPONENT_ABS) {
            return Err(SupportError::ExponentTooLarge(e));
        }
    }
    let (dets, det) = barycentric_numerators(&alphas, &y)?;
    if det == 0 {
        return Err(SupportError::DegenerateSimplex);
    }
    // Strict interiority, decided exactly over the integers:
    // every λ_j = det_j/det must be positive and they must sum below 1.
    let sign = det.signum();
    let mut rest = det;
    for &d in &dets {
        if d * sign <= 0 {
            return Err(SupportError::PointNotInterior);
        }
        rest -= d;
    }
    if rest * sign <= 0 {
        return Err(SupportError::PointNotInterior);
    }
    let mut bary = vec![rest as f64 / det as f64];
    bary.extend(dets.iter().map(|&d| d as f64 / det as f64));
    Ok(CircuitSupport { n, alphas, y, bary })
}

impl CircuitPolynomial {
    /// Builds and eagerly normalizes a circuit polynomial: exponents are
    /// shifted by −α(0) and all coefficients divided by b_0, which leaves
    /// the variety in the torus unchanged.
    pub fn new(
        support: CircuitSupport,
        b: Vec<Complex64>,
        c: Complex64,
    ) -> Result<Self, SupportError> {
        if b.len() != support.n + 1 {
            return Err(SupportError::CoefficientCountMismatch {
                expected: support.n + 1,
                got: b.len(),
            });
        }
        for z in b.iter().chain(std::iter::once(&c)) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(SupportError::NonFiniteCoefficient);
            }
        }
        if let Some(i) = b.iter().position(|z| z.norm() == 0.0) {
            return Err(SupportError::ZeroOuterCoefficient(i));
        }
        let shift = support.alphas[0].clone();
        let b0 = b[0];
        let alphas: Vec<ExponentVector> =
            support.alphas.iter().map(|a| a.sub(&shift)).collect();
        let y = support.y.sub(&shift);
        let b: Vec<Complex64> = b.iter().map(|&z| z / b0).collect();
        let c = c / b0;
        let support = CircuitSupport {
            n: support.n,
            alphas,
            y,
            bary: support.bary,
        };
        Ok(CircuitPolynomial { support, b, c })
    }

    /// Convenience constructor from raw exponent data.
    pub fn from_parts(
        alphas: Vec<Vec<i64>>,
        y: Vec<i64>,
        b: Vec<Complex64>,
        c: Complex64,
    ) -> Result<Self, SupportError> {
        let support = validate_support(
            alphas.into_iter().map(ExponentVector::new).collect(),
            ExponentVector::new(y),
        )?;
        CircuitPolynomial::new(support, b, c)
    }

    pub fn support(&self) -> &CircuitSupport {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.support.n
    }

    /// Outer coefficients b_0, …, b_n (b_0 = 1 after normalization).
    pub fn outer_coefficients(&self) -> &[Complex64] {
        &self.b
    }

    pub fn inner_coefficient(&self) -> Complex64 {
        self.c
    }

    pub fn is_maximally_sparse(&self) -> bool {
        self.c.norm() == 0.0
    }

    /// Returns the same polynomial with the inner coefficient replaced.
    pub fn with_inner_coefficient(&self, c: Complex64) -> Self {
        let mut f = self.clone();
        f.c = c;
        f
    }

    /// Returns the same support with replaced coefficients (re-normalizes).
    pub fn with_coefficients(
        &self,
        b: Vec<Complex64>,
        c: Complex64,
    ) -> Result<Self, SupportError> {
        CircuitPolynomial::new(self.support.clone(), b, c)
    }

    /// Identity on construction-normalized polynomials; kept as the explicit
    /// normalization entry point and checked idempotent in tests.
    pub fn normalize(&self) -> Self {
        self.clone()
    }
}

/// Computes the derived matrices and their exact determinants.
pub fn support_matrices(support: &CircuitSupport) -> Result<SupportMatrices, SupportError> {
    debug_assert!(support.is_normalized());
    let n = support.n;
    // columns α(1..n)
    let m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| support.alphas[j + 1][i]).collect())
        .collect();
    let det_m = linalg::det_bareiss(&m)?;
    let mut det_m_j = Vec::with_capacity(n);
    for j in 0..n {
        let mut mj = m.clone();
        for (row, &yi) in mj.iter_mut().zip(support.y.entries()) {
            row[j] = yi;
        }
        det_m_j.push(linalg::det_bareiss(&mj)?);
    }
    let m_hat: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| support.alphas[j + 1][i] - support.y[i])
                .collect()
        })
        .collect();
    let det_m_hat = linalg::det_bareiss(&m_hat)?;
    let mut det_m_hat_j = Vec::with_capacity(n);
    for j in 0..n {
        let mut mj = m_hat.clone();
        for (row, &yi) in mj.iter_mut().zip(support.y.entries()) {
            row[j] = yi;
        }
        det_m_hat_j.push(linalg::det_bareiss(&mj)?);
    }
    debug_assert_ne!(det_m, 0);
    debug_assert_ne!(det_m_hat, 0);
    Ok(SupportMatrices {
        m,
        det_m,
        det_m_j,
        m_hat,
        det_m_hat,
        det_m_hat_j,
    })
}
