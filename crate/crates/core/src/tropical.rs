//! Tropicalizations, tropical curves, the equilibrium-set raster, the
//! numeric Ronkin function and the spine.
//!
//! The Ronkin function N_f(w) is the torus average of `log|F[w,f]|`; it is
//! convex, affine on every complement component, and its gradient there is
//! the component order. On a component of order α it equals
//! β_α + ⟨α,w⟩, which is how the Ronkin coefficients β_α are computed here
//! (vertex coefficients are exactly log|b_i|).

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fiber::{self, MembershipVerdict};
use crate::lopsided::SparsePolynomial;
use crate::support::{CircuitPolynomial, ExponentVector};
use crate::Window;

#[derive(Debug, Error, PartialEq)]
pub enum TropicalError {
    #[error("operation is limited to n = {expected}, got n = {got}")]
    DimensionUnsupported { expected: usize, got: usize },
    #[error("quadrature hit a near-zero fiber value even after re-offsetting")]
    QuadratureSingular,
    #[error("point is not certified outside with the requested order")]
    NotInComplement,
    #[error("vertex Ronkin coefficient disagrees with log|b|: {0}")]
    CrossCheckFailed(String),
    #[error("genus classification is indeterminate, spine is not defined")]
    GenusUndecided,
    #[error("no certified point of the inner complement component was found")]
    NoInnerWitness,
}

/// Max-plus polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct TropicalPolynomial {
    /// (coefficient, exponent) pairs; exponents are distinct.
    pub terms: Vec<(f64, ExponentVector)>,
}

impl TropicalPolynomial {
    pub fn new(terms: Vec<(f64, ExponentVector)>) -> Self {
        assert!(!terms.is_empty(), "tropical polynomial must be non-empty");
        TropicalPolynomial { terms }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, a)| c + a.dot(w))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of terms attaining the maximum within `tol`.
    pub fn argmax(&self, w: &[f64], tol: f64) -> Vec<usize> {
        let max = self.value(w);
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, (c, a))| c + a.dot(w) >= max - tol)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub enum TropicalizeMode {
    /// All monomials (the inner one included iff c ≠ 0).
    Full,
    /// Only the given complement orders; vertices are expected to be listed.
    ComplementInduced,
}

/// Builds trop(f) or trop(f|C) with coefficients log|coefficient|.
pub fn tropicalize(
    f: &CircuitPolynomial,
    mode: TropicalizeMode,
    orders: &[ExponentVector],
) -> TropicalPolynomial {
    let support = f.support();
    let keep = |e: &ExponentVector| match mode {
        TropicalizeMode::Full => true,
        TropicalizeMode::ComplementInduced => orders.contains(e),
    };
    let mut terms = Vec::new();
    for (i, b) in f.outer_coefficients().iter().enumerate() {
        if keep(support.alpha(i)) {
            terms.push((b.norm().ln(), support.alpha(i).clone()));
        }
    }
    let c = f.inner_coefficient();
    if c.norm() > 0.0 && keep(support.inner()) {
        terms.push((c.norm().ln(), support.inner().clone()));
    }
    TropicalPolynomial::new(terms)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(untagged)]
pub enum TropicalEdge {
    Segment { from: usize, to: usize },
    Ray { from: usize, ray: [i64; 2] },
}

/// A plane tropical curve: vertices, bounded edges, rays and dual cells.
#[derive(Clone, Debug, Serialize)]
pub struct TropicalCurve {
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<TropicalEdge>,
    /// For each vertex, the exponents attaining the maximum there.
    pub dual: Vec<Vec<ExponentVector>>,
}

const TIE_TOL: f64 = 1e-10;

/// Computes the tropical curve of a max-plus polynomial in two variables by
/// the pairwise-bisector arrangement: for every pair of terms, the locus
/// where both attain the global maximum is a segment, a ray or a line.
pub fn tropical_curve(tp: &TropicalPolynomial) -> Result<TropicalCurve, TropicalError> {
    let n = tp.terms[0].1.dim();
    if n != 2 {
        return Err(TropicalError::DimensionUnsupported { expected: 2, got: n });
    }
    let d = tp.terms.len();
    let coef: Vec<f64> = tp.terms.iter().map(|(c, _)| *c).collect();
    let expo: Vec<[f64; 2]> = tp
        .terms
        .iter()
        .map(|(_, a)| [a[0] as f64, a[1] as f64])
        .collect();
    let expo_i: Vec<[i64; 2]> = tp.terms.iter().map(|(_, a)| [a[0], a[1]]).collect();

    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut edges: Vec<TropicalEdge> = Vec::new();
    let scale = coef.iter().fold(1.0f64, |a, &c| a.max(c.abs()));

    let push_vertex = |vertices: &mut Vec<[f64; 2]>, p: [f64; 2]| -> usize {
        let tol = 1e-9 * (1.0 + p[0].abs() + p[1].abs());
        for (i, q) in vertices.iter().enumerate() {
            if (q[0] - p[0]).abs() <= tol && (q[1] - p[1]).abs() <= tol {
                return i;
            }
        }
        vertices.push(p);
        vertices.len() - 1
    };

    for i in 0..d {
        for j in i + 1..d {
            let delta = [expo_i[i][0] - expo_i[j][0], expo_i[i][1] - expo_i[j][1]];
            if delta == [0, 0] {
                continue;
            }
            let deltaf = [delta[0] as f64, delta[1] as f64];
            let rhs = coef[j] - coef[i];
            let nrm2 = deltaf[0] * deltaf[0] + deltaf[1] * deltaf[1];
            let base = [deltaf[0] * rhs / nrm2, deltaf[1] * rhs / nrm2];
            let dir = primitive([-delta[1], delta[0]]);
            let dirf = [dir[0] as f64, dir[1] as f64];
            // clip the line to the region where term i (== term j) is maximal
            let mut t_lo = f64::NEG_INFINITY;
            let mut t_hi = f64::INFINITY;
            let mut empty = false;
            for k in 0..d {
                if k == i || k == j {
                    continue;
                }
                let a = (expo[i][0] - expo[k][0]) * base[0]
                    + (expo[i][1] - expo[k][1]) * base[1]
                    + (coef[i] - coef[k]);
                let b = (expo[i][0] - expo[k][0]) * dirf[0] + (expo[i][1] - expo[k][1]) * dirf[1];
                if b.abs() <= TIE_TOL {
                    if a < -TIE_TOL * (1.0 + scale) {
                        empty = true;
                        break;
                    }
                } else if b > 0.0 {
                    t_lo = t_lo.max(-a / b);
                } else {
                    t_hi = t_hi.min(-a / b);
                }
            }
            if empty || t_lo > t_hi + TIE_TOL {
                continue;
            }
            match (t_lo.is_finite(), t_hi.is_finite()) {
                (true, true) => {
                    if t_hi - t_lo <= TIE_TOL {
                        // degenerate contact point, not an edge
                        continue;
                    }
                    let p = [base[0] + t_lo * dirf[0], base[1] + t_lo * dirf[1]];
                    let q = [base[0] + t_hi * dirf[0], base[1] + t_hi * dirf[1]];
                    let from = push_vertex(&mut vertices, p);
                    let to = push_vertex(&mut vertices, q);
                    edges.push(TropicalEdge::Segment { from, to });
                }
                (true, false) => {
                    let p = [base[0] + t_lo * dirf[0], base[1] + t_lo * dirf[1]];
                    let from = push_vertex(&mut vertices, p);
                    edges.push(TropicalEdge::Ray { from, ray: dir });
                }
                (false, true) => {
                    let p = [base[0] + t_hi * dirf[0], base[1] + t_hi * dirf[1]];
                    let from = push_vertex(&mut vertices, p);
                    edges.push(TropicalEdge::Ray {
                        from,
                        ray: [-dir[0], -dir[1]],
                    });
                }
                (false, false) => {
                    // a full line: represent it as two rays out of the base point
                    let from = push_vertex(&mut vertices, base);
                    edges.push(TropicalEdge::Ray { from, ray: dir });
                    edges.push(TropicalEdge::Ray {
                        from,
                        ray: [-dir[0], -dir[1]],
                    });
                }
            }
        }
    }
    let dual: Vec<Vec<ExponentVector>> = vertices
        .iter()
        .map(|v| {
            tp.argmax(&[v[0], v[1]], TIE_TOL * (1.0 + scale))
                .into_iter()
                .map(|i| tp.terms[i].1.clone())
                .collect()
        })
        .collect();
    Ok(TropicalCurve {
        vertices,
        edges,
        dual,
    })
}

fn primitive(v: [i64; 2]) -> [i64; 2] {
    let g = num::integer::gcd(v[0].abs(), v[1].abs());
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g]
    }
}

impl TropicalCurve {
    /// Bounded edges as coordinate pairs.
    pub fn segments(&self) -> Vec<([f64; 2], [f64; 2])> {
        self.edges
            .iter()
            .filter_map(|e| match e {
                TropicalEdge::Segment { from, to } => {
                    Some((self.vertices[*from], self.vertices[*to]))
                }
                TropicalEdge::Ray { .. } => None,
            })
            .collect()
    }

    pub fn rays(&self) -> Vec<([f64; 2], [i64; 2])> {
        self.edges
            .iter()
            .filter_map(|e| match e {
                TropicalEdge::Ray { from, ray } => Some((self.vertices[*from], *ray)),
                TropicalEdge::Segment { .. } => None,
            })
            .collect()
    }
}

/// Boolean raster of the norm-equilibrium set (pairwise monomial-norm ties)
/// plus the equilibrium points as labelled markers.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumRaster {
    pub window: Window,
    pub resolution: usize,
    /// Row-major, row 0 at ymin.
    pub cells: Vec<bool>,
    pub markers: Vec<(String, Vec<f64>)>,
}

pub fn equilibrium_set_raster(
    f: &CircuitPolynomial,
    window: Window,
    resolution: usize,
) -> Result<EquilibriumRaster, TropicalError> {
    if f.dim() != 2 {
        return Err(TropicalError::DimensionUnsupported {
            expected: 2,
            got: f.dim(),
        });
    }
    // two pixels in log units, so tie bands stay connected at any window
    let extent = (window.xmax - window.xmin).max(window.ymax - window.ymin);
    let band = 2.0 * extent / resolution as f64;
    let support = f.support();
    let mut logs: Vec<(f64, ExponentVector)> = f
        .outer_coefficients()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.norm().ln(), support.alpha(i).clone()))
        .collect();
    if f.inner_coefficient().norm() > 0.0 {
        logs.push((f.inner_coefficient().norm().ln(), support.inner().clone()));
    }
    let cells: Vec<bool> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let row = idx / resolution;
            let col = idx % resolution;
            let w = window.pixel_center(col, row, resolution);
            let vals: Vec<f64> = logs.iter().map(|(c, a)| c + a.dot(&w)).collect();
            let mut tie = false;
            'outer: for i in 0..vals.len() {
                for j in i + 1..vals.len() {
                    if (vals[i] - vals[j]).abs() < band {
                        tie = true;
                        break 'outer;
                    }
                }
            }
            tie
        })
        .collect();
    let m = crate::support::support_matrices(support).expect("validated support");
    let mut markers = vec![(
        "eq(y)".to_string(),
        crate::equilibrium::equilibrium_point_y(f, &m),
    )];
    if f.inner_coefficient().norm() > 0.0 {
        for j in 0..=f.dim() {
            markers.push((
                format!("eq({j})"),
                crate::equilibrium::equilibrium_point_j(f, j).expect("c != 0"),
            ));
        }
    }
    Ok(EquilibriumRaster {
        window,
        resolution,
        cells,
        markers,
    })
}

/// Default quadrature level (2^8 nodes per axis).
pub const DEFAULT_LEVEL: u32 = 8;

/// Midpoint-rule estimate of the Ronkin function.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RonkinEstimate {
    pub value: f64,
    pub quadrature_points: usize,
    /// |value(level) − value(level−1)|; non-negative by construction.
    pub error_estimate: f64,
}

/// N_f(w) for a sparse polynomial in one or two variables: the mean of
/// `log|F[w,f]|` over a shifted uniform torus grid with 2^level points per
/// axis. A near-zero node triggers one deterministic re-offset before
/// failing with `QuadratureSingular`.
pub fn ronkin_value(
    p: &SparsePolynomial,
    w: &[f64],
    level: u32,
) -> Result<RonkinEstimate, TropicalError> {
    let n = p.dim();
    if n == 0 || n > 2 {
        return Err(TropicalError::DimensionUnsupported { expected: 2, got: n });
    }
    let value = ronkin_level(p, w, level)?;
    let coarse = if level > 0 {
        ronkin_level(p, w, level - 1)?
    } else {
        value
    };
    Ok(RonkinEstimate {
        value,
        quadrature_points: (1usize << level).pow(n as u32),
        error_estimate: (value - coarse).abs(),
    })
}

fn ronkin_level(p: &SparsePolynomial, w: &[f64], level: u32) -> Result<f64, TropicalError> {
    let m = 1usize << level;
    let half = std::f64::consts::PI / m as f64;
    match ronkin_grid(p, w, m, half) {
        Some(v) => Ok(v),
        None => {
            // golden-ratio fractional offset; deterministic by construction
            let offset = std::f64::consts::TAU * 0.381_966_011_250_105 / m as f64;
            ronkin_grid(p, w, m, offset).ok_or(TropicalError::QuadratureSingular)
        }
    }
}

/// Returns None when some node is numerically on the variety.
fn ronkin_grid(p: &SparsePolynomial, w: &[f64], m: usize, offset: f64) -> Option<f64> {
    let n = p.dim();
    let step = std::f64::consts::TAU / m as f64;
    // scaled coefficients: log|F| = log_scale + log|Σ u_t e^{i⟨a,φ⟩}|
    let logs: Vec<f64> = p.terms().map(|(a, c)| c.norm().ln() + a.dot(w)).collect();
    let args: Vec<f64> = p.terms().map(|(_, c)| c.arg()).collect();
    let dirs: Vec<Vec<f64>> = p
        .terms()
        .map(|(a, _)| a.entries().iter().map(|&v| v as f64).collect())
        .collect();
    let log_scale = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let coefs: Vec<Complex64> = logs
        .iter()
        .zip(&args)
        .map(|(&l, &a)| Complex64::from_polar((l - log_scale).exp(), a))
        .collect();
    let usum: f64 = coefs.iter().map(|c| c.norm()).sum();
    let floor = 1e-14 * usum;

    let eval_row = |phi1: f64| -> Option<f64> {
        // pairwise-stable accumulation over the row
        let mut acc = 0.0f64;
        let mut comp = 0.0f64; // Kahan compensation
        if n == 1 {
            let mut g = Complex64::new(0.0, 0.0);
            for (c, d) in coefs.iter().zip(&dirs) {
                g += c * Complex64::from_polar(1.0, d[0] * phi1);
            }
            let a = g.norm();
            if a < floor {
                return None;
            }
            return Some(a.ln());
        }
        for k2 in 0..m {
            let phi2 = k2 as f64 * step + offset;
            let mut g = Complex64::new(0.0, 0.0);
            for (c, d) in coefs.iter().zip(&dirs) {
                g += c * Complex64::from_polar(1.0, d[0] * phi1 + d[1] * phi2);
            }
            let a = g.norm();
            if a < floor {
                return None;
            }
            let y = a.ln() - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        Some(acc)
    };

    let rows: Vec<Option<f64>> = (0..m)
        .into_par_iter()
        .map(|k1| eval_row(k1 as f64 * step + offset))
        .collect();
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for r in rows {
        let y = r? - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    let count = if n == 1 { m } else { m * m };
    Some(log_scale + acc / count as f64)
}

/// Default quadrature level for Ronkin coefficients.
pub const COEFFICIENT_LEVEL: u32 = 10;

/// β_α = N_f(w) − ⟨α,w⟩ at a point w certified outside with order α.
/// Vertex orders are cross-checked against the exact value log|b_i|.
pub fn ronkin_coefficient(
    f: &CircuitPolynomial,
    order: &ExponentVector,
    w: &[f64],
    level: u32,
) -> Result<f64, TropicalError> {
    match fiber::membership(f, w) {
        Ok(MembershipVerdict::Outside { order: got, .. }) if &got == order => {}
        _ => return Err(TropicalError::NotInComplement),
    }
    let sparse = SparsePolynomial::from(f);
    let est = ronkin_value(&sparse, w, level)?;
    let beta = est.value - order.dot(w);
    for (i, b) in f.outer_coefficients().iter().enumerate() {
        if f.support().alpha(i) == order {
            let exact = b.norm().ln();
            let tol = 5.0 * est.error_estimate + 1e-7;
            if (beta - exact).abs() > tol {
                return Err(TropicalError::CrossCheckFailed(format!(
                    "quadrature {beta} vs exact {exact} (tolerance {tol})"
                )));
            }
            return Ok(exact);
        }
    }
    Ok(beta)
}

/// The spine: tropical curve of ⊕ β_α ⊙ w^α over the realized orders.
/// Vertex coefficients are exact; the inner coefficient is quadrature-based
/// at a certified point of the inner complement component.
pub fn spine(f: &CircuitPolynomial) -> Result<TropicalCurve, TropicalError> {
    if f.dim() != 2 {
        return Err(TropicalError::DimensionUnsupported {
            expected: 2,
            got: f.dim(),
        });
    }
    let report = fiber::classify_genus(f);
    let genus1 = match report.verdict {
        fiber::GenusVerdict::Genus1 => true,
        fiber::GenusVerdict::Solid => false,
        fiber::GenusVerdict::Indeterminate => return Err(TropicalError::GenusUndecided),
    };
    let support = f.support();
    let mut terms: Vec<(f64, ExponentVector)> = f
        .outer_coefficients()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.norm().ln(), support.alpha(i).clone()))
        .collect();
    if genus1 {
        let m = crate::support::support_matrices(support).expect("validated support");
        let candidates = [
            crate::equilibrium::equilibrium_point_y(f, &m),
            crate::appearance::appearance_point(f, &m).a_point,
        ];
        let y = support.inner();
        let mut beta_y = None;
        for w in &candidates {
            if let Ok(beta) = ronkin_coefficient(f, y, w, COEFFICIENT_LEVEL) {
                beta_y = Some(beta);
                break;
            }
        }
        let beta_y = beta_y.ok_or(TropicalError::NoInnerWitness)?;
        terms.push((beta_y, y.clone()));
    }
    tropical_curve(&TropicalPolynomial::new(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sheared_deltoid() -> CircuitPolynomial {
        CircuitPolynomial::from_parts(
            vec![vec![0, 0], vec![2, 1], vec![1, 2]],
            vec![1, 1],
            vec![cx(1.0, 0.0); 3],
            cx(-4.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn tropicalize_full() {
        let tp = tropicalize(&sheared_deltoid(), TropicalizeMode::Full, &[]);
        assert_eq!(tp.terms.len(), 4);
        let four = tp
            .terms
            .iter()
            .find(|(_, a)| a == &ExponentVector::new(vec![1, 1]))
            .unwrap();
        assert!((four.0 - 4.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sheared_deltoid_curve_vertices() {
        let tp = tropicalize(&sheared_deltoid(), TropicalizeMode::Full, &[]);
        let curve = tropical_curve(&tp).unwrap();
        let l4 = 4.0f64.ln();
        assert_eq!(curve.vertices.len(), 3);
        let expect = [[l4, -2.0 * l4], [-2.0 * l4, l4], [l4, l4]];
        for e in expect {
            assert!(
                curve
                    .vertices
                    .iter()
                    .any(|v| (v[0] - e[0]).abs() < 1e-9 && (v[1] - e[1]).abs() < 1e-9),
                "missing vertex {e:?} in {:?}",
                curve.vertices
            );
        }
        assert_eq!(curve.segments().len(), 3);
        assert_eq!(curve.rays().len(), 3);
        // dual cells at every vertex have exactly three tying exponents
        for cell in &curve.dual {
            assert_eq!(cell.len(), 3);
        }
    }

    #[test]
    fn complement_induced_equals_full_when_all_orders_realized() {
        let f = sheared_deltoid();
        let report = crate::fiber::classify_genus(&f);
        let orders = crate::fiber::complement_orders(&f, &report);
        assert_eq!(orders.len(), 4);
        let full = tropicalize(&f, TropicalizeMode::Full, &[]);
        let induced = tropicalize(&f, TropicalizeMode::ComplementInduced, &orders);
        assert_eq!(full.terms.len(), induced.terms.len());
        for (a, b) in full.terms.iter().zip(&induced.terms) {
            assert_eq!(a.1, b.1);
            assert_eq!(a.0, b.0);
        }
    }

    #[test]
    fn genus1_dual_cells_form_the_stellar_triangulation() {
        // every curve vertex is dual to a triangle {α(i), α(j), y}
        let tp = tropicalize(&sheared_deltoid(), TropicalizeMode::Full, &[]);
        let curve = tropical_curve(&tp).unwrap();
        let y = ExponentVector::new(vec![1, 1]);
        for cell in &curve.dual {
            assert_eq!(cell.len(), 3);
            assert!(cell.contains(&y), "inner point missing from dual cell {cell:?}");
        }
    }

    #[test]
    fn curve_json_wire_shape() {
        let tp = tropicalize(&sheared_deltoid(), TropicalizeMode::Full, &[]);
        let curve = tropical_curve(&tp).unwrap();
        let value = serde_json::to_value(&curve).unwrap();
        assert!(value["vertices"][0].is_array());
        let edges = value["edges"].as_array().unwrap();
        assert!(edges
            .iter()
            .any(|e| e.get("to").is_some() && e.get("from").is_some()));
        assert!(edges
            .iter()
            .any(|e| e.get("ray").map(|r| r.is_array()).unwrap_or(false)));
        assert!(value["dual"][0][0].is_array());
    }

    #[test]
    fn solid_curve_has_single_vertex() {
        let f = CircuitPolynomial::from_parts(
            vec![vec![0, 0], vec![3, 0], vec![0, 3]],
            vec![1, 1],
            vec![cx(1.0, 0.0); 3],
            cx(0.0, 0.0),
        )
        .unwrap();
        let tp = tropicalize(&f, TropicalizeMode::Full, &[]);
        let curve = tropical_curve(&tp).unwrap();
        assert_eq!(curve.vertices.len(), 1);
        assert!(curve.vertices[0][0].abs() < 1e-12);
        assert!(curve.vertices[0][1].abs() < 1e-12);
        assert_eq!(curve.rays().len(), 3);
        assert_eq!(curve.segments().len(), 0);
    }

    #[test]
    fn random_points_off_curve_have_unique_maximizer() {
        let tp = tropicalize(&sheared_deltoid(), TropicalizeMode::Full, &[]);
        let curve = tropical_curve(&tp).unwrap();
        let mut checked = 0;
        for k in 0..64 {
            let w = [
                -3.0 + 6.0 * (k % 8) as f64 / 7.0 + 0.0137,
                -3.0 + 6.0 * (k / 8) as f64 / 7.0 + 0.0213,
            ];
            let near_curve = curve.segments().iter().any(|(p, q)| {
                let d = point_segment_distance(w, *p, *q);
                d < 0.05
            }) || curve.rays().iter().any(|(p, r)| {
                let q = [p[0] + 100.0 * r[0] as f64, p[1] + 100.0 * r[1] as f64];
                point_segment_distance(w, *p, q) < 0.05
            });
            if near_curve {
                continue;
            }
            checked += 1;
            assert_eq!(tp.argmax(&w, 1e-10).len(), 1, "tie off the curve at {w:?}");
        }
        assert!(checked > 20);
    }

    fn point_segment_distance(w: [f64; 2], p: [f64; 2], q: [f64; 2]) -> f64 {
        let d = [q[0] - p[0], q[1] - p[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((w[0] - p[0]) * d[0] + (w[1] - p[1]) * d[1]) / len2).clamp(0.0, 1.0)
        };
        let c = [p[0] + t * d[0], p[1] + t * d[1]];
        ((w[0] - c[0]).powi(2) + (w[1] - c[1]).powi(2)).sqrt()
    }

    #[test]
    fn ronkin_matches_jensen_formula() {
        // N_{1+z}(w) = max(0, w)
        let p = SparsePolynomial::from_terms(
            1,
            [
                (ExponentVector::new(vec![0]), cx(1.0, 0.0)),
                (ExponentVector::new(vec![1]), cx(1.0, 0.0)),
            ],
        );
        for (w, want) in [(2.0, 2.0), (-2.0, 0.0), (0.7, 0.7), (-0.5, 0.0)] {
            let est = ronkin_value(&p, &[w], 12).unwrap();
            assert!(
                (est.value - want).abs() < 1e-6,
                "N(w={w}) = {} want {want}",
                est.value
            );
        }
    }

    #[test]
    fn ronkin_convexity_on_segments() {
        let sparse = SparsePolynomial::from(&sheared_deltoid());
        let pairs = [
            ([0.0, 0.0], [1.0, 0.5]),
            ([-1.0, 0.3], [0.7, -0.4]),
            ([2.0, 1.0], [-0.5, -0.5]),
        ];
        for (a, b) in pairs {
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let na = ronkin_value(&sparse, &a, 8).unwrap();
            let nb = ronkin_value(&sparse, &b, 8).unwrap();
            let nm = ronkin_value(&sparse, &mid, 8).unwrap();
            let err = na.error_estimate.max(nb.error_estimate).max(nm.error_estimate);
            assert!(nm.value <= (na.value + nb.value) / 2.0 + 3.0 * err);
        }
    }

    #[test]
    fn ronkin_gradient_recovers_order() {
        let sparse = SparsePolynomial::from(&sheared_deltoid());
        let h = 1e-3;
        let w = [10.0, 0.0];
        let mut grad = [0.0; 2];
        for k in 0..2 {
            let mut wp = w;
            let mut wm = w;
            wp[k] += h;
            wm[k] -= h;
            let np = ronkin_value(&sparse, &wp, 8).unwrap();
            let nm = ronkin_value(&sparse, &wm, 8).unwrap();
            grad[k] = (np.value - nm.value) / (2.0 * h);
        }
        assert!((grad[0] - 2.0).abs() < 1e-2, "grad {grad:?}");
        assert!((grad[1] - 1.0).abs() < 1e-2);
    }

    #[test]
    fn quadrature_flags_zeros_on_both_offset_grids() {
        // a polynomial with one zero on a node of the primary shifted grid
        // and one on a node of the fallback grid: (1 − e^{−iφ_a}z)(1 − e^{−iφ_b}z)
        let level = 3;
        let m = 1usize << level;
        let step = std::f64::consts::TAU / m as f64;
        let phi_a = std::f64::consts::PI / m as f64; // primary offset, node 0
        let phi_b = std::f64::consts::TAU * 0.381_966_011_250_105 / m as f64;
        let a = Complex64::from_polar(1.0, -phi_a);
        let b = Complex64::from_polar(1.0, -(2.0 * step + phi_b)); // node 2
        let p = SparsePolynomial::from_terms(
            1,
            [
                (ExponentVector::new(vec![0]), cx(1.0, 0.0)),
                (ExponentVector::new(vec![1]), -(a + b)),
                (ExponentVector::new(vec![2]), a * b),
            ],
        );
        assert_eq!(
            ronkin_value(&p, &[0.0], level).unwrap_err(),
            TropicalError::QuadratureSingular
        );
        // a single on-node zero is survived by the fallback offset
        let q = SparsePolynomial::from_terms(
            1,
            [
                (ExponentVector::new(vec![0]), cx(1.0, 0.0)),
                (ExponentVector::new(vec![1]), -a),
            ],
        );
        assert!(ronkin_value(&q, &[0.0], level).is_ok());
    }

    #[test]
    fn vertex_coefficient_is_exact_log_b() {
        let f = sheared_deltoid();
        // w = (-10,-10) is deep in the order-(0,0) component
        let beta = ronkin_coefficient(&f, &ExponentVector::new(vec![0, 0]), &[-10.0, -10.0], 8)
            .unwrap();
        assert_eq!(beta, 0.0);
    }

    #[test]
    fn inner_coefficient_affinity() {
        let f = sheared_deltoid();
        let y = ExponentVector::new(vec![1, 1]);
        let beta = ronkin_coefficient(&f, &y, &[0.0, 0.0], 10).unwrap();
        // affinity: N_f(w') = β_y + ⟨y,w'⟩ nearby
        let sparse = SparsePolynomial::from(&f);
        let w2 = [0.05, 0.05];
        let est = ronkin_value(&sparse, &w2, 10).unwrap();
        assert!(
            (est.value - beta - (w2[0] + w2[1])).abs() < 3.0 * est.error_estimate + 1e-7,
            "affine identity violated"
        );
    }

    #[test]
    fn requesting_beta_y_of_solid_amoeba_fails() {
        let f = CircuitPolynomial::from_parts(
            vec![vec![0, 0], vec![3, 0], vec![0, 3]],
            vec![1, 1],
            vec![cx(1.0, 0.0); 3],
            cx(0.5, 0.0),
        )
        .unwrap();
        let err = ronkin_coefficient(&f, &ExponentVector::new(vec![1, 1]), &[0.0, 0.0], 8)
            .unwrap_err();
        assert_eq!(err, TropicalError::NotInComplement);
    }

    #[test]
    fn spine_of_solid_amoeba_is_complement_induced_tropicalization() {
        let f = CircuitPolynomial::from_parts(
            vec![vec![0, 0], vec![3, 0], vec![0, 3]],
            vec![1, 1],
            vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(0.5, 0.5)],
            cx(0.3, 0.0),
        )
        .unwrap();
        let s = spine(&f).unwrap();
        let orders: Vec<ExponentVector> = f.support().alphas().to_vec();
        let c = tropical_curve(&tropicalize(&f, TropicalizeMode::ComplementInduced, &orders))
            .unwrap();
        assert_eq!(s.vertices.len(), c.vertices.len());
        for (a, b) in s.vertices.iter().zip(&c.vertices) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn spine_rays_match_complement_induced_rays_for_sheared_deltoid() {
        let f = sheared_deltoid();
        let s = spine(&f).unwrap();
        let tp = tropicalize(&f, TropicalizeMode::Full, &[]);
        let c = tropical_curve(&tp).unwrap();
        let mut s_rays: Vec<[i64; 2]> = s.rays().iter().map(|(_, r)| *r).collect();
        let mut c_rays: Vec<[i64; 2]> = c.rays().iter().map(|(_, r)| *r).collect();
        s_rays.sort();
        c_rays.sort();
        assert_eq!(s_rays, c_rays);
        // outside both inner triangles the supports coincide: ray base
        // points agree because vertex coefficients are shared
        for ((sp, sr), (cp, cr)) in s
            .rays()
            .iter()
            .zip(c.rays().iter())
        {
            let _ = (sr, cr);
            // rays emanate from triangle corners that differ, but their
            // supporting lines must coincide; check collinearity of the
            // base offset with the ray direction
            let dx = sp[0] - cp[0];
            let dy = sp[1] - cp[1];
            let ray = s
                .rays()
                .iter()
                .map(|(_, r)| *r)
                .find(|r| (dx * r[1] as f64 - dy * r[0] as f64).abs() < 1e-7);
            assert!(
                ray.is_some() || (dx.abs() < 1e-9 && dy.abs() < 1e-9),
                "spine ray base {sp:?} is off the matching tentacle line {cp:?}"
            );
        }
    }

    #[test]
    fn spine_of_nonbarycentric_genus1_instance() {
        // sharp-bound genus 1: the spine still has the stellar shape with a
        // bounded inner triangle
        let f = CircuitPolynomial::from_parts(
            vec![vec![0, 0], vec![4, 0], vec![0, 4]],
            vec![2, 1],
            vec![cx(1.0, 0.0); 3],
            cx(5.0, 0.0),
        )
        .unwrap();
        let s = spine(&f).unwrap();
        assert_eq!(s.vertices.len(), 3);
        assert_eq!(s.segments().len(), 3);
        assert_eq!(s.rays().len(), 3);
        for cell in &s.dual {
            assert!(cell.contains(&ExponentVector::new(vec![2, 1])));
        }
    }

    #[test]
    fn equilibrium_raster_contains_tropical_curve() {
        let f = sheared_deltoid();
        let window = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let res = 128;
        let raster = equilibrium_set_raster(&f, window, res).unwrap();
        let tp = tropicalize(&f, TropicalizeMode::Full, &[]);
        let curve = tropical_curve(&tp).unwrap();
        // sample points along each bounded edge and check a marked pixel
        // sits within one pixel
        for (p, q) in curve.segments() {
            for s in 0..=8 {
                let t = s as f64 / 8.0;
                let w = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
                assert!(
                    marked_near(&raster, w, 1),
                    "curve point {w:?} not covered by equilibrium raster"
                );
            }
        }
        // n+2 markers: eq(y) plus eq(0), …, eq(n)
        assert_eq!(raster.markers.len(), 4);
    }

    fn marked_near(raster: &EquilibriumRaster, w: [f64; 2], radius: i64) -> bool {
        let res = raster.resolution;
        let Some((col, row)) = raster.window.pixel_of(w[0], w[1], res) else {
            return false;
        };
        for dr in -radius..=radius {
            for dc in -radius..=radius {
                let r = row as i64 + dr;
                let c = col as i64 + dc;
                if r >= 0 && c >= 0 && (r as usize) < res && (c as usize) < res
                    && raster.cells[r as usize * res + c as usize] {
                        return true;
                    }
            }
        }
        false
    }
}
