//! Exact genus decisions and genus-preserving coefficient paths for
//! barycentric supports (Σ α(j) = (n+1)·y).
//!
//! For these supports the inner coefficients c producing a fiber zero at
//! eq(y) form a closed region S bounded by a hypocycloid with radii
//! R = (n+1)|Θ| and r = |Θ|: the amoeba has genus 1 exactly when c lies
//! outside S. The boundary is parameterized by
//! F(μ,ψ) = |Θ|·μ·e^{iψ} + |Θ|·e^{i(−nψ+δ)}, δ = β + (n+1)π with
//! β = Σ arg(b_j); cusps sit at arguments (δ + 2πk)/(n+1) with modulus
//! (n+1)|Θ|, which are exactly the discriminant roots and the
//! extreme-opposition arguments.

use std::f64::consts::TAU;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::appearance;
use crate::fiber::{Certificate, ClassifyMethod, GenusReport, GenusVerdict};
use crate::io::ComplexRepr;
use crate::support::{support_matrices, CircuitPolynomial};

#[derive(Debug, Error, PartialEq)]
pub enum BarycentricError {
    #[error("support is not barycentric: Σ α(j) ≠ (n+1)·y")]
    NotBarycentric,
    #[error("endpoints do not share the same circuit support")]
    SupportMismatch,
    #[error("path endpoint `{0}` does not classify as genus 1")]
    InputNotGenus1(&'static str),
    #[error("path verification failed at stage {stage:?}, sample {index}")]
    VerificationFailed { stage: StageLabel, index: usize },
}

/// Hypocycloid data of the exact genus region.
#[derive(Clone, Debug, Serialize)]
pub struct RegionGeometry {
    pub n: usize,
    pub theta_abs: f64,
    /// β = Σ arg(b_j).
    pub beta: f64,
    /// Phase of the counter-rotating term: δ = β + (n+1)π (mod 2π).
    pub delta: f64,
    /// Lower endpoint of the μ-range: −n + 1 + (−1)^{n+1}.
    pub k_lower: f64,
    /// Cusp arguments (δ + 2πk)/(n+1), sorted in [0, 2π); cusps have
    /// modulus (n+1)|Θ|.
    pub cusp_args: Vec<f64>,
    /// Outer radius R = (n+1)|Θ|.
    pub big_radius: f64,
    /// Rolling-circle radius r = |Θ|.
    pub small_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RegionPosition {
    Inside,
    Outside,
    OnBoundary { distance: f64 },
}

pub fn region_geometry(f: &CircuitPolynomial) -> Result<RegionGeometry, BarycentricError> {
    if !f.support().is_barycentric() {
        return Err(BarycentricError::NotBarycentric);
    }
    let n = f.dim();
    let m = support_matrices(f.support()).expect("validated support");
    let (theta_abs, _) = crate::equilibrium::theta(f, &m);
    let beta: f64 = f.outer_coefficients().iter().map(|b| b.arg()).sum();
    let delta = (beta + (n as f64 + 1.0) * std::f64::consts::PI).rem_euclid(TAU);
    let mut cusp_args: Vec<f64> = (0..=n)
        .map(|k| ((delta + TAU * k as f64) / (n as f64 + 1.0)).rem_euclid(TAU))
        .collect();
    cusp_args.sort_by(f64::total_cmp);
    let k_lower = -(n as f64) + 1.0 + if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(RegionGeometry {
        n,
        theta_abs,
        beta,
        delta,
        k_lower,
        cusp_args,
        big_radius: (n as f64 + 1.0) * theta_abs,
        small_radius: theta_abs,
    })
}

impl RegionGeometry {
    /// F(μ,ψ) = |Θ|·μ·e^{iψ} + |Θ|·e^{i(−nψ+δ)}.
    pub fn stroke(&self, mu: f64, psi: f64) -> Complex64 {
        Complex64::from_polar(self.theta_abs * mu, psi)
            + Complex64::from_polar(self.theta_abs, -(self.n as f64) * psi + self.delta)
    }

    /// The boundary curve F(n, ψ).
    pub fn boundary_point(&self, psi: f64) -> Complex64 {
        self.stroke(self.n as f64, psi)
    }

    /// c = F(μ,ψ) ⇔ d(ψ) = μ is real; membership asks for d(ψ) real in
    /// [k_lower, n].
    fn stroke_parameter(&self, c: Complex64, psi: f64) -> Complex64 {
        (c / self.theta_abs) * Complex64::from_polar(1.0, -psi)
            - Complex64::from_polar(1.0, -(self.n as f64 + 1.0) * psi + self.delta)
    }

    /// Distance from c to the boundary curve.
    pub fn boundary_distance(&self, c: Complex64) -> f64 {
        let samples = 4096;
        let dist2 = |psi: f64| (c - self.boundary_point(psi)).norm_sqr();
        let vals: Vec<f64> = (0..samples)
            .map(|k| dist2(TAU * k as f64 / samples as f64))
            .collect();
        let mut best = f64::INFINITY;
        for k in 0..samples {
            let prev = vals[(k + samples - 1) % samples];
            let next = vals[(k + 1) % samples];
            if vals[k] <= prev && vals[k] <= next {
                let center = TAU * k as f64 / samples as f64;
                let h = TAU / samples as f64;
                best = best.min(golden_min(&dist2, center - h, center + h));
            }
        }
        best.sqrt()
    }
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

const PSI_GRID: usize = 1024;
const BISECTION_STEPS: usize = 60;
const MU_TOL: f64 = 1e-9;

/// Decides whether c lies in the fiber-zero region S. Membership is a
/// one-dimensional root search: c ∈ S iff Im d(ψ) has a zero with
/// Re d(ψ) ∈ [k_lower, n]. Points within 1e-9 (relative to the outer
/// radius) of the boundary curve are reported as OnBoundary; this subsumes
/// the μ ≈ n endpoint case since F(μ,ψ) is |Θ|-Lipschitz in μ.
pub fn in_region(geom: &RegionGeometry, c: Complex64) -> RegionPosition {
    let boundary_tol = 1e-9 * geom.big_radius.max(1.0);
    let distance = geom.boundary_distance(c);
    if distance < boundary_tol {
        return RegionPosition::OnBoundary { distance };
    }

    let scale = 1.0 + c.norm() / geom.theta_abs;
    let im_d = |psi: f64| geom.stroke_parameter(c, psi).im;
    let vals: Vec<f64> = (0..PSI_GRID)
        .map(|k| im_d(TAU * k as f64 / PSI_GRID as f64))
        .collect();
    let mut candidates: Vec<f64> = Vec::new();
    for k in 0..PSI_GRID {
        let a = TAU * k as f64 / PSI_GRID as f64;
        let b = TAU * (k + 1) as f64 / PSI_GRID as f64;
        let fa = vals[k];
        let fb = vals[(k + 1) % PSI_GRID];
        if fa == 0.0 {
            candidates.push(a);
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                let fm = im_d(mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            candidates.push(0.5 * (lo + hi));
        } else {
            // tangential zeros leave no sign change; chase local minima of
            // |Im d| below a conservative threshold
            let prev = vals[(k + PSI_GRID - 1) % PSI_GRID].abs();
            let next = fb.abs();
            let cur = fa.abs();
            if cur <= prev && cur <= next && cur < 1e-6 * scale {
                let h = TAU / PSI_GRID as f64;
                let abs_im = |psi: f64| im_d(psi).abs();
                let refined = golden_min(&abs_im, a - h, a + h);
                if refined < 1e-12 * scale {
                    // recover the argmin by a short local search
                    let mut best = (abs_im(a), a);
                    let steps = 64;
                    for s in 0..=steps {
                        let psi = a - h + 2.0 * h * s as f64 / steps as f64;
                        let v = abs_im(psi);
                        if v < best.0 {
                            best = (v, psi);
                        }
                    }
                    candidates.push(golden_argmin(&abs_im, best.1 - h / 8.0, best.1 + h / 8.0));
                }
            }
        }
    }
    for psi in candidates {
        let mu = geom.stroke_parameter(c, psi).re;
        if mu >= geom.k_lower - MU_TOL && mu <= geom.n as f64 + MU_TOL {
            return RegionPosition::Inside;
        }
    }
    RegionPosition::Outside
}

fn golden_argmin(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Exact genus decision for a barycentric polynomial: genus 1 iff c lies
/// outside the region; eq(y) is then a certified point of the bounded
/// complement component.
pub fn barycentric_genus_test(f: &CircuitPolynomial) -> Result<GenusReport, BarycentricError> {
    let geom = region_geometry(f)?;
    let position = in_region(&geom, f.inner_coefficient());
    let m = support_matrices(f.support()).expect("validated support");
    let (verdict, witness) = match position {
        RegionPosition::Outside => (
            GenusVerdict::Genus1,
            Some(crate::equilibrium::equilibrium_point_y(f, &m)),
        ),
        RegionPosition::Inside => (GenusVerdict::Solid, None),
        RegionPosition::OnBoundary { .. } => (GenusVerdict::Indeterminate, None),
    };
    Ok(GenusReport {
        verdict,
        method: ClassifyMethod::BarycentricExact,
        certificate: Certificate::RegionTest {
            position,
            theta_abs: geom.theta_abs,
            cusp_modulus: geom.big_radius,
            cusp_args: geom.cusp_args.clone(),
            witness_eq_y: witness,
        },
    })
}

/// Samples the boundary curve at uniformly spaced ψ including every cusp
/// exactly. `m` is rounded up to a multiple of n+1 so the cusps land on
/// grid points.
pub fn region_boundary_samples(geom: &RegionGeometry, m: usize) -> Vec<Complex64> {
    assert!(
        m >= 3 * (geom.n + 1),
        "need at least {} samples",
        3 * (geom.n + 1)
    );
    let groups = geom.n + 1;
    let m_adj = m.div_ceil(groups) * groups;
    let start = geom.delta / (groups as f64);
    (0..m_adj)
        .map(|j| geom.boundary_point(start + TAU * j as f64 / m_adj as f64))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StageLabel {
    Gamma1,
    Gamma3,
    Gamma4,
    Gamma2,
    SinglePoint,
}

/// One verified polyline in coefficient space C^{n+2}.
#[derive(Clone, Debug, Serialize)]
pub struct PathStage {
    pub label: StageLabel,
    /// Each point is (b_0, …, b_n, c).
    pub points: Vec<Vec<ComplexRepr>>,
    pub verified: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientPath {
    /// Inner-coefficient modulus at which every phase/modulus move stays
    /// lopsided with the inner term dominant.
    pub kappa: f64,
    pub stages: Vec<PathStage>,
}

impl CoefficientPath {
    pub fn total_samples(&self) -> usize {
        self.stages.iter().map(|s| s.points.len()).sum()
    }

    pub fn first_point(&self) -> &[ComplexRepr] {
        &self.stages.first().unwrap().points.first().unwrap()[..]
    }

    pub fn last_point(&self) -> &[ComplexRepr] {
        &self.stages.last().unwrap().points.last().unwrap()[..]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PathOptions {
    pub samples_per_stage: usize,
    pub kappa_samples: usize,
    pub max_retries: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            samples_per_stage: 101,
            kappa_samples: 64,
            max_retries: 3,
        }
    }
}

/// Builds a genus-preserving path between two genus-1 polynomials on the
/// same barycentric support: raise |c| to κ (γ1), rotate all coefficient
/// phases (γ3), interpolate the outer moduli (γ4), then lower |c| (γ2).
/// Every sampled point is re-verified by the exact region test.
pub fn path_connect(
    a: &CircuitPolynomial,
    b: &CircuitPolynomial,
    options: &PathOptions,
) -> Result<CoefficientPath, BarycentricError> {
    if a.support() != b.support() {
        return Err(BarycentricError::SupportMismatch);
    }
    if barycentric_genus_test(a)?.verdict != GenusVerdict::Genus1 {
        return Err(BarycentricError::InputNotGenus1("a"));
    }
    if barycentric_genus_test(b)?.verdict != GenusVerdict::Genus1 {
        return Err(BarycentricError::InputNotGenus1("b"));
    }
    if a.outer_coefficients() == b.outer_coefficients()
        && a.inner_coefficient() == b.inner_coefficient()
    {
        let point = coefficient_point(a.outer_coefficients(), a.inner_coefficient());
        return Ok(CoefficientPath {
            kappa: a.inner_coefficient().norm(),
            stages: vec![PathStage {
                label: StageLabel::SinglePoint,
                points: vec![point],
                verified: vec![true],
            }],
        });
    }

    // κ = 1 + max_λ min_w Σ m_i(λ) e^{⟨w,α(i)−y⟩} over the moduli
    // interpolation m(λ) that stage γ4 actually traverses. The min-sum is
    // concave in λ, so a golden-section pass around the best grid sample
    // nails the max.
    let moduli_a: Vec<f64> = a.outer_coefficients().iter().map(|z| z.norm()).collect();
    let moduli_b: Vec<f64> = b.outer_coefficients().iter().map(|z| z.norm()).collect();
    let minsum = |lambda: f64| -> f64 {
        let radii: Vec<f64> = moduli_a
            .iter()
            .zip(&moduli_b)
            .map(|(&ma, &mb)| ma + lambda * (mb - ma))
            .collect();
        appearance::convex_norm_minimum(a.support(), &radii, 1e-10).1
    };
    let samples = options.kappa_samples.max(2);
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..samples {
        let v = minsum(k as f64 / (samples - 1) as f64);
        if v > best.1 {
            best = (k, v);
        }
    }
    let h = 1.0 / (samples - 1) as f64;
    let lo = (best.0 as f64 * h - h).max(0.0);
    let hi = (best.0 as f64 * h + h).min(1.0);
    let neg = |l: f64| -minsum(l);
    let refined = -neg(golden_argmin(&neg, lo, hi));
    let mut kappa = 1.0 + refined.max(best.1);
    let mut attempts = 0usize;

    loop {
        match build_stages(a, b, kappa, options) {
            Ok(stages) => return Ok(CoefficientPath { kappa, stages }),
            Err(err) => {
                // insufficient margin: grow κ and retry
                if attempts == options.max_retries {
                    return Err(err);
                }
                attempts += 1;
                kappa *= 1.5;
            }
        }
    }
}

fn coefficient_point(outer: &[Complex64], inner: Complex64) -> Vec<ComplexRepr> {
    outer
        .iter()
        .copied()
        .chain(std::iter::once(inner))
        .map(ComplexRepr::from)
        .collect()
}

fn wrap_to_pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

fn build_stages(
    a: &CircuitPolynomial,
    b: &CircuitPolynomial,
    kappa: f64,
    options: &PathOptions,
) -> Result<Vec<PathStage>, BarycentricError> {
    let n = a.dim();
    let steps = options.samples_per_stage.max(2);
    let arg_ca = a.inner_coefficient().arg();
    let arg_cb = b.inner_coefficient().arg();
    let outer_a = a.outer_coefficients();
    let outer_b = b.outer_coefficients();

    // γ1: |c| moves from |c_a| to κ at fixed argument; a straight radial
    // segment, since the region is star-shaped the route never re-enters it
    // (verified below anyway, with a κ-retry as the fallback).
    let gamma1: Vec<(Vec<Complex64>, Complex64)> = (0..steps)
        .map(|s| {
            let t = s as f64 / (steps - 1) as f64;
            let r = a.inner_coefficient().norm() * (1.0 - t) + kappa * t;
            (outer_a.to_vec(), Complex64::from_polar(r, arg_ca))
        })
        .collect();
    // γ3: rotate all phases (outer a→b, inner arg(c_a)→arg(c_b)) at fixed
    // moduli (outer |a_i|, inner κ)
    let dphi: Vec<f64> = (0..=n)
        .map(|i| wrap_to_pi(outer_b[i].arg() - outer_a[i].arg()))
        .collect();
    let dphi_c = wrap_to_pi(arg_cb - arg_ca);
    let gamma3: Vec<(Vec<Complex64>, Complex64)> = (0..steps)
        .map(|s| {
            let t = s as f64 / (steps - 1) as f64;
            let outer: Vec<Complex64> = (0..=n)
                .map(|i| Complex64::from_polar(outer_a[i].norm(), outer_a[i].arg() + t * dphi[i]))
                .collect();
            (outer, Complex64::from_polar(kappa, arg_ca + t * dphi_c))
        })
        .collect();
    // γ4: interpolate outer moduli at b-phases, inner fixed at κ·e^{i arg c_b}
    let gamma4: Vec<(Vec<Complex64>, Complex64)> = (0..steps)
        .map(|s| {
            let t = s as f64 / (steps - 1) as f64;
            let outer: Vec<Complex64> = (0..=n)
                .map(|i| {
                    let r = outer_a[i].norm() * (1.0 - t) + outer_b[i].norm() * t;
                    Complex64::from_polar(r, outer_b[i].arg())
                })
                .collect();
            (outer, Complex64::from_polar(kappa, arg_cb))
        })
        .collect();
    // γ2: lower |c| from κ to |c_b| at b's coefficients
    let gamma2: Vec<(Vec<Complex64>, Complex64)> = (0..steps)
        .map(|s| {
            let t = s as f64 / (steps - 1) as f64;
            let r = kappa * (1.0 - t) + b.inner_coefficient().norm() * t;
            (outer_b.to_vec(), Complex64::from_polar(r, arg_cb))
        })
        .collect();

    let mut stages = Vec::new();
    for (label, mut samples) in [
        (StageLabel::Gamma1, gamma1),
        (StageLabel::Gamma3, gamma3),
        (StageLabel::Gamma4, gamma4),
        (StageLabel::Gamma2, gamma2),
    ] {
        // pin exact endpoints so consecutive stages meet bit-for-bit
        match label {
            StageLabel::Gamma1 => {
                samples[0] = (outer_a.to_vec(), a.inner_coefficient());
            }
            StageLabel::Gamma2 => {
                let last = samples.len() - 1;
                samples[last] = (outer_b.to_vec(), b.inner_coefficient());
            }
            _ => {}
        }
        let verdicts: Vec<bool> = samples
            .par_iter()
            .map(|(outer, c)| {
                let poly = a
                    .with_coefficients(outer.clone(), *c)
                    .expect("outer moduli stay positive along the path");
                matches!(
                    barycentric_genus_test(&poly).map(|r| r.verdict),
                    Ok(GenusVerdict::Genus1)
                )
            })
            .collect();
        if let Some(index) = verdicts.iter().position(|&ok| !ok) {
            return Err(BarycentricError::VerificationFailed { stage: label, index });
        }
        stages.push(PathStage {
            label,
            points: samples
                .iter()
                .map(|(outer, c)| coefficient_point(outer, *c))
                .collect(),
            verified: verdicts,
        });
    }
    Ok(stages)
}
