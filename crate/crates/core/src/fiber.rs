//! Fiber functions, numeric amoeba membership and the genus classifier.
//!
//! A point w lies on the amoeba iff the fiber function
//! `F[w,f](φ) = Σ b_i e^{⟨w,α(i)⟩} e^{i⟨φ,α(i)⟩} + c e^{⟨w,y⟩} e^{i⟨φ,y⟩}`
//! has a torus zero. Membership minimizes |F|² over a coarse grid followed
//! by damped Newton refinement; all comparisons are made relative to the
//! monomial-norm sum so the verdict is scale-free. The classifier runs the
//! exact and closed-form criteria first and falls back to numerics only
//! when they cannot decide.

use num::complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::appearance::{self, AppearanceData};
use crate::barycentric;
use crate::equilibrium;
use crate::lopsided::{self, SparsePolynomial};
use crate::support::{support_matrices, CircuitPolynomial, ExponentVector};
use crate::tropical;

#[derive(Debug, Error, PartialEq)]
pub enum FiberError {
    #[error("torus scans are limited to n <= 3, got n = {0}")]
    DimensionTooLarge(usize),
    #[error("the polynomial has a nonzero inner coefficient")]
    InnerCoefficientNonzero,
    #[error("the inner coefficient is zero")]
    InnerCoefficientZero,
    #[error("order is ambiguous at this point: {0}")]
    OrderAmbiguous(String),
}

/// Maximal dimension for grid-based torus scans.
pub const MAX_SCAN_DIMENSION: usize = 3;

/// A torus point certifying amoeba membership.
#[derive(Clone, Debug, Serialize)]
pub struct FiberWitness {
    pub phi: Vec<f64>,
    /// `|F[w,f](phi)|`, reproducible exactly by `fiber_eval`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub enum MembershipVerdict {
    InAmoeba(FiberWitness),
    Outside {
        min_residual: f64,
        order: ExponentVector,
    },
    BoundaryBand {
        min_residual: f64,
    },
}

impl MembershipVerdict {
    pub fn is_in_amoeba(&self) -> bool {
        matches!(self, MembershipVerdict::InAmoeba(_))
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, MembershipVerdict::Outside { .. })
    }
}

/// Tuning knobs of the torus minimization.
#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    pub grid_per_axis: usize,
    pub newton_starts: usize,
    pub max_newton_iterations: usize,
    /// Relative residual below which the point is in the amoeba.
    pub eps_zero: f64,
    /// Relative residual above which the point is outside.
    pub eps_band: f64,
    /// Stop the grid scan as soon as a certified zero shows up. The scan
    /// stays deterministic (sequential lexicographic order); only the
    /// global-best witness guarantee is waived, so rasters use this and the
    /// public membership contract does not.
    pub early_zero_exit: bool,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions {
            grid_per_axis: 64,
            newton_starts: 8,
            max_newton_iterations: 60,
            eps_zero: 1e-9,
            eps_band: 1e-6,
            early_zero_exit: false,
        }
    }
}

/// Evaluates the fiber function at a torus point.
pub fn fiber_eval(f: &CircuitPolynomial, w: &[f64], phi: &[f64]) -> Complex64 {
    let support = f.support();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, b) in f.outer_coefficients().iter().enumerate() {
        let a = support.alpha(i);
        acc += b * a.dot(w).exp() * Complex64::from_polar(1.0, a.dot(phi));
    }
    let c = f.inner_coefficient();
    if c.norm() > 0.0 {
        let y = support.inner();
        acc += c * y.dot(w).exp() * Complex64::from_polar(1.0, y.dot(phi));
    }
    acc
}

/// Scaled view of the fiber function: G(φ) = F(φ)/e^{Lmax} keeps every term
/// at most 1 in modulus, so the minimization never overflows.
struct ScaledFiber {
    dirs: Vec<Vec<f64>>,
    int_dirs: Vec<Vec<i64>>,
    coefs: Vec<Complex64>,
    /// Σ of scaled coefficient moduli; |G|/usum is the relative residual.
    usum: f64,
    log_scale: f64,
    n: usize,
}

impl ScaledFiber {
    fn new(f: &CircuitPolynomial, w: &[f64]) -> Self {
        let support = f.support();
        let n = f.dim();
        let mut int_dirs: Vec<Vec<i64>> = Vec::new();
        let mut logs: Vec<f64> = Vec::new();
        let mut args: Vec<f64> = Vec::new();
        for (i, b) in f.outer_coefficients().iter().enumerate() {
            let a = support.alpha(i);
            int_dirs.push(a.entries().to_vec());
            logs.push(b.norm().ln() + a.dot(w));
            args.push(b.arg());
        }
        let c = f.inner_coefficient();
        if c.norm() > 0.0 {
            let y = support.inner();
            int_dirs.push(y.entries().to_vec());
            logs.push(c.norm().ln() + y.dot(w));
            args.push(c.arg());
        }
        let dirs: Vec<Vec<f64>> = int_dirs
            .iter()
            .map(|d| d.iter().map(|&v| v as f64).collect())
            .collect();
        let log_scale = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let coefs: Vec<Complex64> = logs
            .iter()
            .zip(&args)
            .map(|(&l, &a)| Complex64::from_polar((l - log_scale).exp(), a))
            .collect();
        let usum = coefs.iter().map(|c| c.norm()).sum();
        ScaledFiber {
            dirs,
            int_dirs,
            coefs,
            usum,
            log_scale,
            n,
        }
    }

    /// |G|², its gradient and Hessian in φ.
    fn eval_with_derivatives(&self, phi: &[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n;
        let mut g = Complex64::new(0.0, 0.0);
        let mut gj = vec![Complex64::new(0.0, 0.0); n];
        let mut gjk = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (d, c) in self.dirs.iter().zip(&self.coefs) {
            let t: f64 = d.iter().zip(phi).map(|(a, p)| a * p).sum();
            let e = c * Complex64::from_polar(1.0, t);
            g += e;
            for j in 0..n {
                gj[j] += Complex64::new(0.0, d[j]) * e;
                for k in 0..n {
                    gjk[j][k] -= d[j] * d[k] * e;
                }
            }
        }
        let val = g.norm_sqr();
        let grad: Vec<f64> = (0..n).map(|j| 2.0 * (gj[j] * g.conj()).re).collect();
        let hess: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| 2.0 * ((gjk[j][k] * g.conj()).re + (gj[j] * gj[k].conj()).re))
                    .collect()
            })
            .collect();
        (val, grad, hess)
    }

    /// Damped Newton steps on |G|² with step halving.
    fn refine(&self, start: &[f64], max_iterations: usize) -> (Vec<f64>, f64) {
        let mut phi = start.to_vec();
        let (mut val, mut grad, mut hess) = self.eval_with_derivatives(&phi);
        let mut lambda = 1e-10;
        let scale_sq = self.usum * self.usum;
        for _ in 0..max_iterations {
            if val <= 1e-32 * scale_sq {
                break;
            }
            // stationary point reached (positive local minimum)
            let gnorm = grad.iter().fold(0.0f64, |a, &g| a.max(g.abs()));
            if gnorm <= 1e-13 * scale_sq {
                break;
            }
            let neg: Vec<f64> = grad.iter().map(|x| -x).collect();
            let mut damped = hess.clone();
            for (j, row) in damped.iter_mut().enumerate() {
                row[j] += lambda;
            }
            let step = match crate::linalg::solve_f64(&damped, &neg) {
                Ok(s) => s,
                Err(_) => neg.clone(),
            };
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..24 {
                let cand: Vec<f64> = phi.iter().zip(&step).map(|(p, s)| p + t * s).collect();
                let (cv, cg, ch) = self.eval_with_derivatives(&cand);
                if cv < val {
                    phi = cand;
                    val = cv;
                    grad = cg;
                    hess = ch;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if improved {
                lambda = (lambda / 3.0).max(1e-12);
            } else {
                lambda *= 10.0;
                if lambda > 1e10 {
                    break;
                }
            }
        }
        (phi, val)
    }
}

/// Scan verdict before order resolution; `fast_order` is present when the
/// lopsidedness fast-reject already certified the complement order.
#[derive(Clone, Debug)]
pub enum RawVerdict {
    Zero(FiberWitness),
    Outside {
        min_residual: f64,
        fast_order: Option<ExponentVector>,
    },
    Band {
        min_residual: f64,
    },
}

/// Numeric membership by torus minimization, with a lopsidedness
/// fast-reject when the dominance margin already clears the band.
pub fn membership(f: &CircuitPolynomial, w: &[f64]) -> Result<MembershipVerdict, FiberError> {
    membership_with(f, w, &MembershipOptions::default())
}

pub fn membership_with(
    f: &CircuitPolynomial,
    w: &[f64],
    options: &MembershipOptions,
) -> Result<MembershipVerdict, FiberError> {
    match membership_scan(f, w, options)? {
        RawVerdict::Zero(witness) => Ok(MembershipVerdict::InAmoeba(witness)),
        RawVerdict::Outside {
            min_residual,
            fast_order,
        } => {
            let order = match fast_order {
                Some(o) => o,
                None => order_of_point(f, w)?,
            };
            Ok(MembershipVerdict::Outside {
                min_residual,
                order,
            })
        }
        RawVerdict::Band { min_residual } => Ok(MembershipVerdict::BoundaryBand { min_residual }),
    }
}

/// The torus scan itself; callers that can name the order more cheaply than
/// the Ronkin gradient (rasterization) start from this.
pub fn membership_scan(
    f: &CircuitPolynomial,
    w: &[f64],
    options: &MembershipOptions,
) -> Result<RawVerdict, FiberError> {
    let n = f.dim();
    if n > MAX_SCAN_DIMENSION {
        return Err(FiberError::DimensionTooLarge(n));
    }
    let fiber = ScaledFiber::new(f, w);

    // Lopsided fast path: the certified lower bound dominant − rest on |F|
    // must itself clear the band tolerance, otherwise fall through.
    let sparse = SparsePolynomial::from(f);
    let ns = lopsided::norm_sequence(&sparse, w);
    if let Some(dom) = ns.dominant {
        let rest: f64 = ns
            .log_norms
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != dom)
            .map(|(_, &l)| (l - fiber.log_scale).exp())
            .sum();
        let lower_rel = (ns.log_norms[dom] - fiber.log_scale).exp() - rest;
        if lower_rel > options.eps_band * fiber.usum {
            return Ok(RawVerdict::Outside {
                min_residual: lower_rel * fiber.log_scale.exp(),
                fast_order: Some(ns.exponents[dom].clone()),
            });
        }
    }

    let (phi_best, rel_best) = scan_and_refine(&fiber, options);
    let scale = fiber.usum * fiber.log_scale.exp();
    if rel_best < options.eps_zero {
        let residual = fiber_eval(f, w, &phi_best).norm();
        return Ok(RawVerdict::Zero(FiberWitness {
            phi: phi_best,
            residual,
        }));
    }
    if rel_best > options.eps_band {
        return Ok(RawVerdict::Outside {
            min_residual: rel_best * scale,
            fast_order: None,
        });
    }
    Ok(RawVerdict::Band {
        min_residual: rel_best * scale,
    })
}

/// Grid scan plus Newton polish; returns (φ*, |F(φ*)|/scale).
/// On the uniform grid every term phase is a power of one primitive root
/// of unity, so the scan runs on a precomputed phasor table instead of
/// evaluating sin/cos per node.
fn scan_and_refine(fiber: &ScaledFiber, options: &MembershipOptions) -> (Vec<f64>, f64) {
    let n = fiber.n;
    let grid = options.grid_per_axis.max(2);
    let step = std::f64::consts::TAU / grid as f64;
    let table: Vec<Complex64> = (0..grid)
        .map(|j| Complex64::from_polar(1.0, j as f64 * step))
        .collect();
    let g = grid as i64;
    // per-term phase indices, updated incrementally along the odometer
    let mut phase: Vec<i64> = vec![0; fiber.coefs.len()];
    // top-k grid cells by |G|², deterministic lexicographic tie-breaking
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(options.newton_starts + 1);
    let mut idx = vec![0usize; n];
    let zero_sq = {
        let t = options.eps_zero * fiber.usum;
        t * t
    };
    'scan: loop {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &p) in fiber.coefs.iter().zip(&phase) {
            acc += c * table[p as usize];
        }
        let v = acc.norm_sqr();
        if v < best.last().map_or(f64::INFINITY, |(bv, _)| *bv)
            || best.len() < options.newton_starts
        {
            let phi: Vec<f64> = idx.iter().map(|&k| k as f64 * step).collect();
            let pos = best.partition_point(|(bv, _)| *bv <= v);
            if pos < options.newton_starts {
                best.insert(pos, (v, phi));
                best.truncate(options.newton_starts);
            }
        }
        if options.early_zero_exit && v < zero_sq {
            break 'scan;
        }
        let mut done = true;
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < grid {
                // advance each term phase by its exponent in axis i
                for (p, d) in phase.iter_mut().zip(&fiber.int_dirs) {
                    *p = (*p + d[i]).rem_euclid(g);
                }
                done = false;
                break;
            }
            // axis i wraps: undo the grid-1 increments of this axis
            idx[i] = 0;
            for (p, d) in phase.iter_mut().zip(&fiber.int_dirs) {
                *p = (*p - d[i] * (g - 1)).rem_euclid(g);
            }
        }
        if done {
            break;
        }
    }
    let mut out: Option<(Vec<f64>, f64)> = None;
    for (_, start) in &best {
        let (phi, val) = fiber.refine(start, options.max_newton_iterations);
        if out.as_ref().is_none_or(|(_, b)| val < *b) {
            out = Some((phi, val));
        }
    }
    let (phi, val) = out.expect("grid scan yields at least one cell");
    (
        phi.iter()
            .map(|&x| x.rem_euclid(std::f64::consts::TAU))
            .collect(),
        val.sqrt() / fiber.usum,
    )
}

/// Exact membership for maximally sparse polynomials (c = 0): the point is
/// outside iff a single outer monomial norm exceeds the sum of the others.
/// Membership comes with a constructive torus witness built from the
/// triangle split of the norm sequence.
pub fn maximally_sparse_membership(
    f: &CircuitPolynomial,
    w: &[f64],
) -> Result<MembershipVerdict, FiberError> {
    if f.inner_coefficient().norm() > 0.0 {
        return Err(FiberError::InnerCoefficientNonzero);
    }
    let n = f.dim();
    let support = f.support();
    let logs: Vec<f64> = (0..=n)
        .map(|i| f.outer_coefficients()[i].norm().ln() + support.alpha(i).dot(w))
        .collect();
    let lmax = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let scaled: Vec<f64> = logs.iter().map(|&l| (l - lmax).exp()).collect();
    let arg_max = (0..=n)
        .max_by(|&i, &j| logs[i].total_cmp(&logs[j]))
        .unwrap();
    let rest: f64 = (0..=n)
        .filter(|&i| i != arg_max)
        .map(|i| scaled[i])
        .sum();
    if scaled[arg_max] > rest {
        return Ok(MembershipVerdict::Outside {
            min_residual: (scaled[arg_max] - rest) * lmax.exp(),
            order: support.alpha(arg_max).clone(),
        });
    }

    // Not lopsided: split the ascending norms into three triangle sides and
    // lift the resulting target phases through M^t.
    let mut order: Vec<usize> = (0..=n).collect();
    order.sort_by(|&i, &j| logs[i].total_cmp(&logs[j]));
    let t: Vec<f64> = order.iter().map(|&i| scaled[i]).collect();
    let mut targets = vec![0.0f64; n + 1];
    if n == 1 {
        // two terms of equal norm cancel antipodally
        targets[order[0]] = 0.0;
        targets[order[1]] = std::f64::consts::PI;
    } else {
        let total: f64 = t.iter().sum();
        let mut prefix = 0.0;
        let mut split = None;
        // largest m < n keeping the three groups in triangle position
        for m in 1..n {
            prefix += t[m - 1];
            if prefix < total - prefix {
                split = Some((m, prefix));
            }
        }
        let (m, t1) = split.expect("a non-lopsided sequence always admits a triangle split");
        let t2 = t[m];
        let t3 = total - t1 - t2;
        let cos_d1 = ((t1 * t1 + t2 * t2 - t3 * t3) / (2.0 * t1 * t2)).clamp(-1.0, 1.0);
        let d1 = cos_d1.acos();
        let rem = Complex64::new(t1 - t2 * cos_d1, t2 * d1.sin());
        let d2 = rem.arg();
        for (pos, &orig) in order.iter().enumerate() {
            targets[orig] = if pos < m {
                0.0
            } else if pos == m {
                std::f64::consts::PI - d1
            } else {
                std::f64::consts::PI + d2
            };
        }
    }
    // Fix the free global rotation so the α(0) condition is satisfied, then
    // solve the remaining n conditions exactly.
    let shift = f.outer_coefficients()[0].arg() - targets[0];
    let rhs: Vec<f64> = (1..=n)
        .map(|i| targets[i] - f.outer_coefficients()[i].arg() + shift)
        .collect();
    let m = support_matrices(support).expect("validated support");
    let phi = crate::linalg::solve_integer_system(&m.m_transpose(), &rhs)
        .expect("nonsingular M for a valid support");
    let phi: Vec<f64> = phi
        .iter()
        .map(|&x| x.rem_euclid(std::f64::consts::TAU))
        .collect();
    let residual = fiber_eval(f, w, &phi).norm();
    Ok(MembershipVerdict::InAmoeba(FiberWitness { phi, residual }))
}

const ORDER_GRADIENT_STEP: f64 = 1e-3;
const ORDER_QUADRATURE_LEVEL: u32 = 8;

/// The complement-component order of a point outside the amoeba: dominant
/// exponent when lopsided, otherwise the rounded Ronkin gradient.
pub fn order_of_point(f: &CircuitPolynomial, w: &[f64]) -> Result<ExponentVector, FiberError> {
    let sparse = SparsePolynomial::from(f);
    if let Some(order) = lopsided::lopsided_outside_certificate(&sparse, w) {
        return Ok(order);
    }
    let n = f.dim();
    if n > 2 {
        return Err(FiberError::OrderAmbiguous(
            "point is not lopsided and the quadrature gradient is limited to n <= 2".into(),
        ));
    }
    let mut gradient = vec![0.0; n];
    for k in 0..n {
        let mut wp = w.to_vec();
        let mut wm = w.to_vec();
        wp[k] += ORDER_GRADIENT_STEP;
        wm[k] -= ORDER_GRADIENT_STEP;
        let np = tropical::ronkin_value(&sparse, &wp, ORDER_QUADRATURE_LEVEL)
            .map_err(|e| FiberError::OrderAmbiguous(e.to_string()))?;
        let nm = tropical::ronkin_value(&sparse, &wm, ORDER_QUADRATURE_LEVEL)
            .map_err(|e| FiberError::OrderAmbiguous(e.to_string()))?;
        gradient[k] = (np.value - nm.value) / (2.0 * ORDER_GRADIENT_STEP);
    }
    let rounded: Vec<i64> = gradient.iter().map(|&g| g.round() as i64).collect();
    let max_dev = gradient
        .iter()
        .zip(&rounded)
        .map(|(&g, &r)| (g - r as f64).abs())
        .fold(0.0f64, f64::max);
    if max_dev > 0.2 {
        return Err(FiberError::OrderAmbiguous(format!(
            "gradient {gradient:?} is {max_dev:.3} away from the nearest lattice point"
        )));
    }
    let order = ExponentVector::new(rounded);
    if !f.support().contains_lattice_point(&order) {
        return Err(FiberError::OrderAmbiguous(format!(
            "rounded gradient {order:?} is not a lattice point of the Newton polytope"
        )));
    }
    Ok(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GenusVerdict {
    Solid,
    Genus1,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassifyMethod {
    MaximallySparse,
    RoughBound,
    BarycentricExact,
    SharpBound,
    Lopsided,
    NumericFiber,
}

impl ClassifyMethod {
    pub fn as_kebab(&self) -> &'static str {
        match self {
            ClassifyMethod::MaximallySparse => "maximally-sparse",
            ClassifyMethod::RoughBound => "rough-bound",
            ClassifyMethod::BarycentricExact => "barycentric-exact",
            ClassifyMethod::SharpBound => "sharp-bound",
            ClassifyMethod::Lopsided => "lopsided",
            ClassifyMethod::NumericFiber => "numeric-fiber",
        }
    }
}

/// Method-specific evidence; every variant can be replayed against the
/// polynomial via [`GenusReport::recheck`].
#[derive(Clone, Debug, Serialize)]
pub enum Certificate {
    MaximallySparse,
    RoughBoundSolid {
        c_abs: f64,
        theta_abs: f64,
    },
    RoughBoundGenus1 {
        c_abs: f64,
        genus1_bound: f64,
    },
    RegionTest {
        position: barycentric::RegionPosition,
        theta_abs: f64,
        cusp_modulus: f64,
        cusp_args: Vec<f64>,
        /// eq(y), a point of the bounded complement component when genus 1.
        witness_eq_y: Option<Vec<f64>>,
    },
    SharpBound {
        c_abs: f64,
        kappa_star: f64,
        extreme_opposition: bool,
    },
    LopsidedInner {
        w: Vec<f64>,
        inner_log_norm: f64,
        outer_log_sum: f64,
    },
    NumericFiber {
        at: Vec<f64>,
        witness: Option<FiberWitness>,
        min_residual: f64,
        order: Option<ExponentVector>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct GenusReport {
    pub verdict: GenusVerdict,
    pub method: ClassifyMethod,
    pub certificate: Certificate,
}

/// Decision cascade; exact and closed-form branches take precedence, first
/// hit wins, and Indeterminate is an honest outcome.
pub fn classify_genus(f: &CircuitPolynomial) -> GenusReport {
    let m = support_matrices(f.support()).expect("validated support");
    let c = f.inner_coefficient();
    let n = f.dim();

    // (1) no inner monomial: maximally sparse polynomials are solid
    if c.norm() == 0.0 {
        return GenusReport {
            verdict: GenusVerdict::Solid,
            method: ClassifyMethod::MaximallySparse,
            certificate: Certificate::MaximallySparse,
        };
    }

    // (2) |c| below the solid threshold
    let (theta_abs, _) = equilibrium::theta(f, &m);
    if c.norm() <= theta_abs {
        return GenusReport {
            verdict: GenusVerdict::Solid,
            method: ClassifyMethod::RoughBound,
            certificate: Certificate::RoughBoundSolid {
                c_abs: c.norm(),
                theta_abs,
            },
        };
    }

    // (3) barycentric supports have an exact region test
    if f.support().is_barycentric() {
        return barycentric::barycentric_genus_test(f)
            .expect("support was just checked to be barycentric");
    }

    // (4) sharp threshold
    let app = appearance::appearance_point(f, &m);
    let rel = (c.norm() - app.kappa_star) / app.kappa_star;
    if rel.abs() <= 1e-12 || rel > 0.0 {
        let extreme = appearance::is_extreme_opposition(f, &m, 1e-9).unwrap_or(false);
        let verdict = if rel.abs() <= 1e-12 && extreme {
            // at the exact switch value with extreme opposition the inner
            // component has not yet opened
            GenusVerdict::Solid
        } else {
            GenusVerdict::Genus1
        };
        return GenusReport {
            verdict,
            method: ClassifyMethod::SharpBound,
            certificate: Certificate::SharpBound {
                c_abs: c.norm(),
                kappa_star: app.kappa_star,
                extreme_opposition: extreme,
            },
        };
    }

    // (5) coarse genus-1 bound; subsumed by (4) since κ* ≤ (n+1)|Θ|, kept
    // as a harmless guard
    if c.norm() > (n as f64 + 1.0) * theta_abs {
        return GenusReport {
            verdict: GenusVerdict::Genus1,
            method: ClassifyMethod::RoughBound,
            certificate: Certificate::RoughBoundGenus1 {
                c_abs: c.norm(),
                genus1_bound: (n as f64 + 1.0) * theta_abs,
            },
        };
    }

    // (6) lopsidedness scan on a log-grid around the appearance point
    let sparse = SparsePolynomial::from(f);
    if let Some(report) = lopsided_scan(f, &sparse, &app) {
        return report;
    }

    // (7) numeric membership at the appearance point
    match membership(f, &app.a_point) {
        Ok(MembershipVerdict::InAmoeba(witness)) => GenusReport {
            verdict: GenusVerdict::Solid,
            method: ClassifyMethod::NumericFiber,
            certificate: Certificate::NumericFiber {
                at: app.a_point.clone(),
                min_residual: witness.residual,
                witness: Some(witness),
                order: None,
            },
        },
        Ok(MembershipVerdict::Outside {
            min_residual,
            order,
        }) => {
            let verdict = if &order == f.support().inner() {
                GenusVerdict::Genus1
            } else {
                GenusVerdict::Indeterminate
            };
            GenusReport {
                verdict,
                method: ClassifyMethod::NumericFiber,
                certificate: Certificate::NumericFiber {
                    at: app.a_point.clone(),
                    witness: None,
                    min_residual,
                    order: Some(order),
                },
            }
        }
        Ok(MembershipVerdict::BoundaryBand { min_residual }) => GenusReport {
            verdict: GenusVerdict::Indeterminate,
            method: ClassifyMethod::NumericFiber,
            certificate: Certificate::NumericFiber {
                at: app.a_point.clone(),
                witness: None,
                min_residual,
                order: None,
            },
        },
        Err(_) => GenusReport {
            verdict: GenusVerdict::Indeterminate,
            method: ClassifyMethod::NumericFiber,
            certificate: Certificate::NumericFiber {
                at: app.a_point.clone(),
                witness: None,
                min_residual: f64::NAN,
                order: None,
            },
        },
    }
}

const LOPSIDED_SCAN_SPACING: f64 = 0.5;

fn lopsided_scan(
    f: &CircuitPolynomial,
    sparse: &SparsePolynomial,
    app: &AppearanceData,
) -> Option<GenusReport> {
    let n = f.dim();
    let mut offsets = vec![0i64; n];
    loop {
        let w: Vec<f64> = app
            .a_point
            .iter()
            .zip(&offsets)
            .map(|(&a, &o)| a + o as f64 * LOPSIDED_SCAN_SPACING)
            .collect();
        let ns = lopsided::norm_sequence(sparse, &w);
        if let Some(dom) = ns.dominant {
            if &ns.exponents[dom] == f.support().inner() {
                let rest = ns
                    .log_norms
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != dom)
                    .map(|(_, &l)| l)
                    .fold(f64::NEG_INFINITY, f64::max);
                return Some(GenusReport {
                    verdict: GenusVerdict::Genus1,
                    method: ClassifyMethod::Lopsided,
                    certificate: Certificate::LopsidedInner {
                        w,
                        inner_log_norm: ns.log_norms[dom],
                        outer_log_sum: rest,
                    },
                });
            }
        }
        let mut done = true;
        for slot in offsets.iter_mut() {
            *slot += 1;
            if *slot <= 2 {
                done = false;
                break;
            }
            *slot = -2;
        }
        if done {
            return None;
        }
    }
}

impl GenusReport {
    /// Replays the certificate against the polynomial.
    pub fn recheck(&self, f: &CircuitPolynomial) -> bool {
        let m = match support_matrices(f.support()) {
            Ok(m) => m,
            Err(_) => return false,
        };
        match &self.certificate {
            Certificate::MaximallySparse => {
                f.is_maximally_sparse() && self.verdict == GenusVerdict::Solid
            }
            Certificate::RoughBoundSolid { c_abs, theta_abs } => {
                let (t, _) = equilibrium::theta(f, &m);
                close(*c_abs, f.inner_coefficient().norm())
                    && close(*theta_abs, t)
                    && *c_abs <= t * (1.0 + 1e-12)
                    && self.verdict == GenusVerdict::Solid
            }
            Certificate::RoughBoundGenus1 {
                c_abs,
                genus1_bound,
            } => {
                let (t, _) = equilibrium::theta(f, &m);
                close(*c_abs, f.inner_coefficient().norm())
                    && close(*genus1_bound, (f.dim() as f64 + 1.0) * t)
                    && *c_abs > *genus1_bound
                    && self.verdict == GenusVerdict::Genus1
            }
            Certificate::RegionTest { position, .. } => {
                let geom = match barycentric::region_geometry(f) {
                    Ok(g) => g,
                    Err(_) => return false,
                };
                let now = barycentric::in_region(&geom, f.inner_coefficient());
                let consistent = matches!(
                    (&now, self.verdict),
                    (barycentric::RegionPosition::Inside, GenusVerdict::Solid)
                        | (barycentric::RegionPosition::Outside, GenusVerdict::Genus1)
                        | (
                            barycentric::RegionPosition::OnBoundary { .. },
                            GenusVerdict::Indeterminate
                        )
                );
                consistent && std::mem::discriminant(&now) == std::mem::discriminant(position)
            }
            Certificate::SharpBound {
                c_abs, kappa_star, ..
            } => {
                let app = appearance::appearance_point(f, &m);
                close(*c_abs, f.inner_coefficient().norm())
                    && close(*kappa_star, app.kappa_star)
                    && *c_abs >= app.kappa_star * (1.0 - 1e-12)
            }
            Certificate::LopsidedInner { w, .. } => {
                let sparse = SparsePolynomial::from(f);
                match lopsided::lopsided_outside_certificate(&sparse, w) {
                    Some(order) => {
                        &order == f.support().inner() && self.verdict == GenusVerdict::Genus1
                    }
                    None => false,
                }
            }
            Certificate::NumericFiber { at, witness, .. } => {
                if let Some(wit) = witness {
                    let again = fiber_eval(f, at, &wit.phi).norm();
                    if (again - wit.residual).abs() > 1e-14 + 1e-12 * wit.residual {
                        return false;
                    }
                }
                match membership(f, at) {
                    Ok(MembershipVerdict::InAmoeba(_)) => self.verdict == GenusVerdict::Solid,
                    Ok(MembershipVerdict::Outside { order, .. }) => {
                        if &order == f.support().inner() {
                            self.verdict == GenusVerdict::Genus1
                        } else {
                            self.verdict == GenusVerdict::Indeterminate
                        }
                    }
                    Ok(MembershipVerdict::BoundaryBand { .. }) | Err(_) => {
                        self.verdict == GenusVerdict::Indeterminate
                    }
                }
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// The realized complement-order set: all vertices, plus the inner point
/// when the amoeba has genus 1.
pub fn complement_orders(f: &CircuitPolynomial, report: &GenusReport) -> Vec<ExponentVector> {
    let mut orders: Vec<ExponentVector> = f.support().alphas().to_vec();
    if report.verdict == GenusVerdict::Genus1 {
        orders.push(f.support().inner().clone());
    }
    orders
}
