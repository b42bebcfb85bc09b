//! The machine-readable analysis report (schema_version 1).

use serde::Serialize;
use serde_json::Value;

use crate::appearance;
use crate::barycentric;
use crate::discriminant;
use crate::equilibrium;
use crate::fiber::{self, GenusReport};
use crate::io;
use crate::support::{support_matrices, CircuitPolynomial};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    /// Normalized input echo in the wire format.
    pub input: Value,
    pub theta_abs: f64,
    pub theta_hat_abs: f64,
    pub kappa_star: f64,
    pub eq_y: Vec<f64>,
    pub eq_j: Option<Vec<Vec<f64>>>,
    pub appearance_point: Vec<f64>,
    pub barycentric: bool,
    /// None when c = 0.
    pub extreme_opposition: Option<bool>,
    pub genus: GenusReport,
    pub discriminant_member: Option<bool>,
    pub region: Option<barycentric::RegionGeometry>,
    pub ill_conditioned: bool,
}

/// Runs every analysis the polynomial supports and assembles the report.
pub fn analyze(f: &CircuitPolynomial) -> AnalysisReport {
    let m = support_matrices(f.support()).expect("validated support");
    let eq = equilibrium::equilibrium_data(f, &m);
    let app = appearance::appearance_point(f, &m);
    let extreme = if f.inner_coefficient().norm() > 0.0 {
        Some(appearance::is_extreme_opposition(f, &m, 1e-9).expect("c != 0"))
    } else {
        None
    };
    let genus = fiber::classify_genus(f);
    let discriminant_member = if f.inner_coefficient().norm() > 0.0 {
        Some(discriminant::in_discriminant(f, 1e-9).expect("c != 0"))
    } else {
        None
    };
    let region = barycentric::region_geometry(f).ok();
    AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input: io::polynomial_to_json(f),
        theta_abs: eq.theta_abs,
        theta_hat_abs: app.theta_hat_abs,
        kappa_star: app.kappa_star,
        eq_y: eq.eq_y,
        eq_j: eq.eq_j,
        appearance_point: app.a_point,
        barycentric: app.barycentric,
        extreme_opposition: extreme,
        genus,
        discriminant_member,
        region,
        ill_conditioned: eq.ill_conditioned,
    }
}

impl AnalysisReport {
    /// All numeric payloads must be finite for the report to be valid.
    pub fn numerically_sound(&self) -> bool {
        let finite_vec = |v: &[f64]| v.iter().all(|x| x.is_finite());
        self.theta_abs.is_finite()
            && self.theta_hat_abs.is_finite()
            && self.kappa_star.is_finite()
            && finite_vec(&self.eq_y)
            && finite_vec(&self.appearance_point)
            && self
                .eq_j
                .as_ref()
                .is_none_or(|js| js.iter().all(|p| finite_vec(p)))
    }
}
