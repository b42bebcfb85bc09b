//! Amoebas of circuit-supported Laurent polynomials: genus certificates,
//! coefficient invariants, tropical skeletons, membership tests and
//! renderings.
//!
//! The polynomials handled here have a simplex Newton polytope with exactly
//! one interior lattice point carrying a (possibly zero) coefficient:
//!
//! ```text
//! f = b_0 z^{α(0)} + … + b_n z^{α(n)} + c z^y
//! ```
//!
//! Their amoebas have at most one bounded complement component, so the
//! genus is 0 (solid) or 1. The crate decides which, with a certificate:
//! exact tests where available (maximally sparse supports, barycentric
//! supports via the hypocycloid region, the sharp threshold κ*), numeric
//! torus scans otherwise. It also computes equilibrium points, the
//! invariants |Θ| and |Θ̂|, extremal phases, Purbhoo lopsidedness
//! refinements, Ronkin values and spines, discriminant binomials with
//! singular-point verification, genus-preserving coefficient paths, and
//! raster/SVG renderings.

pub mod appearance;
pub mod barycentric;
pub mod discriminant;
pub mod equilibrium;
pub mod fiber;
pub mod io;
pub mod linalg;
pub mod lopsided;
pub mod render;
pub mod report;
pub mod support;
pub mod tropical;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WindowError {
    #[error("window is degenerate or not finite: [{xmin}, {xmax}] × [{ymin}, {ymax}]")]
    Degenerate {
        xmin: f64,
        xmax: f64,
        ymin: f64,
        ymax: f64,
    },
}

/// An axis-aligned window in log coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self, WindowError> {
        let finite = xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite();
        if !finite || xmin >= xmax || ymin >= ymax {
            return Err(WindowError::Degenerate {
                xmin,
                xmax,
                ymin,
                ymax,
            });
        }
        Ok(Window {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Center of pixel (col, row) on a res × res grid; row 0 is at ymin.
    pub fn pixel_center(&self, col: usize, row: usize, res: usize) -> [f64; 2] {
        [
            self.xmin + (col as f64 + 0.5) * (self.xmax - self.xmin) / res as f64,
            self.ymin + (row as f64 + 0.5) * (self.ymax - self.ymin) / res as f64,
        ]
    }

    /// Pixel containing (x, y), if inside the window.
    pub fn pixel_of(&self, x: f64, y: f64, res: usize) -> Option<(usize, usize)> {
        if x < self.xmin || x >= self.xmax || y < self.ymin || y >= self.ymax {
            return None;
        }
        let col = ((x - self.xmin) / (self.xmax - self.xmin) * res as f64) as usize;
        let row = ((y - self.ymin) / (self.ymax - self.ymin) * res as f64) as usize;
        Some((col.min(res - 1), row.min(res - 1)))
    }
}

pub use fiber::{classify_genus, GenusReport, GenusVerdict};
pub use io::parse_polynomial;
pub use report::analyze;
pub use support::{CircuitPolynomial, CircuitSupport, ExponentVector};
