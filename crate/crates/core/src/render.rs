//! Amoeba rasterization and PGM/SVG emission.
//!
//! Raster semantics: a pixel is Inside when its center has a fiber zero,
//! Outside when it is certifiably off the amoeba (lopsidedness first, then
//! the fiber scan), and Band when the numeric minimum falls between the
//! zero and band tolerances. PGM output encodes Inside as 0, Outside as
//! 255 and Band as 128. Output bytes are independent of the number of
//! threads: pixels are computed independently and merged in row order.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::barycentric::RegionGeometry;
use crate::fiber::{self, MembershipOptions};
use crate::support::{CircuitPolynomial, ExponentVector};
use crate::tropical::{EquilibriumRaster, TropicalCurve};
use crate::Window;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("rasterization requires n = 2, got n = {0}")]
    DimensionUnsupported(usize),
    #[error("resolution must be at least 16, got {0}")]
    ResolutionTooSmall(usize),
    #[error(transparent)]
    Fiber(#[from] fiber::FiberError),
}

/// Per-pixel verdict; `Outside` carries an index into [`RasterGrid::orders`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellVerdict {
    Inside,
    Outside(u16),
    Band,
}

#[derive(Clone, Debug, Serialize)]
pub struct RasterGrid {
    pub window: Window,
    pub resolution: usize,
    /// Row-major with row 0 at ymin.
    pub cells: Vec<CellVerdict>,
    /// Complement orders referenced by `Outside` cells.
    pub orders: Vec<ExponentVector>,
}

impl RasterGrid {
    pub fn cell(&self, col: usize, row: usize) -> CellVerdict {
        self.cells[row * self.resolution + col]
    }

    /// Number of bounded Outside components (4-connectivity, components
    /// touching the window frame do not count).
    pub fn bounded_outside_regions(&self) -> usize {
        let res = self.resolution;
        let outside = |idx: usize| matches!(self.cells[idx], CellVerdict::Outside(_));
        let mut seen = vec![false; res * res];
        let mut bounded = 0;
        for start in 0..res * res {
            if seen[start] || !outside(start) {
                continue;
            }
            let mut touches_frame = false;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(idx) = stack.pop() {
                let (row, col) = (idx / res, idx % res);
                if row == 0 || col == 0 || row == res - 1 || col == res - 1 {
                    touches_frame = true;
                }
                let neighbors = [
                    (row > 0).then(|| idx - res),
                    (row + 1 < res).then(|| idx + res),
                    (col > 0).then(|| idx - 1),
                    (col + 1 < res).then(|| idx + 1),
                ];
                for nb in neighbors.into_iter().flatten() {
                    if !seen[nb] && outside(nb) {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                }
            }
            if !touches_frame {
                bounded += 1;
            }
        }
        bounded
    }
}

/// Default window around the equilibrium constellation: eq(y) ± 1.5 times
/// the largest pairwise distance of the eq(j) points (floored at 1), so the
/// bounded complement component is always framed.
pub fn default_window(f: &CircuitPolynomial) -> Window {
    let m = crate::support::support_matrices(f.support()).expect("validated support");
    let eq_y = crate::equilibrium::equilibrium_point_y(f, &m);
    let mut radius = 1.0f64;
    if f.inner_coefficient().norm() > 0.0 {
        let pts: Vec<Vec<f64>> = (0..=f.dim())
            .map(|j| crate::equilibrium::equilibrium_point_j(f, j).expect("c != 0"))
            .collect();
        let mut maxdist = 0.0f64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                maxdist = maxdist.max(d);
            }
        }
        radius = (1.5 * maxdist).max(1.0);
    }
    Window::new(
        eq_y[0] - radius,
        eq_y[0] + radius,
        eq_y[1] - radius,
        eq_y[1] + radius,
    )
    .expect("positive radius")
}

/// Rasterizes the amoeba over the window. Each pixel tries the
/// lopsidedness fast-reject before the fiber scan; the scan itself may
/// exit early on a certified zero (per-pixel determinism is unaffected).
pub fn raster_amoeba(
    f: &CircuitPolynomial,
    window: Window,
    resolution: usize,
) -> Result<RasterGrid, RenderError> {
    if f.dim() != 2 {
        return Err(RenderError::DimensionUnsupported(f.dim()));
    }
    if resolution < 16 {
        return Err(RenderError::ResolutionTooSmall(resolution));
    }
    let mut orders: Vec<ExponentVector> = f.support().lattice_points();
    orders.sort();
    let options = MembershipOptions {
        early_zero_exit: true,
        ..MembershipOptions::default()
    };
    // Pixels outside the amoeba but not lopsided get their order from the
    // rotation-product refinements, which are far cheaper per pixel than
    // the quadrature gradient; the refined polynomials are shared.
    let sparse = crate::lopsided::SparsePolynomial::from(f);
    let refined: Vec<(u32, crate::lopsided::SparsePolynomial)> = [2u32, 3]
        .iter()
        .filter_map(|&r| crate::lopsided::purbhoo_refine(&sparse, r).ok().map(|p| (r, p)))
        .collect();
    let cells: Vec<CellVerdict> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let row = idx / resolution;
            let col = idx % resolution;
            let w = window.pixel_center(col, row, resolution);
            classify_pixel(f, &w, &options, &orders, &refined)
        })
        .collect();
    Ok(RasterGrid {
        window,
        resolution,
        cells,
        orders,
    })
}

fn classify_pixel(
    f: &CircuitPolynomial,
    w: &[f64],
    options: &MembershipOptions,
    orders: &[ExponentVector],
    refined: &[(u32, crate::lopsided::SparsePolynomial)],
) -> CellVerdict {
    let raw = match fiber::membership_scan(f, w, options) {
        Ok(raw) => raw,
        Err(_) => return CellVerdict::Band,
    };
    let (fast_order, _min_residual) = match raw {
        fiber::RawVerdict::Zero(_) => return CellVerdict::Inside,
        fiber::RawVerdict::Band { .. } => return CellVerdict::Band,
        fiber::RawVerdict::Outside {
            fast_order,
            min_residual,
        } => (fast_order, min_residual),
    };
    let order = fast_order
        .or_else(|| {
            refined.iter().find_map(|(r, p)| {
                crate::lopsided::lopsided_outside_certificate(p, w)
                    .and_then(|dom| crate::lopsided::recover_order(&dom, *r, f.dim()))
            })
        })
        .or_else(|| fiber::order_of_point(f, w).ok());
    match order {
        Some(order) => match orders.binary_search(&order) {
            Ok(i) => CellVerdict::Outside(i as u16),
            // order outside the polytope enumeration: numeric noise
            Err(_) => CellVerdict::Band,
        },
        // an Outside point whose order cannot be named is still within
        // numeric uncertainty of the contour
        None => CellVerdict::Band,
    }
}

/// Binary PGM (P5, maxval 255): Inside → 0, Outside → 255, Band → 128.
/// Rows are emitted top-down (ymax first).
pub fn render_pgm(grid: &RasterGrid) -> Vec<u8> {
    let res = grid.resolution;
    let mut out = format!("P5\n{res} {res}\n255\n").into_bytes();
    for row in (0..res).rev() {
        for col in 0..res {
            out.push(match grid.cell(col, row) {
                CellVerdict::Inside => 0u8,
                CellVerdict::Outside(_) => 255u8,
                CellVerdict::Band => 128u8,
            });
        }
    }
    out
}

/// Overlay data for the SVG composition.
#[derive(Clone, Debug, Default)]
pub struct Overlays {
    pub spine: Option<TropicalCurve>,
    pub trop_c: Option<TropicalCurve>,
    pub equilibrium: Option<EquilibriumRaster>,
    pub eq_points: Option<Vec<Vec<f64>>>,
    pub region: Option<RegionGeometry>,
}

const SVG_SIZE: f64 = 640.0;

struct SvgMapper {
    window: Window,
}

impl SvgMapper {
    fn x(&self, x: f64) -> f64 {
        (x - self.window.xmin) / (self.window.xmax - self.window.xmin) * SVG_SIZE
    }
    fn y(&self, y: f64) -> f64 {
        (self.window.ymax - y) / (self.window.ymax - self.window.ymin) * SVG_SIZE
    }
}

/// SVG composition of the raster plus overlays. Legend: amoeba pixels red,
/// band pixels light gray, equilibrium set pale red, complement-induced
/// curve dark blue, spine light green, equilibrium points solid red dots,
/// region boundary dark green with cusp dots and the two reference circles
/// (inner |Θ| blue, outer (n+1)|Θ| green).
pub fn render_svg(grid: Option<&RasterGrid>, overlays: &Overlays, window: Window) -> String {
    let map = SvgMapper { window };
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SVG_SIZE
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    if let Some(eq) = &overlays.equilibrium {
        svg.push_str("<g fill=\"#f4b6b6\">\n");
        emit_cells(&mut svg, &map, eq.window, eq.resolution, |idx| eq.cells[idx]);
        svg.push_str("</g>\n");
    }
    if let Some(grid) = grid {
        svg.push_str("<g fill=\"#cc2222\">\n");
        emit_cells(&mut svg, &map, grid.window, grid.resolution, |idx| {
            grid.cells[idx] == CellVerdict::Inside
        });
        svg.push_str("</g>\n<g fill=\"#bbbbbb\">\n");
        emit_cells(&mut svg, &map, grid.window, grid.resolution, |idx| {
            grid.cells[idx] == CellVerdict::Band
        });
        svg.push_str("</g>\n");
    }
    if let Some(curve) = &overlays.trop_c {
        emit_curve(&mut svg, &map, curve, "#223a99", 2.4);
    }
    if let Some(curve) = &overlays.spine {
        emit_curve(&mut svg, &map, curve, "#51c151", 1.6);
    }
    if let Some(points) = &overlays.eq_points {
        for p in points {
            svg.push_str(&format!(
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#cc2222\"/>\n",
                map.x(p[0]),
                map.y(p[1])
            ));
        }
    }
    if let Some(region) = &overlays.region {
        emit_region(&mut svg, &map, region);
    }
    svg.push_str("</svg>\n");
    svg
}

fn emit_cells(
    svg: &mut String,
    map: &SvgMapper,
    window: Window,
    resolution: usize,
    on: impl Fn(usize) -> bool,
) {
    let dx = (window.xmax - window.xmin) / resolution as f64;
    let dy = (window.ymax - window.ymin) / resolution as f64;
    for row in 0..resolution {
        // merge horizontal runs into single rects
        let mut col = 0;
        while col < resolution {
            if !on(row * resolution + col) {
                col += 1;
                continue;
            }
            let start = col;
            while col < resolution && on(row * resolution + col) {
                col += 1;
            }
            let x0 = window.xmin + start as f64 * dx;
            let y0 = window.ymin + row as f64 * dy;
            let w = (col - start) as f64 * dx;
            svg.push_str(&format!(
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>\n",
                map.x(x0),
                map.y(y0 + dy),
                w / (window.xmax - window.xmin) * SVG_SIZE,
                dy / (window.ymax - window.ymin) * SVG_SIZE,
            ));
        }
    }
}

fn emit_curve(svg: &mut String, map: &SvgMapper, curve: &TropicalCurve, color: &str, width: f64) {
    svg.push_str(&format!(
        "<g stroke=\"{color}\" stroke-width=\"{width}\" fill=\"none\">\n"
    ));
    for (p, q) in curve.segments() {
        svg.push_str(&format!(
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>\n",
            map.x(p[0]),
            map.y(p[1]),
            map.x(q[0]),
            map.y(q[1])
        ));
    }
    let reach = (map.window.xmax - map.window.xmin) + (map.window.ymax - map.window.ymin);
    for (p, r) in curve.rays() {
        let norm = ((r[0] * r[0] + r[1] * r[1]) as f64).sqrt();
        let q = [
            p[0] + r[0] as f64 / norm * reach,
            p[1] + r[1] as f64 / norm * reach,
        ];
        svg.push_str(&format!(
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>\n",
            map.x(p[0]),
            map.y(p[1]),
            map.x(q[0]),
            map.y(q[1])
        ));
    }
    svg.push_str("</g>\n");
}

fn emit_region(svg: &mut String, map: &SvgMapper, region: &RegionGeometry) {
    let samples = crate::barycentric::region_boundary_samples(region, 720);
    svg.push_str("<g stroke=\"#116611\" stroke-width=\"2\" fill=\"none\">\n<path d=\"");
    for (i, z) in samples.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        svg.push_str(&format!("{cmd}{:.3} {:.3} ", map.x(z.re), map.y(z.im)));
    }
    svg.push_str("Z\"/>\n</g>\n");
    let zero = [map.x(0.0), map.y(0.0)];
    let scale = SVG_SIZE / (map.window.xmax - map.window.xmin);
    svg.push_str(&format!(
        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" stroke=\"#2244cc\" fill=\"none\"/>\n",
        zero[0],
        zero[1],
        region.small_radius * scale
    ));
    svg.push_str(&format!(
        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" stroke=\"#22aa44\" fill=\"none\"/>\n",
        zero[0],
        zero[1],
        region.big_radius * scale
    ));
    for &psi in &region.cusp_args {
        let z = region.boundary_point(psi);
        svg.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#116611\"/>\n",
            map.x(z.re),
            map.y(z.im)
        ));
    }
}

/// Standalone SVG of the genus region in the c-plane (boundary, cusps and
/// the two reference circles).
pub fn region_svg(region: &RegionGeometry, samples: usize) -> String {
    let r = region.big_radius * 1.15;
    let window = Window::new(-r, r, -r, r).expect("positive radius");
    let map = SvgMapper { window };
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SVG_SIZE
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let pts = crate::barycentric::region_boundary_samples(region, samples.max(3 * (region.n + 1)));
    svg.push_str("<g stroke=\"#116611\" stroke-width=\"2\" fill=\"none\">\n<path d=\"");
    for (i, z) in pts.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        svg.push_str(&format!("{cmd}{:.3} {:.3} ", map.x(z.re), map.y(z.im)));
    }
    svg.push_str("Z\"/>\n</g>\n");
    emit_region_circles(&mut svg, &map, region);
    svg.push_str("</svg>\n");
    svg
}

fn emit_region_circles(svg: &mut String, map: &SvgMapper, region: &RegionGeometry) {
    let zero = [map.x(0.0), map.y(0.0)];
    let scale = SVG_SIZE / (map.window.xmax - map.window.xmin);
    svg.push_str(&format!(
        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" stroke=\"#2244cc\" fill=\"none\"/>\n",
        zero[0],
        zero[1],
        region.small_radius * scale
    ));
    svg.push_str(&format!(
        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" stroke=\"#22aa44\" fill=\"none\"/>\n",
        zero[0],
        zero[1],
        region.big_radius * scale
    ));
    for &psi in &region.cusp_args {
        let z = region.boundary_point(psi);
        svg.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#116611\"/>\n",
            map.x(z.re),
            map.y(z.im)
        ));
    }
}
