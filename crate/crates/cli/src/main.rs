//! `amoeba`: analyze, classify, test, render and connect amoebas of
//! circuit-supported Laurent polynomials.
//!
//! Exit codes: 0 success, 2 invalid input, 3 indeterminate genus verdict
//! (`genus` only), 4 internal verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;

use circuit_amoeba::barycentric::{self, PathOptions};
use circuit_amoeba::fiber::{self, GenusVerdict, MembershipVerdict};
use circuit_amoeba::lopsided::{self, SparsePolynomial};
use circuit_amoeba::render::{self, Overlays};
use circuit_amoeba::support::CircuitPolynomial;

#[derive(Parser)]
#[command(name = "amoeba", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis report of a polynomial
    Analyze {
        input: PathBuf,
        /// Emit the machine-readable JSON report instead of text
        #[arg(long)]
        json: bool,
    },
    /// Genus verdict with its certifying method
    Genus { input: PathBuf },
    /// Amoeba membership of a point in log coordinates
    Member {
        input: PathBuf,
        #[arg(long, num_args = 1..=3, allow_negative_numbers = true, required = true)]
        point: Vec<f64>,
    },
    /// Lopsidedness of the norm sequence at a point
    Lopsided {
        input: PathBuf,
        #[arg(long, num_args = 1..=3, allow_negative_numbers = true, required = true)]
        point: Vec<f64>,
        /// Rotation-product refinement order
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Rasterize the amoeba to PGM or SVG
    Raster(RasterArgs),
    /// Render the genus region of a barycentric polynomial as SVG
    Region {
        input: PathBuf,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a verified genus-preserving path between two polynomials
    Path {
        a: PathBuf,
        b: PathBuf,
        /// Samples per stage
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discriminant binomial and membership
    Discriminant { input: PathBuf },
}

#[derive(Args)]
struct RasterArgs {
    input: PathBuf,
    /// XMIN XMAX YMIN YMAX (defaults to a window framing the equilibrium points)
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    #[arg(long, default_value_t = 256)]
    res: usize,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated overlays for SVG output: spine,tropC,eq
    #[arg(long, value_delimiter = ',')]
    overlay: Vec<String>,
}

enum CliError {
    InvalidInput(String),
    Internal(String),
}

impl CliError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::InvalidInput(e.to_string())
    }
    fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer closes the pipe (e.g. `amoeba ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::InvalidInput(msg)) => {
            eprintln!("error: invalid input: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: verification failure: {msg}");
            ExitCode::from(4)
        }
    }
}

fn load(path: &Path) -> Result<CircuitPolynomial, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::InvalidInput(format!("{}: {e}", path.display())))?;
    circuit_amoeba::parse_polynomial(&text)
        .map_err(|e| CliError::InvalidInput(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Analyze { input, json } => {
            let f = load(&input)?;
            let report = circuit_amoeba::analyze(&f);
            if report.ill_conditioned {
                eprintln!("warning: support matrix is ill-conditioned; solve accuracy degrades");
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(CliError::internal)?
                );
            } else {
                print_text_report(&report);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Genus { input } => {
            let f = load(&input)?;
            let report = fiber::classify_genus(&f);
            let genus = match report.verdict {
                GenusVerdict::Solid => "0",
                GenusVerdict::Genus1 => "1",
                GenusVerdict::Indeterminate => "indeterminate",
            };
            println!("genus={} method={}", genus, report.method.as_kebab());
            if report.verdict == GenusVerdict::Indeterminate {
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Member { input, point } => {
            let f = load(&input)?;
            if point.len() != f.dim() {
                return Err(CliError::InvalidInput(format!(
                    "--point needs {} coordinates for this polynomial, got {}",
                    f.dim(),
                    point.len()
                )));
            }
            let verdict = fiber::membership(&f, &point).map_err(CliError::internal)?;
            match verdict {
                MembershipVerdict::InAmoeba(w) => {
                    println!(
                        "in-amoeba residual={:.3e} phi={}",
                        w.residual,
                        fmt_vec(&w.phi)
                    );
                }
                MembershipVerdict::Outside {
                    min_residual,
                    order,
                } => {
                    println!(
                        "outside order={:?} min_residual={:.3e}",
                        order.entries(),
                        min_residual
                    );
                }
                MembershipVerdict::BoundaryBand { min_residual } => {
                    println!("boundary-band min_residual={min_residual:.3e}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lopsided { input, point, r } => {
            let f = load(&input)?;
            if point.len() != f.dim() {
                return Err(CliError::InvalidInput(format!(
                    "--point needs {} coordinates, got {}",
                    f.dim(),
                    point.len()
                )));
            }
            let sparse = SparsePolynomial::from(&f);
            let ns = lopsided::norm_sequence(&sparse, &point);
            println!("norms={}", fmt_vec(&ns.norms));
            match ns.dominant {
                Some(i) => println!("lopsided dominant={:?}", ns.exponents[i].entries()),
                None => println!("not-lopsided"),
            }
            if r > 1 {
                match lopsided::refined_membership(&sparse, &point, r)
                    .map_err(CliError::internal)?
                {
                    Some(order) => {
                        println!("refined r={r} certified order={:?}", order.entries())
                    }
                    None => println!("refined r={r} no-certificate"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Raster(args) => run_raster(args),
        Command::Region {
            input,
            samples,
            out,
        } => {
            let f = load(&input)?;
            let geom = barycentric::region_geometry(&f).map_err(CliError::invalid)?;
            let svg = render::region_svg(&geom, samples);
            std::fs::write(&out, svg).map_err(CliError::internal)?;
            println!(
                "region |Θ|={:.6} R={:.6} cusps={}",
                geom.theta_abs,
                geom.big_radius,
                fmt_vec(&geom.cusp_args)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Path { a, b, steps, out } => {
            let fa = load(&a)?;
            let fb = load(&b)?;
            let options = PathOptions {
                samples_per_stage: steps.max(2),
                ..PathOptions::default()
            };
            let path = barycentric::path_connect(&fa, &fb, &options).map_err(|e| match e {
                barycentric::BarycentricError::VerificationFailed { .. } => CliError::internal(e),
                other => CliError::invalid(other),
            })?;
            let json = serde_json::json!({
                "schema_version": circuit_amoeba::report::SCHEMA_VERSION,
                "kappa": path.kappa,
                "stages": path.stages,
            });
            std::fs::write(&out, serde_json::to_string_pretty(&json).map_err(CliError::internal)?)
                .map_err(CliError::internal)?;
            println!(
                "path kappa={:.6} stages={} samples={}",
                path.kappa,
                path.stages.len(),
                path.total_samples()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Discriminant { input } => {
            let f = load(&input)?;
            let binomial = circuit_amoeba::discriminant::discriminant_binomial(f.support());
            let member = if f.inner_coefficient().norm() > 0.0 {
                Some(
                    circuit_amoeba::discriminant::in_discriminant(&f, 1e-9)
                        .map_err(CliError::internal)?,
                )
            } else {
                None
            };
            let singular = match member {
                Some(true) => Some(
                    circuit_amoeba::discriminant::singular_point(&f)
                        .map_err(CliError::internal)?,
                ),
                _ => None,
            };
            let json = serde_json::json!({
                "binomial": binomial,
                "member": member,
                "singular_point": singular,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&json).map_err(CliError::internal)?
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_raster(args: RasterArgs) -> Result<ExitCode, CliError> {
    let f = load(&args.input)?;
    let window = match &args.window {
        Some(v) => circuit_amoeba::Window::new(v[0], v[1], v[2], v[3]).map_err(CliError::invalid)?,
        None => render::default_window(&f),
    };
    let grid = render::raster_amoeba(&f, window, args.res).map_err(CliError::invalid)?;
    let ext = args
        .out
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "pgm" => {
            if !args.overlay.is_empty() {
                eprintln!("warning: overlays are ignored for PGM output");
            }
            std::fs::write(&args.out, render::render_pgm(&grid)).map_err(CliError::internal)?;
        }
        "svg" => {
            let mut overlays = Overlays::default();
            for name in &args.overlay {
                match name.as_str() {
                    "spine" => {
                        overlays.spine =
                            Some(circuit_amoeba::tropical::spine(&f).map_err(CliError::internal)?)
                    }
                    "tropC" | "tropc" => {
                        let report = fiber::classify_genus(&f);
                        let orders = fiber::complement_orders(&f, &report);
                        let tp = circuit_amoeba::tropical::tropicalize(
                            &f,
                            circuit_amoeba::tropical::TropicalizeMode::ComplementInduced,
                            &orders,
                        );
                        overlays.trop_c = Some(
                            circuit_amoeba::tropical::tropical_curve(&tp)
                                .map_err(CliError::internal)?,
                        );
                    }
                    "eq" => {
                        overlays.equilibrium = Some(
                            circuit_amoeba::tropical::equilibrium_set_raster(
                                &f, window, args.res,
                            )
                            .map_err(CliError::internal)?,
                        );
                        let raster = overlays.equilibrium.as_ref().unwrap();
                        overlays.eq_points =
                            Some(raster.markers.iter().map(|(_, p)| p.clone()).collect());
                    }
                    other => {
                        return Err(CliError::InvalidInput(format!(
                            "unknown overlay `{other}` (expected spine, tropC or eq)"
                        )))
                    }
                }
            }
            std::fs::write(&args.out, render::render_svg(Some(&grid), &overlays, window))
                .map_err(CliError::internal)?;
        }
        other => {
            return Err(CliError::InvalidInput(format!(
                "unsupported output extension `{other}` (expected pgm or svg)"
            )))
        }
    }
    println!(
        "raster {}x{} bounded_outside_regions={}",
        args.res,
        args.res,
        grid.bounded_outside_regions()
    );
    Ok(ExitCode::SUCCESS)
}

fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_complex(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{:.6}+{:.6}i", z.re, z.im)
    } else {
        format!("{:.6}{:.6}i", z.re, z.im)
    }
}

fn print_text_report(report: &circuit_amoeba::report::AnalysisReport) {
    if let Some(b) = report.input.get("b").and_then(|v| v.as_array()) {
        let coeffs: Vec<String> = b
            .iter()
            .map(|z| {
                fmt_complex(Complex64::new(
                    z["re"].as_f64().unwrap_or(f64::NAN),
                    z["im"].as_f64().unwrap_or(f64::NAN),
                ))
            })
            .collect();
        println!("b (normalized)       [{}]", coeffs.join(", "));
    }
    if let Some(c) = report.input.get("c") {
        println!(
            "c                    {}",
            fmt_complex(Complex64::new(
                c["re"].as_f64().unwrap_or(f64::NAN),
                c["im"].as_f64().unwrap_or(f64::NAN),
            ))
        );
    }
    println!("theta_abs            {:.9}", report.theta_abs);
    println!("theta_hat_abs        {:.9}", report.theta_hat_abs);
    println!("kappa_star           {:.9}", report.kappa_star);
    println!("eq_y                 {}", fmt_vec(&report.eq_y));
    if let Some(eq_j) = &report.eq_j {
        for (j, p) in eq_j.iter().enumerate() {
            println!("eq({j})                {}", fmt_vec(p));
        }
    }
    println!("appearance_point     {}", fmt_vec(&report.appearance_point));
    println!("barycentric          {}", report.barycentric);
    if let Some(extreme) = report.extreme_opposition {
        println!("extreme_opposition   {extreme}");
    }
    let genus = match report.genus.verdict {
        GenusVerdict::Solid => "0 (solid)",
        GenusVerdict::Genus1 => "1",
        GenusVerdict::Indeterminate => "indeterminate",
    };
    println!("genus                {genus}");
    println!("method               {}", report.genus.method.as_kebab());
    if let Some(member) = report.discriminant_member {
        println!("discriminant_member  {member}");
    }
    if let Some(region) = &report.region {
        println!(
            "region               R={:.6} r={:.6} cusp_args={}",
            region.big_radius,
            region.small_radius,
            fmt_vec(&region.cusp_args)
        );
    }
}
