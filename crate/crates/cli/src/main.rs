//! `shadowfit`: run the verifications and export curve data.
//!
//! Exit status is 0 when every requested check passes, 1 when a check
//! fails, and 2 for usage or domain errors.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shadowfit_core::bodies::BodySpec;
use shadowfit_core::casestudies::{
    build_bump_bodies, critical_angles, critical_angles_by_bisection, fmt_f64, verify_bump_case,
    verify_cylinder_cone, verify_no3drot, BumpParams, CaseReport,
};
use shadowfit_core::error::Error;
use shadowfit_core::fitting::FitConfig;
use shadowfit_core::integrals::{shephard_mm_report, volume, volume_grid, MmMode};
use shadowfit_core::shadows::{u0, Shadow2D};
use shadowfit_core::{sphere_grid, GridKind};

#[derive(Parser, Debug)]
#[command(
    name = "shadowfit",
    version,
    about = "Do rotated sections and projections decide containment?"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug, Clone, Copy)]
struct FitArgs {
    /// Trial rotation angles in [0, 2π).
    #[arg(long = "fit-angle-grid", default_value_t = FitConfig::default().angle_grid)]
    angle_grid: usize,
    /// Samples of the in-plane angle per margin evaluation.
    #[arg(long = "fit-u-grid", default_value_t = FitConfig::default().u_grid)]
    u_grid: usize,
    /// Trisection rounds around the best grid angles.
    #[arg(long = "fit-refine-iters", default_value_t = FitConfig::default().refine_iters)]
    refine_iters: usize,
    /// Accept a fit with margin at least -tol.
    #[arg(long = "fit-tol", default_value_t = FitConfig::default().tol)]
    tol: f64,
}

impl From<FitArgs> for FitConfig {
    fn from(a: FitArgs) -> Self {
        FitConfig {
            angle_grid: a.angle_grid,
            u_grid: a.u_grid,
            refine_iters: a.refine_iters,
            tol: a.tol,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical section angles of the cylinder against the double cone.
    Angles {
        #[arg(long)]
        r: f64,
        /// Samples per margin in the bisection cross-check.
        #[arg(long, default_value_t = 4096)]
        u_grid: usize,
    },
    /// Check that every section of the cylinder rotates into the cone section.
    #[command(name = "verify-3d")]
    Verify3d {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 200)]
        theta_grid: usize,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Check that no rotation of the cylinder fits in the cone.
    No3drot {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        phi_grid: usize,
        #[arg(long, default_value_t = 10_000)]
        rotations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Bumped spheres: sections fit after rotation, the bodies do not.
    #[command(name = "verify-nd")]
    VerifyNd {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        bump: BumpArgs,
        #[arg(long, default_value_t = 500)]
        sections: usize,
        #[arg(long, default_value_t = 10_000)]
        rotations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Volume of a body.
    Volume {
        /// Body description, e.g. `cylinder:r=0.51,hh=0.51`.
        #[arg(long)]
        body: BodySpec,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
    },
    /// Volume comparison for bodies whose sections or projections fit.
    #[command(name = "mm-report")]
    MmReport {
        #[arg(long = "K")]
        k: BodySpec,
        #[arg(long = "L")]
        l: BodySpec,
        #[arg(long, value_parser = parse_mode)]
        mode: MmMode,
        /// Product-grid resolution of the hypothesis directions
        /// (2·res² directions).
        #[arg(long, default_value_t = 8)]
        dir_resolution: usize,
        /// Product-grid resolution of the volume quadrature.
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Section curves of the cylinder and cone at one angle, as CSV.
    #[command(name = "export-curves")]
    ExportCurves {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        theta: f64,
        /// Number of samples of u in [0, 2π).
        #[arg(long, default_value_t = 720)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct BumpArgs {
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_big: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_small: Option<f64>,
    #[arg(long)]
    layers: Option<usize>,
}

impl BumpArgs {
    fn params(&self, n: usize) -> BumpParams {
        let d = BumpParams::desk(n);
        BumpParams {
            n,
            v: self.v.unwrap_or(d.v),
            delta: self.delta.unwrap_or(d.delta),
            delta_big: self.delta_big.unwrap_or(d.delta_big),
            eps: self.eps.unwrap_or(d.eps),
            eps_small: self.eps_small.unwrap_or(d.eps_small),
            layers: self.layers.unwrap_or(d.layers),
        }
    }
}

fn parse_mode(s: &str) -> Result<MmMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a subcommand produced.
struct Outcome {
    body: String,
    passed: bool,
}

fn case_outcome(report: CaseReport, format: Format) -> Outcome {
    let body = match format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
    };
    Outcome {
        body,
        passed: report.verdict.is_verified(),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let format = cli.format;
    match &cli.command {
        Command::Angles { r, u_grid } => {
            let a = critical_angles(*r)?;
            let (b1, b2) = critical_angles_by_bisection(*r, *u_grid)?;
            let rows = [
                ("theta0", a.theta0, None),
                ("theta1", a.theta1, Some(b1)),
                ("theta2", a.theta2, Some(b2)),
            ];
            let mut body = String::new();
            match format {
                Format::Text => {
                    let _ = writeln!(body, "critical angles for r = {r}");
                    for (name, value, bis) in rows {
                        let _ = write!(body, "  {name} = {}", fmt_f64(value));
                        if let Some(b) = bis {
                            let _ = write!(body, "  (bisection {})", fmt_f64(b));
                        }
                        body.push('\n');
                    }
                }
                Format::Csv => {
                    body.push_str("name,closed_form,bisection\n");
                    for (name, value, bis) in rows {
                        let _ = writeln!(
                            body,
                            "{name},{},{}",
                            fmt_f64(value),
                            bis.map(fmt_f64).unwrap_or_default()
                        );
                    }
                }
            }
            Ok(Outcome { body, passed: true })
        }
        Command::Verify3d { r, theta_grid, fit } => Ok(case_outcome(
            verify_cylinder_cone(*r, *theta_grid, &(*fit).into())?,
            format,
        )),
        Command::No3drot {
            r,
            phi_grid,
            rotations,
            seed,
        } => Ok(case_outcome(
            verify_no3drot(*r, *phi_grid, *rotations, *seed)?,
            format,
        )),
        Command::VerifyNd {
            n,
            bump,
            sections,
            rotations,
            seed,
            fit,
        } => {
            let (k, l) = build_bump_bodies(&bump.params(*n))?;
            Ok(case_outcome(
                verify_bump_case(&k, &l, *sections, *rotations, &(*fit).into(), *seed)?,
                format,
            ))
        }
        Command::Volume { body, resolution } => {
            body.validate()?;
            let grid = volume_grid(&[body], *resolution)?;
            let v = volume(body, &grid)?;
            let out = match format {
                Format::Text => format!(
                    "body = {body}\nresolution = {resolution}\nvolume = {}\n",
                    fmt_f64(v)
                ),
                Format::Csv => format!(
                    "body,resolution,volume\n\"{body}\",{resolution},{}\n",
                    fmt_f64(v)
                ),
            };
            Ok(Outcome {
                body: out,
                passed: true,
            })
        }
        Command::MmReport {
            k,
            l,
            mode,
            dir_resolution,
            resolution,
            fit,
        } => {
            k.validate()?;
            l.validate()?;
            let dirs = sphere_grid(3, *dir_resolution, GridKind::Product)?;
            let report = shephard_mm_report(k, l, *mode, &dirs, &(*fit).into(), *resolution)?;
            let body = match format {
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv(),
            };
            Ok(Outcome {
                body,
                passed: report.satisfied,
            })
        }
        Command::ExportCurves { r, theta, samples } => Ok(Outcome {
            body: export_curves(*r, *theta, *samples)?,
            passed: true,
        }),
    }
}

/// Radial functions of the cone and cylinder sections at `theta`, and of the
/// cylinder section after a quarter turn and after a turn by `u0(theta)`
/// (left empty for `theta ≤ π/4`).
fn export_curves(r: f64, theta: f64, samples: usize) -> Result<String, Error> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "(0, ∞)",
        });
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, π/2]",
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let cone = Shadow2D::cone_section(theta);
    let cyl = Shadow2D::cylinder_section(r, theta);
    let turn = if theta > FRAC_PI_4 {
        Some(u0(theta)?)
    } else {
        None
    };
    let mut out = String::from("u,rho_cone,rho_cylinder,rho_cylinder_rot90,rho_cylinder_rot_u0\n");
    for k in 0..samples {
        let u = TAU * k as f64 / samples as f64;
        let rot_u0 = turn.map(|t| fmt_f64(cyl.eval(u - t))).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(u),
            fmt_f64(cone.eval(u)),
            fmt_f64(cyl.eval(u)),
            fmt_f64(cyl.eval(u - std::f64::consts::FRAC_PI_2)),
            rot_u0
        );
    }
    Ok(out)
}

fn init_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("SHADOWFIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("SHADOWFIT_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e @ (Error::HypothesisFailed { .. } | Error::ConvexityFailure { .. })) => {
            eprintln!("check failed: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", outcome.body),
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
