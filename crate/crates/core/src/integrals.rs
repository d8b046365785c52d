//! Spherical integrals of radial and support functions, and the volume
//! comparisons that follow from rotated sections or projections.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rayon::prelude::*;

use crate::bodies::{width, BodySpec};
use crate::casestudies::fmt_f64;
use crate::error::{Error, Result};
use crate::fitting::{best_rotation_fit, FitConfig};
use crate::geom::{frame_for, sphere_grid, GridKind, SphereGrid};
use crate::shadows::{projection_shadow, section_shadow, shadow_area};

fn check_grid(body: &BodySpec, grid: &SphereGrid) -> Result<()> {
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            left: body.dim(),
            right: grid.dim(),
        });
    }
    Ok(())
}

fn require_3d(body: &BodySpec) -> Result<()> {
    if body.dim() != 3 {
        return Err(Error::UnsupportedDimension {
            got: body.dim(),
            expected: "3".into(),
        });
    }
    Ok(())
}

/// `(1/n) Σ w ρⁿ` over the grid.
pub fn volume(body: &BodySpec, grid: &SphereGrid) -> Result<f64> {
    check_grid(body, grid)?;
    let n = body.dim() as i32;
    Ok(grid.integrate(|u| body.radial(u).powi(n)) / n as f64)
}

/// A grid suited to integrating the radial functions of all `bodies`: in
/// `R^3` a product grid with panel breaks at every known kink latitude,
/// elsewhere `resolution` seeded Monte Carlo nodes.
pub fn volume_grid(bodies: &[&BodySpec], resolution: usize) -> Result<SphereGrid> {
    grid_with_breaks(bodies, resolution, |b| b.radial_kinks())
}

fn grid_with_breaks(
    bodies: &[&BodySpec],
    resolution: usize,
    kinks: impl Fn(&BodySpec) -> Vec<f64>,
) -> Result<SphereGrid> {
    let n = bodies.first().map_or(3, |b| b.dim());
    if let Some(b) = bodies.iter().find(|b| b.dim() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.dim(),
        });
    }
    if n == 3 {
        let breaks: Vec<f64> = bodies.iter().flat_map(|b| kinks(b)).chain([0.0]).collect();
        SphereGrid::product_with_breaks(resolution, &breaks)
    } else {
        sphere_grid(n, resolution, GridKind::MonteCarlo { seed: 0 })
    }
}

/// Cauchy's formula `S = (1/π) ∫ area(K | ξ^⊥) dξ` in `R^3`.
pub fn surface_area_cauchy(
    body: &BodySpec,
    dir_grid: &SphereGrid,
    shadow_resolution: usize,
) -> Result<f64> {
    require_3d(body)?;
    check_grid(body, dir_grid)?;
    let areas: Vec<f64> = dir_grid
        .nodes()
        .par_iter()
        .map(|xi| shadow_area(&projection_shadow(body, &frame_for(xi))?, shadow_resolution))
        .collect::<Result<_>>()?;
    let total: f64 = areas
        .iter()
        .zip(dir_grid.weights())
        .map(|(a, w)| a * w)
        .sum();
    Ok(total / PI)
}

/// `Σ w h` over the grid.
pub fn mean_support(body: &BodySpec, grid: &SphereGrid) -> Result<f64> {
    require_3d(body)?;
    check_grid(body, grid)?;
    Ok(grid.integrate(|u| body.support(u)))
}

/// Widths and the constant-width volume identity `2V = wS − (2π/3)w³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantWidthReport {
    pub is_constant_width: bool,
    pub min_width: f64,
    pub max_width: f64,
    /// Average width over the grid.
    pub width: f64,
    pub volume: f64,
    pub surface_area: f64,
    /// `|2V − wS + (2π/3)w³|`.
    pub identity_residual: f64,
}

/// Shadow resolution used for Cauchy areas inside the width identity.
pub const CAUCHY_SHADOW_RESOLUTION: usize = 4096;

/// Evaluates the width identity without rejecting bodies whose width varies.
pub fn constant_width_report(
    body: &BodySpec,
    grid: &SphereGrid,
    tol: f64,
) -> Result<ConstantWidthReport> {
    require_3d(body)?;
    check_grid(body, grid)?;
    let widths: Vec<f64> = grid.nodes().par_iter().map(|u| width(body, u)).collect();
    let min_width = widths.iter().copied().fold(f64::INFINITY, f64::min);
    let max_width = widths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w = widths
        .iter()
        .zip(grid.weights())
        .map(|(x, wt)| x * wt)
        .sum::<f64>()
        / grid.total_weight();
    let volume = volume(body, grid)?;
    let surface_area = surface_area_cauchy(body, grid, CAUCHY_SHADOW_RESOLUTION)?;
    Ok(ConstantWidthReport {
        is_constant_width: max_width - min_width <= tol,
        min_width,
        max_width,
        width: w,
        volume,
        surface_area,
        identity_residual: (2.0 * volume - w * surface_area + TAU / 3.0 * w.powi(3)).abs(),
    })
}

/// Like [`constant_width_report`], but a body whose width varies by more
/// than `tol` is `NotApplicable` (the message carries the residual).
pub fn constant_width_check(body: &BodySpec, grid: &SphereGrid, tol: f64) -> Result<(bool, f64)> {
    let r = constant_width_report(body, grid, tol)?;
    if !r.is_constant_width {
        return Err(Error::NotApplicable(format!(
            "width ranges over [{}, {}]; identity residual {:e}",
            r.min_width, r.max_width, r.identity_residual
        )));
    }
    Ok((true, r.identity_residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmMode {
    /// Sections of `K` rotate into sections of `L`; compare `vol K ≤ vol L`.
    Sections,
    /// Projections of `K` rotate into projections of `L`; compare polar
    /// volumes `vol K* ≥ vol L*`.
    Projections,
}

impl fmt::Display for MmMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MmMode::Sections => "sections",
            MmMode::Projections => "projections",
        })
    }
}

impl std::str::FromStr for MmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sections" => Ok(MmMode::Sections),
            "projections" => Ok(MmMode::Projections),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Volume comparison backed by a sampled check of its hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeReport {
    pub mode: MmMode,
    /// `vol K` in section mode, `vol K*` in projection mode.
    pub vol_k: f64,
    /// `vol L` in section mode, `vol L*` in projection mode.
    pub vol_l: f64,
    pub satisfied: bool,
    pub volume_resolution: usize,
    pub tolerance: f64,
    pub hypothesis_directions: usize,
    pub min_hypothesis_margin: f64,
    /// `Σ_ξ w ∫_{ξ^⊥} ρⁿ` for `K` (or `K*`) over the hypothesis directions.
    pub section_average_k: f64,
    pub section_average_l: f64,
    /// Whether every per-direction integral already compares the right way.
    pub section_trace_holds: bool,
}

impl VolumeReport {
    fn labels(&self) -> (&'static str, &'static str) {
        match self.mode {
            MmMode::Sections => ("vol_K", "vol_L"),
            MmMode::Projections => ("vol_K_polar", "vol_L_polar"),
        }
    }

    pub fn to_text(&self) -> String {
        let (k, l) = self.labels();
        let cmp = match self.mode {
            MmMode::Sections => "<=",
            MmMode::Projections => ">=",
        };
        let mut s = format!("volume comparison ({} mode)\n", self.mode);
        s += &format!("  hypothesis directions = {}\n", self.hypothesis_directions);
        s += &format!(
            "  min hypothesis margin = {}\n",
            fmt_f64(self.min_hypothesis_margin)
        );
        s += &format!(
            "  section average K = {}\n",
            fmt_f64(self.section_average_k)
        );
        s += &format!(
            "  section average L = {}\n",
            fmt_f64(self.section_average_l)
        );
        s += &format!(
            "  per-direction trace holds = {}\n",
            self.section_trace_holds
        );
        s += &format!("  {k} = {}\n", fmt_f64(self.vol_k));
        s += &format!("  {l} = {}\n", fmt_f64(self.vol_l));
        s += &format!(
            "  volume resolution = {}, tolerance = {:e}\n",
            self.volume_resolution, self.tolerance
        );
        s += &format!(
            "{k} {cmp} {l}: {}\n",
            if self.satisfied {
                "satisfied"
            } else {
                "violated"
            }
        );
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "mode,vol_k,vol_l,satisfied,volume_resolution,tolerance,hypothesis_directions,\
             min_hypothesis_margin,section_average_k,section_average_l,section_trace_holds\n",
        );
        s += &format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            self.mode,
            fmt_f64(self.vol_k),
            fmt_f64(self.vol_l),
            self.satisfied,
            self.volume_resolution,
            fmt_f64(self.tolerance),
            self.hypothesis_directions,
            fmt_f64(self.min_hypothesis_margin),
            fmt_f64(self.section_average_k),
            fmt_f64(self.section_average_l),
            self.section_trace_holds,
        );
        s
    }
}

/// Relative tolerance of the final volume comparison.
pub const VOLUME_TOLERANCE: f64 = 1e-6;

/// Checks the hypothesis on every direction of `dir_grid` (sections or
/// projections of `K` fit into those of `L` after an in-plane rotation),
/// then compares volumes on a kink-aware grid of `volume_resolution`.
///
/// The averaged section integrals over `dir_grid` are recorded as a trace
/// of the argument that connects the two.
pub fn shephard_mm_report(
    k: &BodySpec,
    l: &BodySpec,
    mode: MmMode,
    dir_grid: &SphereGrid,
    fit_cfg: &FitConfig,
    volume_resolution: usize,
) -> Result<VolumeReport> {
    require_3d(k)?;
    require_3d(l)?;
    check_grid(k, dir_grid)?;
    fit_cfg.validate()?;
    if mode == MmMode::Projections && !(k.is_convex() && l.is_convex()) {
        return Err(Error::InvalidParameter(
            "projection mode needs convex bodies".into(),
        ));
    }

    let shadows = |body: &BodySpec, frame: &crate::geom::PlaneFrame| match mode {
        MmMode::Sections => section_shadow(body, frame),
        MmMode::Projections => projection_shadow(body, frame),
    };
    let margins: Vec<f64> = dir_grid
        .nodes()
        .iter()
        .map(|xi| -> Result<f64> {
            let frame = frame_for(xi);
            let fit = best_rotation_fit(&shadows(k, &frame)?, &shadows(l, &frame)?, fit_cfg)?;
            if !fit.found {
                return Err(Error::HypothesisFailed {
                    direction: xi.as_slice().to_vec(),
                    margin: fit.min_margin,
                });
            }
            Ok(fit.min_margin)
        })
        .collect::<Result<_>>()?;
    let min_hypothesis_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);

    // Radial function of K (sections) or of K* = 1/h_K (projections).
    let rho = |body: &BodySpec, u: &[f64]| match mode {
        MmMode::Sections => body.radial_at(u),
        MmMode::Projections => 1.0 / body.support_at(u),
    };
    let m = fit_cfg.u_grid;
    let du = TAU / m as f64;
    let traces: Vec<(f64, f64)> = dir_grid
        .nodes()
        .par_iter()
        .map(|xi| {
            let frame = frame_for(xi);
            let mut dir = [0.0; 3];
            let (mut sk, mut sl) = (0.0, 0.0);
            for j in 0..m {
                frame.direction_into(j as f64 * du, &mut dir);
                sk += rho(k, &dir).powi(3);
                sl += rho(l, &dir).powi(3);
            }
            (sk * du, sl * du)
        })
        .collect();
    let tol = VOLUME_TOLERANCE;
    let agrees = |a: f64, b: f64| match mode {
        MmMode::Sections => a <= b * (1.0 + tol),
        MmMode::Projections => a >= b * (1.0 - tol),
    };
    let section_trace_holds = traces.iter().all(|&(a, b)| agrees(a, b));
    let w = dir_grid.weights();
    let section_average_k = traces.iter().zip(w).map(|(t, w)| t.0 * w).sum();
    let section_average_l = traces.iter().zip(w).map(|(t, w)| t.1 * w).sum();

    let vol = |body: &BodySpec| -> Result<f64> {
        let grid = match mode {
            MmMode::Sections => grid_with_breaks(&[body], volume_resolution, |b| b.radial_kinks())?,
            MmMode::Projections => {
                grid_with_breaks(&[body], volume_resolution, |b| b.support_kinks())?
            }
        };
        Ok(grid.integrate(|u| rho(body, u.as_slice()).powi(3)) / 3.0)
    };
    let vol_k = vol(k)?;
    let vol_l = vol(l)?;
    Ok(VolumeReport {
        mode,
        vol_k,
        vol_l,
        satisfied: agrees(vol_k, vol_l),
        volume_resolution,
        tolerance: tol,
        hypothesis_directions: dir_grid.len(),
        min_hypothesis_margin,
        section_average_k,
        section_average_l,
        section_trace_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{apply_rotation, polar};
    use crate::geom::Rotation;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn product(res: usize) -> SphereGrid {
        sphere_grid(3, res, GridKind::Product).unwrap()
    }

    #[test]
    fn ball_volume() {
        assert_abs_diff_eq!(
            volume(&BodySpec::ball(1.0), &product(128)).unwrap(),
            4.0 * PI / 3.0,
            epsilon = 1e-8
        );
        let g4 = sphere_grid(4, 10, GridKind::MonteCarlo { seed: 1 }).unwrap();
        // ρ ≡ 1 integrates exactly with any equal-weight grid: π²/2.
        assert_abs_diff_eq!(
            volume(&BodySpec::ball_in(4, 1.0), &g4).unwrap(),
            PI * PI / 2.0,
            epsilon = 1e-12
        );
        assert!(volume(&BodySpec::ball(1.0), &g4).is_err());
    }

    #[test]
    fn catalog_volumes() {
        let cyl = BodySpec::cylinder(0.51, 0.51);
        let g = volume_grid(&[&cyl], 128).unwrap();
        assert_abs_diff_eq!(
            volume(&cyl, &g).unwrap(),
            TAU * 0.51f64.powi(3),
            epsilon = 1e-5
        );
        let cone = BodySpec::double_cone(1.0, 1.0);
        let g = volume_grid(&[&cone], 128).unwrap();
        assert_abs_diff_eq!(volume(&cone, &g).unwrap(), TAU / 3.0, epsilon = 1e-4);
    }

    #[test]
    fn volume_scales_and_is_rotation_invariant() {
        let cyl = BodySpec::cylinder(0.6, 0.4);
        let g = volume_grid(&[&cyl], 128).unwrap();
        let v = volume(&cyl, &g).unwrap();
        let d = cyl.clone().dilated(1.7);
        assert_abs_diff_eq!(
            volume(&d, &g).unwrap() / v,
            1.7f64.powi(3),
            epsilon = 1e-7 * 4.913
        );
        // Rotation moves the kinks off the panel breaks, so compare a
        // smooth body on a plain grid.
        let ell = BodySpec::ball(1.3);
        let r = Rotation::random(3, &mut ChaCha8Rng::seed_from_u64(3));
        let g = product(64);
        let a = volume(&ell, &g).unwrap();
        let b = volume(&apply_rotation(&ell, &r).unwrap(), &g).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-8 * a);
    }

    #[test]
    fn cauchy_surface_areas() {
        let g = product(32);
        for (radius, tol) in [(0.5, 1e-3), (1.0, 1e-4), (2.0, 1e-3)] {
            let s = surface_area_cauchy(&BodySpec::ball(radius), &g, 1024).unwrap();
            assert_abs_diff_eq!(
                s,
                4.0 * PI * radius * radius,
                epsilon = tol * 4.0 * PI * radius * radius
            );
        }
        let r = 0.51;
        let s = surface_area_cauchy(&BodySpec::cylinder(r, r), &g, 4096).unwrap();
        assert_abs_diff_eq!(s, 6.0 * PI * r * r, epsilon = 1e-3);
    }

    #[test]
    fn mean_support_values() {
        let g = product(64);
        assert_abs_diff_eq!(
            mean_support(&BodySpec::ball(1.0), &g).unwrap(),
            4.0 * PI,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            mean_support(&BodySpec::ball(2.5), &g).unwrap(),
            10.0 * PI,
            epsilon = 1e-8
        );
        let cone = BodySpec::double_cone(1.0, 0.7);
        let r = Rotation::random(3, &mut ChaCha8Rng::seed_from_u64(9));
        let g = product(256);
        let a = mean_support(&cone, &g).unwrap();
        let b = mean_support(&apply_rotation(&cone, &r).unwrap(), &g).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-4);
    }

    #[test]
    fn mean_support_rotation_invariance_for_smooth_bodies() {
        let body = polar(&BodySpec::ball(0.8));
        let r = Rotation::random(3, &mut ChaCha8Rng::seed_from_u64(11));
        let g = product(64);
        let a = mean_support(&body, &g).unwrap();
        let b = mean_support(&apply_rotation(&body, &r).unwrap(), &g).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }

    #[test]
    fn constant_width_identity() {
        let g = product(32);
        let (ok, residual) = constant_width_check(&BodySpec::ball(1.0), &g, 1e-9).unwrap();
        assert!(ok);
        assert!(residual < 1e-4, "{residual}");
        let (_, residual) = constant_width_check(&BodySpec::ball(1.5), &g, 1e-9).unwrap();
        assert!(residual < 1e-3, "{residual}");
        assert!(matches!(
            constant_width_check(&BodySpec::cylinder(0.51, 0.51), &g, 1e-6),
            Err(Error::NotApplicable(_))
        ));
        let r = constant_width_report(&BodySpec::cylinder(0.51, 0.51), &g, 1e-6).unwrap();
        assert!(!r.is_constant_width);
        assert!(r.identity_residual.is_finite());
    }

    fn fast_cfg() -> FitConfig {
        FitConfig {
            angle_grid: 360,
            u_grid: 1024,
            ..Default::default()
        }
    }

    #[test]
    fn sections_report_for_cylinder_in_cone() {
        let k = BodySpec::cylinder(0.51, 0.51);
        let l = BodySpec::double_cone(1.0, 1.0);
        let rep =
            shephard_mm_report(&k, &l, MmMode::Sections, &product(6), &fast_cfg(), 128).unwrap();
        assert!(rep.satisfied, "{}", rep.to_text());
        assert!(rep.section_trace_holds);
        assert!(rep.section_average_k <= rep.section_average_l);
        assert_abs_diff_eq!(rep.vol_k, TAU * 0.51f64.powi(3), epsilon = 1e-5);
        assert_abs_diff_eq!(rep.vol_l, TAU / 3.0, epsilon = 1e-4);
    }

    #[test]
    fn projections_report_compares_polar_volumes() {
        let k = BodySpec::ball(0.9);
        let l = BodySpec::cylinder(1.0, 1.0);
        let rep =
            shephard_mm_report(&k, &l, MmMode::Projections, &product(6), &fast_cfg(), 128).unwrap();
        assert!(rep.satisfied, "{}", rep.to_text());
        assert_abs_diff_eq!(rep.vol_k, 4.0 * PI / 3.0 / 0.729, epsilon = 1e-6);
        // The polar of the unit cylinder is the double cone with a = c = 1.
        assert_abs_diff_eq!(rep.vol_l, TAU / 3.0, epsilon = 1e-4);
        assert!(rep.to_csv().lines().count() == 2);
    }

    #[test]
    fn identical_bodies_satisfy_trivially() {
        let k = BodySpec::double_cone(1.0, 0.8);
        for mode in [MmMode::Sections, MmMode::Projections] {
            let rep = shephard_mm_report(&k, &k, mode, &product(4), &fast_cfg(), 64).unwrap();
            assert!(rep.satisfied);
            assert_eq!(rep.vol_k, rep.vol_l);
        }
    }

    #[test]
    fn failed_hypothesis_names_a_direction() {
        let k = BodySpec::ball(1.1);
        let l = BodySpec::ball(1.0);
        match shephard_mm_report(&k, &l, MmMode::Sections, &product(4), &fast_cfg(), 64) {
            Err(Error::HypothesisFailed { direction, margin }) => {
                assert_eq!(direction.len(), 3);
                assert!(margin < -0.09);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mode_parses() {
        assert_eq!("sections".parse::<MmMode>().unwrap(), MmMode::Sections);
        assert_eq!(
            "projections".parse::<MmMode>().unwrap(),
            MmMode::Projections
        );
        assert!("volumes".parse::<MmMode>().is_err());
    }
}
