//! Rotation-containment search for shadows and whole bodies.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::bodies::{BodySpec, Scratch};
use crate::error::{Error, Result};
use crate::geom::{golden_max, Rotation, SphereGrid};
use crate::shadows::{rotated_shadow, Shadow2D};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    /// Number of uniformly spaced trial angles in `[0, 2π)`.
    pub angle_grid: usize,
    /// Number of uniformly spaced `u` samples for each margin.
    pub u_grid: usize,
    /// Trisection rounds around each of the best grid angles.
    pub refine_iters: usize,
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            angle_grid: 720,
            u_grid: 2048,
            refine_iters: 40,
            tol: 1e-9,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.angle_grid < 8 {
            return Err(Error::InvalidParameter(format!(
                "angle_grid {} < 8",
                self.angle_grid
            )));
        }
        if self.u_grid < 32 {
            return Err(Error::InvalidParameter(format!(
                "u_grid {} < 32",
                self.u_grid
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub found: bool,
    /// Rotation angle in `[0, 2π)` applied to the first shadow.
    pub witness_angle: f64,
    pub min_margin: f64,
    /// Number of margin evaluations on the angle grid.
    pub grid_points: usize,
    pub refined: bool,
}

fn check_kinds(a: &Shadow2D, b: &Shadow2D) -> Result<()> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    Ok(())
}

/// `min_k B(u_k) − A(u_k)` over `u_k = 2πk/u_grid`. Nonnegative means
/// `A ⊆ B` at grid resolution.
pub fn containment_margin(a: &Shadow2D, b: &Shadow2D, u_grid: usize) -> Result<f64> {
    check_kinds(a, b)?;
    Ok(grid_margin(a, b, u_grid))
}

fn grid_margin(a: &Shadow2D, b: &Shadow2D, u_grid: usize) -> f64 {
    let du = TAU / u_grid as f64;
    (0..u_grid)
        .map(|k| {
            let u = k as f64 * du;
            b.eval(u) - a.eval(u)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Like [`containment_margin`], but each of the three lowest local minima on
/// the grid is polished by a continuous golden-section search, so the
/// result approximates the true minimum over all `u`.
pub fn refined_margin(a: &Shadow2D, b: &Shadow2D, u_grid: usize) -> Result<f64> {
    check_kinds(a, b)?;
    Ok(polished_margin(a, b, u_grid))
}

fn polished_margin(a: &Shadow2D, b: &Shadow2D, u_grid: usize) -> f64 {
    let du = TAU / u_grid as f64;
    let gap = |u: f64| b.eval(u) - a.eval(u);
    let values: Vec<f64> = (0..u_grid).map(|k| gap(k as f64 * du)).collect();
    let mut best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    for k in top_local_maxima(&negated, 3) {
        let centre = k as f64 * du;
        let (_, neg) = golden_max(&mut |u: f64| -gap(u), centre - du, centre + du, 60);
        best = best.min(-neg);
    }
    best
}

/// Indices of the `count` largest cyclic local maxima (ties broken by index).
fn top_local_maxima(values: &[f64], count: usize) -> Vec<usize> {
    let n = values.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] >= prev && values[i] >= next
        })
        .collect();
    peaks.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    // Plateaus produce runs of adjacent peaks; keep one per run.
    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    for p in peaks {
        if chosen.len() == count {
            break;
        }
        let adjacent = chosen
            .iter()
            .any(|&c| (c + n - p) % n <= 1 || (p + n - c) % n <= 1);
        if !adjacent {
            chosen.push(p);
        }
    }
    chosen
}

/// Maximizes `m(φ) = margin(rotated_shadow(A, φ), B)` over `φ`.
///
/// `m` is the [`refined_margin`]: the `u`-grid minimum with its lowest dips
/// polished to the continuous minimum. A plain grid minimum would depend on
/// how the `u` samples line up with `A` after rotation, which leaves ripples
/// in `m` and makes the result depend on the phase of `A`.
///
/// The objective is sampled on a uniform grid of `cfg.angle_grid` angles
/// (in parallel, reduced in index order), then each of the three best local
/// grid maxima is refined by trisection within one grid step.
pub fn best_rotation_fit(a: &Shadow2D, b: &Shadow2D, cfg: &FitConfig) -> Result<FitResult> {
    check_kinds(a, b)?;
    cfg.validate()?;
    let dphi = TAU / cfg.angle_grid as f64;
    let objective = |phi: f64| polished_margin(&rotated_shadow(a, phi), b, cfg.u_grid);
    let margins: Vec<f64> = (0..cfg.angle_grid)
        .into_par_iter()
        .map(|k| objective(k as f64 * dphi))
        .collect();

    let mut best_phi = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (k, &m) in margins.iter().enumerate() {
        if m > best {
            best = m;
            best_phi = k as f64 * dphi;
        }
    }
    let starts = top_local_maxima(&margins, 3);
    let refined: Vec<(f64, f64)> = starts
        .par_iter()
        .map(|&k| trisect(&objective, k as f64 * dphi, dphi, cfg.refine_iters))
        .collect();
    for (phi, m) in refined {
        if m > best {
            best = m;
            best_phi = phi;
        }
    }
    Ok(FitResult {
        found: best >= -cfg.tol,
        witness_angle: best_phi.rem_euclid(TAU),
        min_margin: best,
        grid_points: cfg.angle_grid,
        refined: cfg.refine_iters > 0,
    })
}

/// Ternary search for a maximum of `f` on `[c − h, c + h]`, returning the
/// best point seen.
fn trisect<F: Fn(f64) -> f64>(f: &F, centre: f64, h: f64, iters: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (centre - h, centre + h);
    let mut best = (centre, f(centre));
    for _ in 0..iters {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let (f1, f2) = (f(m1), f(m2));
        if f1 > best.1 {
            best = (m1, f1);
        }
        if f2 > best.1 {
            best = (m2, f2);
        }
        if f1 < f2 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm > best.1 {
        best = (mid, fm);
    }
    best
}

/// Whether `A` and `B` are rotations of each other at tolerance `cfg.tol`:
/// each fits into the other with a margin of size at most `tol`. Returns
/// the witness angle of the `A → B` fit.
pub fn congruent_up_to_rotation(
    a: &Shadow2D,
    b: &Shadow2D,
    cfg: &FitConfig,
) -> Result<(bool, f64)> {
    let ab = best_rotation_fit(a, b, cfg)?;
    let ba = best_rotation_fit(b, a, cfg)?;
    let ok =
        ab.found && ba.found && ab.min_margin.abs() <= cfg.tol && ba.min_margin.abs() <= cfg.tol;
    Ok((ok, ab.witness_angle))
}

/// Index into `probes` of the first direction (in a strided scan order)
/// with `ρ_{ψK}(u) > ρ_L(u) + tol`, if any.
///
/// The scan visits `(k · stride) mod N`, with a stride coprime to `N` near
/// `N/φ²`, so early exits find violations spread over the sphere quickly.
pub fn first_violation(
    k: &BodySpec,
    l: &BodySpec,
    psi: &Rotation,
    probes: &SphereGrid,
    tol: f64,
) -> Option<usize> {
    let nodes = probes.nodes();
    let n = nodes.len();
    let stride = scan_stride(n);
    let mut pulled: Scratch = Scratch::from_elem(0.0, k.dim());
    (0..n).map(|i| (i * stride) % n).find(|&i| {
        let u = nodes[i].as_slice();
        psi.apply_transpose_into(u, &mut pulled);
        k.radial_at(&pulled) > l.radial_at(u) + tol
    })
}

fn scan_stride(n: usize) -> usize {
    if n < 3 {
        return 1;
    }
    let mut s = ((n as f64) * 0.381_966_011_250_105).round() as usize;
    s = s.max(1);
    while gcd(s, n) != 1 {
        s += 1;
    }
    s
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// First rotation `ψ` (in list order) with `ρ_{ψK} ≤ ρ_L + tol` on every
/// grid node. `None` is evidence, not proof, that no rotation of `K` fits
/// in `L`.
pub fn so3_fit_search(
    k: &BodySpec,
    l: &BodySpec,
    rotations: &[Rotation],
    grid: &SphereGrid,
    tol: f64,
) -> Result<Option<Rotation>> {
    for (a, b) in [(k.dim(), l.dim()), (k.dim(), grid.dim())] {
        if a != b {
            return Err(Error::DimensionMismatch { left: a, right: b });
        }
    }
    if let Some(r) = rotations.iter().find(|r| r.dim() != k.dim()) {
        return Err(Error::DimensionMismatch {
            left: r.dim(),
            right: k.dim(),
        });
    }
    let hit = rotations
        .par_iter()
        .position_first(|psi| first_violation(k, l, psi, grid, tol).is_none());
    Ok(hit.map(|i| rotations[i].clone()))
}
