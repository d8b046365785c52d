//! Spheres with small bumps: every section of `K` rotates into the
//! corresponding section of `L`, yet no rotation of `K` fits inside `L`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::report::{fmt_f64, CaseReport, CaseRow, Verdict};
use crate::bodies::{
    Band, BodySpec, BumpSphere, BumpSurface, Cap, Scratch, CAP_PROFILE_MAX_CONVEX_CURVATURE,
};
use crate::error::{Error, Result};
use crate::fitting::{best_rotation_fit, containment_margin, first_violation, FitConfig};
use crate::geom::{dot, frame_for, sphere_grid, GridKind, Rotation, SphereGrid, UnitVector};
use crate::shadows::section_shadow;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpParams {
    /// Dimension of the ambient space.
    pub n: usize,
    /// Geodesic spacing of the simplex vertices.
    pub v: f64,
    /// Radius of the small bumps.
    pub delta: f64,
    /// Radius of the large bumps.
    pub delta_big: f64,
    /// Height of the large bumps.
    pub eps: f64,
    /// Height of the small bumps and of the equatorial band.
    pub eps_small: f64,
    /// Number of height layers of the upper hemisphere used to report
    /// where large bumps sit.
    pub layers: usize,
}

impl Default for BumpParams {
    fn default() -> Self {
        BumpParams {
            n: 3,
            v: 0.3,
            delta: 0.02,
            delta_big: 0.12,
            eps: 2e-4,
            eps_small: 2e-5,
            layers: 8,
        }
    }
}

impl BumpParams {
    /// Desk-scale parameters in dimension `n`.
    pub fn desk(n: usize) -> Self {
        BumpParams {
            n,
            layers: 1 << n.min(16),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 3 {
            return bad(format!("n = {} < 3", self.n));
        }
        if !(self.delta > 0.0 && self.delta < self.delta_big) {
            return bad(format!(
                "need 0 < delta < delta_big, got {} and {}",
                self.delta, self.delta_big
            ));
        }
        if !(2.0 * self.delta_big < self.v && self.v < FRAC_PI_2) {
            return bad(format!("need 2·delta_big < v < π/2, got v = {}", self.v));
        }
        let both_zero = self.eps == 0.0 && self.eps_small == 0.0;
        if !(self.eps_small >= 0.0 && (both_zero || self.eps_small < self.eps)) {
            return bad(format!(
                "need 0 ≤ eps_small < eps, got {} and {}",
                self.eps_small, self.eps
            ));
        }
        if self.layers == 0 {
            return bad("layers must be positive".into());
        }
        Ok(())
    }

    /// Upper bound of `height · max c'' / radius²` over bump kinds; values
    /// well below 1 keep the perturbed sphere convex.
    pub fn curvature_load(&self) -> f64 {
        let small = self.eps_small * CAP_PROFILE_MAX_CONVEX_CURVATURE / (self.delta * self.delta);
        let big = self.eps * CAP_PROFILE_MAX_CONVEX_CURVATURE / (self.delta_big * self.delta_big);
        small + big
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpRole {
    K,
    L,
}

/// A large bump of `L` and where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct BigBump {
    /// Zero-based simplex indices of the sub-configuration (always
    /// containing the pole, index 0).
    pub subset: Vec<usize>,
    /// Which vertex of the subset this bump is the image of.
    pub vertex: usize,
    pub center: UnitVector,
    /// Height layer `⌊z · layers⌋` of the center.
    pub layer: usize,
}

/// Geometric data behind the pair of bump bodies.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpPlacement {
    pub params: BumpParams,
    /// Regular simplex vertices; index 0 is the north pole.
    pub simplex: Vec<UnitVector>,
    /// For each sub-configuration, the rotation moving it into place.
    pub slides: Vec<(Vec<usize>, Rotation)>,
    pub big: Vec<BigBump>,
}

impl BumpPlacement {
    /// Smallest angular distance between two large bump centers.
    pub fn min_big_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.big.iter().enumerate() {
            for b in &self.big[i + 1..] {
                best = best.min(a.center.angle_to(&b.center));
            }
        }
        best
    }

    /// Angular distance from the pole to the nearest bump of `L`, minus
    /// that bump's radius (positive means the pole is uncovered).
    pub fn pole_clearance(&self) -> f64 {
        let pole = &self.simplex[0];
        let p = &self.params;
        let mut best = FRAC_PI_2 - p.delta;
        for s in &self.simplex[1..] {
            best = best.min(pole.angle_to(s) - p.delta);
        }
        for b in &self.big {
            best = best.min(pole.angle_to(&b.center) - p.delta_big);
        }
        best
    }
}

/// `n` unit vectors with pairwise angle `v`, the first at the north pole:
/// `ξ_j = cos v·e_n + sin v·w_j` with `w_i·w_j = cos v / (1 + cos v)`.
pub fn simplex_vertices(n: usize, v: f64) -> Result<Vec<UnitVector>> {
    let m = n - 1;
    let c = v.cos() / (1.0 + v.cos());
    let gram = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { c });
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::DegenerateConfig("simplex Gram matrix is not positive".into()))?;
    let l = chol.l();
    let mut out = vec![UnitVector::north_pole(n)];
    for j in 0..m {
        let mut x = vec![0.0; n];
        for k in 0..m {
            x[k] = v.sin() * l[(j, k)];
        }
        x[n - 1] = v.cos();
        out.push(UnitVector::new(x)?);
    }
    Ok(out)
}

/// Proper sub-configurations containing the pole, ordered by size and then
/// lexicographically.
fn pole_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 2..n {
        let mut combo: Vec<usize> = (1..size).collect();
        loop {
            let mut s = vec![0];
            s.extend(&combo);
            out.push(s);
            // Next combination of size−1 from 1..n.
            let k = combo.len();
            let mut i = k;
            while i > 0 && combo[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

/// Places the large bumps of `L`.
///
/// Each sub-configuration `S ∋ ξ₁` is rotated in the plane of `ξ₁` and the
/// centroid direction of `S \ {ξ₁}` by `(2|S| − 3)·v`; its images get large
/// bumps. For a pair `{ξ₁, ξ_j}` this slides the pair one step `v` along its
/// own great circle, so a section through both small bumps of `K` turns onto
/// two large bumps of `L`. Larger subsets slide further to stay clear of the
/// pairs. Placement fails if large bumps overlap or cover the pole, which
/// happens for `n ≥ 6` at the default spacing.
pub fn bump_placement(p: &BumpParams) -> Result<BumpPlacement> {
    p.validate()?;
    let simplex = simplex_vertices(p.n, p.v)?;
    let pole = &simplex[0];
    let mut slides = Vec::new();
    let mut big = Vec::new();
    for subset in pole_subsets(p.n) {
        let mut centroid = vec![0.0; p.n];
        for &k in &subset[1..] {
            centroid
                .iter_mut()
                .zip(simplex[k].as_slice())
                .for_each(|(c, x)| *c += x);
        }
        let d = dot(&centroid, pole.as_slice());
        centroid
            .iter_mut()
            .zip(pole.as_slice())
            .for_each(|(c, x)| *c -= d * x);
        let tangent = UnitVector::new(centroid)?;
        let rot = Rotation::in_plane(pole, &tangent, (2 * subset.len() - 3) as f64 * p.v);
        for &k in &subset {
            let center = rot.apply(&simplex[k]);
            let z = center[p.n - 1].max(0.0);
            let layer = ((z * p.layers as f64) as usize).min(p.layers - 1);
            big.push(BigBump {
                subset: subset.clone(),
                vertex: k,
                center,
                layer,
            });
        }
        slides.push((subset, rot));
    }
    let placement = BumpPlacement {
        params: *p,
        simplex,
        slides,
        big,
    };
    let sep = placement.min_big_separation();
    if sep <= 2.0 * p.delta_big {
        return Err(Error::DegenerateConfig(format!(
            "large bumps overlap: separation {sep} ≤ 2·delta_big"
        )));
    }
    if placement.pole_clearance() <= 0.0 {
        return Err(Error::DegenerateConfig(
            "a bump of L covers the pole".into(),
        ));
    }
    Ok(placement)
}

fn surface_for(placement: &BumpPlacement, role: BumpRole) -> BumpSurface {
    let p = &placement.params;
    let small = |c: &UnitVector| Cap {
        center: c.clone(),
        radius: p.delta,
        height: p.eps_small,
    };
    match role {
        BumpRole::K => BumpSurface::new(p.n, placement.simplex.iter().map(small).collect(), vec![]),
        BumpRole::L => {
            let mut caps: Vec<Cap> = placement.simplex[1..].iter().map(small).collect();
            caps.extend(placement.big.iter().map(|b| Cap {
                center: b.center.clone(),
                radius: p.delta_big,
                height: p.eps,
            }));
            let band = Band {
                pole: placement.simplex[0].clone(),
                radius: p.delta,
                height: p.eps_small,
            };
            BumpSurface::new(p.n, caps, vec![band])
        }
    }
}

/// Number of midpoint pairs used when a construction checks convexity.
pub const CONSTRUCTION_PAIR_SAMPLES: usize = 20_000;

/// Builds one of the two bodies and checks its convexity numerically.
pub fn build_bump_body(p: &BumpParams, role: BumpRole) -> Result<BumpSphere> {
    let placement = bump_placement(p)?;
    let body = BumpSphere {
        params: *p,
        role,
        surface: surface_for(&placement, role),
    };
    let spec = BodySpec::BumpSphere(Arc::new(body.clone()));
    if let Some(v) = convexity_violation(&spec, CONSTRUCTION_PAIR_SAMPLES, 0) {
        return Err(Error::ConvexityFailure {
            p: v.p,
            q: v.q,
            excess: v.excess,
        });
    }
    Ok(body)
}

/// `K` = sphere with small bumps at the simplex vertices; `L` = sphere with
/// small bumps at all vertices but the pole, large bumps at the slid
/// sub-configurations, and a small band along the equator.
pub fn build_bump_bodies(p: &BumpParams) -> Result<(BodySpec, BodySpec)> {
    let k = build_bump_body(p, BumpRole::K)?;
    let l = build_bump_body(p, BumpRole::L)?;
    Ok((
        BodySpec::BumpSphere(Arc::new(k)),
        BodySpec::BumpSphere(Arc::new(l)),
    ))
}

/// Two boundary points whose midpoint lies outside the body.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityViolation {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// `‖m‖ − ρ(m/‖m‖)` at the midpoint `m`.
    pub excess: f64,
}

fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = crate::geom::norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Moves unit `a` by geodesic distance `t` in a random tangent direction.
fn nudge<R: Rng>(a: &[f64], t: f64, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..a.len()).map(|_| StandardNormal.sample(rng)).collect();
    let d = dot(&w, a);
    w.iter_mut().zip(a).for_each(|(x, y)| *x -= d * y);
    let len = crate::geom::norm(&w).max(1e-300);
    let (s, c) = t.sin_cos();
    a.iter().zip(&w).map(|(x, y)| c * x + s * y / len).collect()
}

/// Midpoint test on `pair_samples` seeded pairs of boundary points.
///
/// Half of the pairs are independent uniform directions. The other half
/// start near a feature of the body (bump centers, band points; uniform if
/// there are none) and pair it with a partner at a log-uniform distance in
/// `[1e-4, 0.5]`, which is where a dent would show.
pub fn convexity_violation(
    body: &BodySpec,
    pair_samples: usize,
    seed: u64,
) -> Option<ConvexityViolation> {
    let n = body.dim();
    let hints = body.feature_hints();
    let reach = if hints.is_empty() { 0.0 } else { 0.15 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..pair_samples)
        .map(|i| {
            if i % 2 == 0 || hints.is_empty() {
                let a = random_unit(n, &mut rng);
                let b = if i % 2 == 0 {
                    random_unit(n, &mut rng)
                } else {
                    let t = 1e-4 * (5000f64).powf(rng.random::<f64>());
                    nudge(&a, t, &mut rng)
                };
                (a, b)
            } else {
                let h = &hints[rng.random_range(0..hints.len())];
                let a = nudge(h.as_slice(), reach * rng.random::<f64>(), &mut rng);
                let t = 1e-4 * (5000f64).powf(rng.random::<f64>());
                let b = nudge(&a, t, &mut rng);
                (a, b)
            }
        })
        .collect();
    let worst = pairs
        .par_iter()
        .map(|(a, b)| {
            let ra = body.radial_at(a);
            let rb = body.radial_at(b);
            let m: Scratch = a
                .iter()
                .zip(b)
                .map(|(x, y)| 0.5 * (ra * x + rb * y))
                .collect();
            let len = crate::geom::norm(&m);
            if len < 1e-12 {
                return f64::NEG_INFINITY;
            }
            let dir: Scratch = m.iter().map(|x| x / len).collect();
            len - body.radial_at(&dir)
        })
        .collect::<Vec<f64>>();
    let (idx, excess) = worst
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
    (excess > 1e-12).then(|| {
        let (a, b) = &pairs[idx];
        ConvexityViolation {
            p: a.iter().map(|x| x * body.radial_at(a)).collect(),
            q: b.iter().map(|x| x * body.radial_at(b)).collect(),
            excess,
        }
    })
}

/// `true` iff no sampled midpoint leaves the body by more than `1e-12`.
pub fn convexity_check(body: &BodySpec, pair_samples: usize, seed: u64) -> Result<bool> {
    if pair_samples < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "pair_samples {pair_samples} < 10000"
        )));
    }
    Ok(convexity_violation(body, pair_samples, seed).is_none())
}

/// Normal of a section whose great circle passes within the bump radius of
/// one or two randomly chosen bumps of `K`.
fn targeted_normal<R: Rng>(centers: &[UnitVector], delta: f64, rng: &mut R) -> Option<UnitVector> {
    let i = rng.random_range(0..centers.len());
    let a = nudge(centers[i].as_slice(), delta * rng.random::<f64>(), rng);
    let b = if rng.random::<bool>() && centers.len() > 1 {
        let mut j = rng.random_range(0..centers.len() - 1);
        if j >= i {
            j += 1;
        }
        nudge(centers[j].as_slice(), delta * rng.random::<f64>(), rng)
    } else {
        random_unit(a.len(), rng)
    };
    let cross = crate::geom::cross(&a, &b);
    UnitVector::new(cross).ok()
}

/// Probe directions for the non-containment check in dimension `n`.
pub fn probe_grid(n: usize, seed: u64) -> Result<SphereGrid> {
    if n == 3 {
        sphere_grid(3, 64, GridKind::Product)
    } else {
        sphere_grid(n, 20_000, GridKind::MonteCarlo { seed })
    }
}

/// Sampled evidence for the bump construction.
///
/// (i) For `n_sections` seeded section normals (alternately uniform and
/// aimed through one or two bumps of `K`), the section of `K` rotates into
/// the section of `L`. A section that already fits unrotated is recorded
/// with strategy `identity`; otherwise a full rotation search is run.
/// Only `n = 3` is supported for this part.
///
/// (ii) For `n_rotations` seeded rotations `ψ`, some probe direction has
/// `ρ_{ψK} > ρ_L + tol`. Probes are the images under `ψ` of the features of
/// `K`, then a fixed sphere grid.
pub fn verify_bump_case(
    k: &BodySpec,
    l: &BodySpec,
    n_sections: usize,
    n_rotations: usize,
    cfg: &FitConfig,
    seed: u64,
) -> Result<CaseReport> {
    cfg.validate()?;
    let n = k.dim();
    if l.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: l.dim(),
        });
    }
    if n_sections > 0 && n != 3 {
        return Err(Error::UnsupportedDimension {
            got: n,
            expected: "3 for section fitting".into(),
        });
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = k.feature_hints();
    let delta = match k {
        BodySpec::BumpSphere(b) => b.params.delta,
        _ => 0.05,
    };

    let normals: Vec<UnitVector> = (0..n_sections)
        .map(|i| loop {
            let candidate = if i % 2 == 1 && !centers.is_empty() {
                targeted_normal(&centers, delta, &mut rng)
            } else {
                UnitVector::new(random_unit(n, &mut rng)).ok()
            };
            if let Some(u) = candidate {
                break u;
            }
        })
        .collect();
    let rotations: Vec<Rotation> = (0..n_rotations)
        .map(|_| Rotation::random(n, &mut rng))
        .collect();

    let mut rows: Vec<CaseRow> = normals
        .iter()
        .enumerate()
        .map(|(i, xi)| -> Result<CaseRow> {
            let frame = frame_for(xi);
            let a = section_shadow(k, &frame)?;
            let b = section_shadow(l, &frame)?;
            let identity = containment_margin(&a, &b, cfg.u_grid)?;
            let (strategy, margin, ok) = if identity >= 0.0 {
                ("identity", identity, true)
            } else {
                let fit = best_rotation_fit(&a, &b, cfg)?;
                ("search", fit.min_margin, fit.found)
            };
            Ok(CaseRow {
                key: i as f64,
                strategy: strategy.into(),
                margin,
                blind_margin: None,
                ok,
            })
        })
        .collect::<Result<_>>()?;

    let grid = probe_grid(n, seed)?;
    let tol = cfg.tol;
    let rotation_rows: Vec<CaseRow> = rotations
        .par_iter()
        .enumerate()
        .map(|(i, psi)| {
            let mut img: Scratch = Scratch::from_elem(0.0, n);
            let mut pulled: Scratch = Scratch::from_elem(0.0, n);
            let excess_at = |u: &[f64], pulled: &mut Scratch| {
                psi.apply_transpose_into(u, pulled);
                k.radial_at(pulled) - l.radial_at(u)
            };
            let mut hit: Option<f64> = None;
            for c in &centers {
                psi.apply_into(c.as_slice(), &mut img);
                let e = excess_at(&img, &mut pulled);
                if e > tol {
                    hit = Some(e);
                    break;
                }
            }
            if hit.is_none() {
                if let Some(j) = first_violation(k, l, psi, &grid, tol) {
                    hit = Some(excess_at(grid.nodes()[j].as_slice(), &mut pulled));
                }
            }
            let margin = hit.unwrap_or_else(|| {
                grid.nodes()
                    .iter()
                    .map(|u| excess_at(u.as_slice(), &mut pulled))
                    .fold(f64::NEG_INFINITY, f64::max)
            });
            CaseRow {
                key: i as f64,
                strategy: "rotation_violation".into(),
                margin,
                blind_margin: None,
                ok: hit.is_some(),
            }
        })
        .collect();

    let sections_ok = rows.iter().filter(|r| r.ok).count();
    let searched = rows.iter().filter(|r| r.strategy == "search").count();
    let min_section = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let rotations_ok = rotation_rows.iter().filter(|r| r.ok).count();
    let min_excess = rotation_rows
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    rows.extend(rotation_rows);

    let mut failures = Vec::new();
    if sections_ok < n_sections {
        failures.push(format!("{} sections do not fit", n_sections - sections_ok));
    }
    if rotations_ok < n_rotations {
        failures.push(format!(
            "{} rotations show no violation",
            n_rotations - rotations_ok
        ));
    }
    let verdict = if failures.is_empty() {
        Verdict::Verified
    } else {
        Verdict::Failed(failures.join("; "))
    };

    let mut params = vec![
        ("n".into(), n.to_string()),
        ("sections".into(), n_sections.to_string()),
        ("rotations".into(), n_rotations.to_string()),
        ("seed".into(), seed.to_string()),
        ("angle_grid".into(), cfg.angle_grid.to_string()),
        ("u_grid".into(), cfg.u_grid.to_string()),
        ("tol".into(), cfg.tol.to_string()),
        ("probe_nodes".into(), grid.len().to_string()),
        ("profile".into(), "(1 - (t/radius)^2)^3".into()),
    ];
    if let BodySpec::BumpSphere(b) = k {
        params.insert(0, ("bump_params".into(), b.params.to_string()));
    }
    Ok(CaseReport {
        title: "bump spheres: sections fit, bodies do not".into(),
        key_name: "index".into(),
        params,
        rows,
        notes: vec![
            format!("sections fitting = {sections_ok}/{n_sections} ({searched} needed a rotation search)"),
            format!("min section margin = {}", fmt_f64(min_section)),
            format!("rotations with a violation = {rotations_ok}/{n_rotations}"),
            format!("min violation excess = {}", fmt_f64(min_excess)),
        ],
        verdict,
        min_margin: min_section,
        runtime: start.elapsed(),
    })
}
