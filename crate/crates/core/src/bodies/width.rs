use rayon::prelude::*;

use super::{BodySpec, Scratch};
use crate::error::{Error, Result};
use crate::geom::{SphereGrid, UnitVector};

/// Width `ω(u) = h(u) + h(−u)`.
pub fn width(spec: &BodySpec, u: &UnitVector) -> f64 {
    let neg: Scratch = u.as_slice().iter().map(|x| -x).collect();
    spec.support(u) + spec.support_at(&neg)
}

/// Grid directions of (numerically) maximal width, with `u` and `−u`
/// identified.
///
/// Nodes with `ω ≥ max − tol` are linked when they lie within twice the grid
/// spacing of each other (up to sign). A linked group no wider than four
/// spacings is one cluster. Wider groups, such as rings of diameters or the
/// whole sphere for a body of constant width, are split greedily in order of
/// decreasing width into clusters of radius two spacings. One representative
/// per cluster is returned.
pub fn diameter_directions(
    spec: &BodySpec,
    grid: &SphereGrid,
    tol: f64,
) -> Result<Vec<UnitVector>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol = {tol} must be positive"
        )));
    }
    if grid.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            left: grid.dim(),
            right: spec.dim(),
        });
    }
    let widths: Vec<f64> = grid.nodes().par_iter().map(|u| width(spec, u)).collect();
    let max = widths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut candidates: Vec<usize> = (0..widths.len())
        .filter(|&i| widths[i] >= max - tol)
        .collect();
    candidates.sort_by(|&a, &b| widths[b].total_cmp(&widths[a]).then(a.cmp(&b)));

    let nodes = grid.nodes();
    let link = 2.0 * grid.spacing();
    let axial = |a: usize, b: usize| {
        let t = nodes[candidates[a]].angle_to(&nodes[candidates[b]]);
        t.min(std::f64::consts::PI - t)
    };

    let m = candidates.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..m {
        for b in a + 1..m {
            if axial(a, b) <= link {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; m];
    for i in 0..m {
        let r = root(&mut parent, i);
        if group_of[r] == usize::MAX {
            group_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[r]].push(i);
    }

    let mut out = Vec::new();
    for g in groups {
        let wide = g
            .iter()
            .any(|&a| g.iter().any(|&b| axial(a, b) > 2.0 * link));
        if !wide {
            out.push(nodes[candidates[g[0]]].clone());
            continue;
        }
        let mut leaders: Vec<usize> = Vec::new();
        for &i in &g {
            if !leaders.iter().any(|&l| axial(l, i) <= link) {
                leaders.push(i);
            }
        }
        out.extend(leaders.into_iter().map(|l| nodes[candidates[l]].clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{sphere_grid, GridKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn widths_of_catalog_bodies() {
        let z = UnitVector::axis(3, 2);
        assert_eq!(width(&BodySpec::ball(1.0), &z), 2.0);
        assert_abs_diff_eq!(width(&BodySpec::cylinder(0.51, 0.51), &z), 1.02);
        assert_eq!(width(&BodySpec::double_cone(1.0, 1.0), &z), 2.0);
    }

    #[test]
    fn width_is_even() {
        let grid = sphere_grid(3, 16, GridKind::Product).unwrap();
        let spec = BodySpec::cylinder(0.6, 0.3);
        for u in grid.nodes() {
            assert_eq!(width(&spec, u), width(&spec, &u.neg()));
        }
    }

    #[test]
    fn elongated_double_cone_has_axial_diameter() {
        let spec = BodySpec::double_cone(0.5, 1.0);
        let grid = sphere_grid(3, 64, GridKind::Product).unwrap();
        let dirs = diameter_directions(&spec, &grid, 1e-3).unwrap();
        assert_eq!(dirs.len(), 1, "{dirs:?}");
        assert!(dirs[0][2].abs() > 0.99);
        // Dense check: no direction beats the axis.
        let axis = width(&spec, &UnitVector::axis(3, 2));
        for k in 0..=1000 {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / 1000.0;
            let u = UnitVector::new(vec![t.sin(), 0.0, t.cos()]).unwrap();
            assert!(width(&spec, &u) <= axis + 1e-15);
        }
    }

    #[test]
    fn unit_double_cone_is_maximal_on_axis_and_equator() {
        let spec = BodySpec::double_cone(1.0, 1.0);
        assert_eq!(width(&spec, &UnitVector::axis(3, 2)), 2.0);
        assert_eq!(width(&spec, &UnitVector::axis(3, 0)), 2.0);
        // The width has a conical peak at the poles, and the nearest product
        // nodes sit about 0.05 away from them, so the tolerance must cover
        // the drop 2(1 − cos 0.05).
        let grid = sphere_grid(3, 64, GridKind::Product).unwrap();
        let dirs = diameter_directions(&spec, &grid, 5e-3).unwrap();
        assert!(dirs.iter().any(|u| u[2].abs() > 0.99));
        assert!(dirs.iter().any(|u| u[2].abs() < 0.05));
    }

    #[test]
    fn ball_returns_many_clusters() {
        let grid = sphere_grid(3, 32, GridKind::Product).unwrap();
        let dirs = diameter_directions(&BodySpec::ball(1.0), &grid, 1e-9).unwrap();
        assert!(dirs.len() > 20);
    }

    #[test]
    fn squat_cylinder_diameters_form_a_ring() {
        let (r, hh) = (0.51, 0.51);
        let spec = BodySpec::cylinder(r, hh);
        let grid = sphere_grid(3, 64, GridKind::Product).unwrap();
        let dirs = diameter_directions(&spec, &grid, 1e-3).unwrap();
        assert!(dirs.len() > 4);
        // Width 2(r s + hh|z|) peaks at |z|/s = hh/r.
        let z = hh / r.hypot(hh);
        for u in &dirs {
            assert!((u[2].abs() - z).abs() < 0.1, "{:?}", u);
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let grid = sphere_grid(3, 8, GridKind::Product).unwrap();
        assert!(diameter_directions(&BodySpec::ball(1.0), &grid, 0.0).is_err());
    }
}
