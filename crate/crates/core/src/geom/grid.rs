use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::quadrature::gauss_legendre;
use super::vector::UnitVector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    /// Gauss–Legendre in `z` (panels split at the equator) × uniform azimuth.
    Product,
    /// Uniform random nodes with equal weights.
    MonteCarlo { seed: u64 },
}

/// Quadrature nodes on `S^{n-1}` with positive weights summing to the
/// sphere's surface measure.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    dim: usize,
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
    spacing: f64,
    resolution: usize,
}

/// Surface area of `S^{n-1} ⊂ R^n`: `2π^{n/2} / Γ(n/2)`.
pub fn sphere_surface_area(n: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^{k+1}| = 2π/k |S^{k-1}|.
    let (mut area, mut k) = if n % 2 == 1 { (2.0, 1) } else { (TAU, 2) };
    while k < n {
        area *= TAU / k as f64;
        k += 2;
    }
    area
}

pub fn sphere_grid(n: usize, resolution: usize, kind: GridKind) -> Result<SphereGrid> {
    match kind {
        GridKind::Product => {
            if n != 3 {
                return Err(Error::UnsupportedDimension {
                    got: n,
                    expected: "3 for product grids".into(),
                });
            }
            SphereGrid::product(resolution)
        }
        GridKind::MonteCarlo { seed } => SphereGrid::monte_carlo(n, resolution, seed),
    }
}

impl SphereGrid {
    /// Product grid on `S^2` with `resolution` Gauss–Legendre nodes in `z`
    /// (split into two panels at the equator) and `2·resolution` azimuths.
    pub fn product(resolution: usize) -> Result<Self> {
        Self::product_with_breaks(resolution, &[0.0])
    }

    /// Product grid whose `z`-quadrature is split into Gauss–Legendre panels
    /// at the given heights, so integrands with kinks along those latitudes
    /// keep spectral accuracy. `resolution` nodes are shared evenly between
    /// panels.
    pub fn product_with_breaks(resolution: usize, breaks: &[f64]) -> Result<Self> {
        if resolution < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} < 4"
            )));
        }
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|z| z.abs() < 1.0 - 1e-12)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut edges = vec![-1.0];
        edges.extend(cuts);
        edges.push(1.0);
        let panels = edges.len() - 1;
        let per_panel = resolution.div_ceil(panels).max(2);

        let mut zs = Vec::new();
        let mut wz = Vec::new();
        for p in edges.windows(2) {
            let (x, w) = gauss_legendre(per_panel, p[0], p[1]);
            zs.extend(x);
            wz.extend(w);
        }
        let azimuths = 2 * resolution;
        let dphi = TAU / azimuths as f64;
        let mut nodes = Vec::with_capacity(zs.len() * azimuths);
        let mut weights = Vec::with_capacity(zs.len() * azimuths);
        for (z, w) in zs.iter().zip(&wz) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..azimuths {
                let phi = (k as f64 + 0.5) * dphi;
                let (sp, cp) = phi.sin_cos();
                nodes.push(UnitVector::from_normalized(vec![s * cp, s * sp, *z]));
                weights.push(w * dphi);
            }
        }
        Ok(SphereGrid {
            dim: 3,
            nodes,
            weights,
            spacing: PI / resolution as f64,
            resolution,
        })
    }

    /// `count` uniform nodes on `S^{n-1}` from normalized Gaussian vectors,
    /// each weighted `|S^{n-1}| / count`.
    pub fn monte_carlo(n: usize, count: usize, seed: u64) -> Result<Self> {
        if count < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {count} < 4"
            )));
        }
        if n < 2 {
            return Err(Error::UnsupportedDimension {
                got: n,
                expected: ">= 2".into(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<UnitVector> = (0..count)
            .map(|_| loop {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                if let Ok(u) = UnitVector::new(v) {
                    break u;
                }
            })
            .collect();
        let area = sphere_surface_area(n);
        let w = area / count as f64;
        Ok(SphereGrid {
            dim: n,
            nodes,
            weights: vec![w; count],
            spacing: (area / count as f64).powf(1.0 / (n as f64 - 1.0)),
            resolution: count,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Characteristic angular distance between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_i f(x_i)`, evaluated in parallel and summed in index order so
    /// the result does not depend on the thread count.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&UnitVector) -> f64 + Sync,
    {
        let values: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(u, w)| w * f(u))
            .collect();
        values.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn surface_areas() {
        assert_abs_diff_eq!(sphere_surface_area(2), TAU, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_surface_area(3), 4.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(sphere_surface_area(4), 2.0 * PI * PI, epsilon = 1e-13);
        // 2π^{5/2}/Γ(5/2) = 8π²/3
        assert_abs_diff_eq!(sphere_surface_area(5), 8.0 * PI * PI / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn product_weights_sum_to_four_pi() {
        let g = sphere_grid(3, 64, GridKind::Product).unwrap();
        assert_abs_diff_eq!(g.total_weight(), 4.0 * PI, epsilon = 1e-10);
        assert!(g.weights().iter().all(|w| *w > 0.0));
    }

    #[test]
    fn product_grid_integrates_low_degree_exactly() {
        let g = sphere_grid(3, 64, GridKind::Product).unwrap();
        assert_abs_diff_eq!(g.integrate(|_| 1.0), 4.0 * PI, epsilon = 1e-10);
        assert_abs_diff_eq!(g.integrate(|u| u[2]), 0.0, epsilon = 1e-10);
        // ∫ x² = 4π/3, ∫ x⁴ = 4π/5, ∫ x²y²z² = 4π/105
        assert_abs_diff_eq!(
            g.integrate(|u| u[0] * u[0]),
            4.0 * PI / 3.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            g.integrate(|u| u[0].powi(4)),
            4.0 * PI / 5.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            g.integrate(|u| (u[0] * u[1] * u[2]).powi(2)),
            4.0 * PI / 105.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn product_grid_rejects_other_dimensions() {
        assert!(matches!(
            sphere_grid(4, 16, GridKind::Product),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(sphere_grid(3, 3, GridKind::Product).is_err());
    }

    #[test]
    fn breaks_keep_weights_exact() {
        let z = std::f64::consts::FRAC_1_SQRT_2;
        let g = SphereGrid::product_with_breaks(32, &[-z, 0.0, z]).unwrap();
        assert_abs_diff_eq!(g.total_weight(), 4.0 * PI, epsilon = 1e-12);
        // |z| integrates exactly once the kink is a panel edge: ∫|z| = 2π.
        assert_abs_diff_eq!(g.integrate(|u| u[2].abs()), TAU, epsilon = 1e-12);
    }

    #[test]
    fn monte_carlo_weights_are_exact_by_construction() {
        let g = sphere_grid(5, 10_000, GridKind::MonteCarlo { seed: 42 }).unwrap();
        assert_abs_diff_eq!(g.total_weight(), 8.0 * PI * PI / 3.0, epsilon = 1e-9);
        assert_eq!(g.len(), 10_000);
        let h = sphere_grid(5, 10_000, GridKind::MonteCarlo { seed: 42 }).unwrap();
        assert_eq!(g.nodes()[17], h.nodes()[17]);
    }
}
