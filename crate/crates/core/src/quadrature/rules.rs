use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
///
/// An `n`-node rule integrates polynomials of degree `≤ 2n − 1` exactly.
pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("at least one node");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs
}

/// Equal-weight periodic rule on `[0, 2π)`, exact for trigonometric
/// polynomials of degree `< n`.
pub fn periodic(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0);
    let w = std::f64::consts::TAU / n as f64;
    (0..n).map(|i| (i as f64 * w, w)).collect()
}

/// Region of a volume or sphere integral. Radii are asymptotic radii
/// `r = √(2nρ)` on Gibbons-Hawking charts and euclidean radii on R⁴.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Region {
    Sphere { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    Ball { r_out: f64 },
    Sigma,
}

/// Node counts for the product rules.
///
/// `sphere_order` Gauss-Legendre nodes in each non-periodic angular factor
/// (periodic factors use `2·sphere_order` equal-weight nodes), `radial_nodes`
/// in the radial factor, `azimuth_nodes` around the symmetry axis of volume
/// charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub sphere_order: usize,
    pub radial_nodes: usize,
    pub azimuth_nodes: usize,
    pub region: Region,
}

impl QuadratureSpec {
    pub const MIN_ORDER: usize = 4;

    pub fn sphere(radius: f64) -> Self {
        QuadratureSpec {
            sphere_order: 16,
            radial_nodes: 16,
            azimuth_nodes: 8,
            region: Region::Sphere { radius },
        }
    }

    pub fn ball(r_out: f64) -> Self {
        QuadratureSpec {
            sphere_order: 64,
            radial_nodes: 64,
            azimuth_nodes: 4,
            region: Region::Ball { r_out },
        }
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Self {
        QuadratureSpec {
            region: Region::Annulus { r_in, r_out },
            ..QuadratureSpec::ball(r_out)
        }
    }

    pub fn sigma(order: usize) -> Self {
        QuadratureSpec {
            sphere_order: order,
            radial_nodes: order,
            azimuth_nodes: 1,
            region: Region::Sigma,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.sphere_order < Self::MIN_ORDER
            || self.radial_nodes < Self::MIN_ORDER
            || self.azimuth_nodes == 0
        {
            return Err(crate::AleError::InvalidConfig(format!(
                "quadrature orders must be at least {}",
                Self::MIN_ORDER
            )));
        }
        Ok(())
    }
}
