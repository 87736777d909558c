//! Volume integrals over Gibbons-Hawking charts of fiber-invariant 4-forms.
//!
//! The integrand is the coefficient of `dx0∧dx1∧dx2∧dx3` in chart
//! coordinates; the fiber factor contributes `2π`. Base coordinates are
//! spherical about a point or prolate spheroidal about two foci on the
//! `x1` axis, the latter with `u = 1/μ` so the far field is compact.

use super::rules::{gauss_legendre, periodic, QuadratureSpec, Region};
use crate::error::{AleError, Result};
use crate::exterior_calculus::Point;
use crate::par;
use std::f64::consts::TAU;

/// Base coordinates for a volume rule. `multiplicity` converts the asymptotic
/// radius `r` of a [`Region`] into a base distance `ρ = r²/(2n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VolumeChart {
    Spherical {
        center: [f64; 3],
        multiplicity: u32,
    },
    Prolate {
        focus_a: f64,
        focus_b: f64,
        multiplicity: u32,
    },
}

impl VolumeChart {
    fn base_distance(&self, r: f64) -> f64 {
        let n = match self {
            VolumeChart::Spherical { multiplicity, .. }
            | VolumeChart::Prolate { multiplicity, .. } => *multiplicity,
        };
        r * r / (2.0 * n as f64)
    }
}

fn radial_range(chart: &VolumeChart, region: &Region) -> Result<(f64, f64)> {
    match *region {
        Region::Ball { r_out } => Ok((0.0, chart.base_distance(r_out))),
        Region::Annulus { r_in, r_out } if r_in < r_out => {
            Ok((chart.base_distance(r_in), chart.base_distance(r_out)))
        }
        _ => Err(AleError::InvalidConfig(format!(
            "region {region:?} is not a volume region"
        ))),
    }
}

/// Base nodes `(x, weight)` with weights including the euclidean `d³x` element.
pub fn base_nodes(
    chart: &VolumeChart,
    region: &Region,
    spec: &QuadratureSpec,
) -> Result<Vec<([f64; 3], f64)>> {
    spec.validate()?;
    let (lo, hi) = radial_range(chart, region)?;
    let angular = gauss_legendre(-1.0, 1.0, spec.sphere_order);
    let azimuth = periodic(spec.azimuth_nodes);
    let mut nodes = Vec::new();
    match *chart {
        VolumeChart::Spherical { center, .. } => {
            for &(rho, wr) in &gauss_legendre(lo, hi, spec.radial_nodes) {
                for &(c, wc) in &angular {
                    let s = (1.0 - c * c).sqrt();
                    for &(phi, wp) in &azimuth {
                        let x = [
                            center[0] + rho * c,
                            center[1] + rho * s * phi.cos(),
                            center[2] + rho * s * phi.sin(),
                        ];
                        nodes.push((x, wr * wc * wp * rho * rho));
                    }
                }
            }
        }
        VolumeChart::Prolate {
            focus_a, focus_b, ..
        } => {
            let mid = 0.5 * (focus_a + focus_b);
            let half = 0.5 * (focus_b - focus_a).abs();
            // Ellipsoid semi-major axis `half·μ` equals the base distance bound.
            let mu_hi = (hi / half).max(1.0);
            let mu_lo = (lo / half).max(1.0);
            for &(u, wu) in &gauss_legendre(1.0 / mu_hi, 1.0 / mu_lo, spec.radial_nodes) {
                let mu = 1.0 / u;
                let jac_mu = wu / (u * u);
                for &(nu, wn) in &angular {
                    let s = half * ((mu * mu - 1.0) * (1.0 - nu * nu)).sqrt();
                    let jac = half.powi(3) * (mu * mu - nu * nu);
                    for &(phi, wp) in &azimuth {
                        let x = [mid + half * mu * nu, s * phi.cos(), s * phi.sin()];
                        nodes.push((x, jac_mu * wn * wp * jac));
                    }
                }
            }
        }
    }
    Ok(nodes)
}

/// `2π ∫ density(x, 0) d³x` over the region.
pub fn integrate_volume<F>(
    density: &F,
    chart: &VolumeChart,
    region: &Region,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    let nodes = base_nodes(chart, region, spec)?;
    let total = par::try_sum(nodes.len(), |i| {
        let (x, w) = nodes[i];
        density(&[x[0], x[1], x[2], 0.0]).map(|v| w * v)
    })?;
    Ok(TAU * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gh_density(p: &Point) -> Result<f64> {
        // Single unit center at the origin: V = 1/(2ρ).
        let rho = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        Ok(0.5 / rho)
    }

    #[test]
    fn flat_ball_volume() {
        let chart = VolumeChart::Spherical {
            center: [0.0; 3],
            multiplicity: 1,
        };
        let v = integrate_volume(
            &gh_density,
            &chart,
            &Region::Ball { r_out: 1.0 },
            &QuadratureSpec::ball(1.0),
        )
        .unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn prolate_matches_spherical_on_gaussian() {
        let f = |p: &Point| Ok((-(p[0] - 0.3).powi(2) - p[1] * p[1] - 2.0 * p[2] * p[2]).exp());
        let r_out = 32f64.sqrt();
        let region = Region::Ball { r_out };
        let spec = QuadratureSpec {
            azimuth_nodes: 32,
            ..QuadratureSpec::ball(r_out)
        };
        let s = integrate_volume(
            &f,
            &VolumeChart::Spherical {
                center: [0.0; 3],
                multiplicity: 2,
            },
            &region,
            &spec,
        )
        .unwrap();
        let exact = TAU * PI.powf(1.5) / 2f64.sqrt();
        assert!((s - exact).abs() < 1e-8 * exact);
        let chart = VolumeChart::Prolate {
            focus_a: -1.0,
            focus_b: 0.5,
            multiplicity: 2,
        };
        let spec = QuadratureSpec {
            radial_nodes: 128,
            ..spec
        };
        let p = integrate_volume(&f, &chart, &region, &spec).unwrap();
        assert!((p - exact).abs() < 1e-6 * exact, "{p} vs {exact}");
    }

    #[test]
    fn linear_in_integrand() {
        let chart = VolumeChart::Spherical {
            center: [0.0; 3],
            multiplicity: 1,
        };
        let region = Region::Annulus {
            r_in: 0.5,
            r_out: 2.0,
        };
        let spec = QuadratureSpec::annulus(0.5, 2.0);
        let f = |p: &Point| Ok(p[0] * p[0] + 1.0);
        let g = |p: &Point| Ok(p[1].sin());
        let fg = |p: &Point| Ok(3.0 * (p[0] * p[0] + 1.0) - 2.0 * p[1].sin());
        let a = integrate_volume(&f, &chart, &region, &spec).unwrap();
        let b = integrate_volume(&g, &chart, &region, &spec).unwrap();
        let c = integrate_volume(&fg, &chart, &region, &spec).unwrap();
        assert!((c - (3.0 * a - 2.0 * b)).abs() < 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn rejects_surface_regions() {
        let chart = VolumeChart::Spherical {
            center: [0.0; 3],
            multiplicity: 1,
        };
        let f = |_: &Point| Ok(1.0);
        assert!(integrate_volume(&f, &chart, &Region::Sigma, &QuadratureSpec::ball(1.0)).is_err());
    }
}
