//! Σ-integration, sampling and residual checks for the GH geometry.

use super::config::GHConfig;
use super::geometry::{
    asymptotic_radius, distance_to_centers, eval_v, grad_v, j_dm, metric_components, metric_field,
    moment_map, rho_for_radius, triple_components, xi_at, ChartPoint, Patch,
};
use crate::error::{AleError, Result};
use crate::exterior_calculus::{Fd, Form, Mat4, MetricAt, MetricJet, Point};
use crate::fit::loglog_slope;
use crate::par;
use crate::quadrature::gauss_legendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Default Gauss-Legendre order on the segment under Σ.
pub const SIGMA_ORDER: usize = 32;

/// `∫_Σ f ω_1 = 2π ∫ f(x1) dx1` over the segment under Σ.
pub fn sigma_integrate<F>(cfg: &GHConfig, f: &F, order: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let (a, b) = cfg.sigma_segment()?;
    let nodes = gauss_legendre(a, b, order);
    let values: Vec<f64> = par::map(nodes.len(), |i| f(nodes[i].0));
    if let Some(node) = values.iter().position(|v| !v.is_finite()) {
        return Err(AleError::QuadratureDivergence {
            node: nodes[node].0,
        });
    }
    let weighted: Vec<f64> = values.iter().zip(&nodes).map(|(v, (_, w))| v * w).collect();
    Ok(TAU * par::pairwise_sum(&weighted))
}

/// Seeded points with base distance in `[rho_min, rho_max]`, at least
/// `clearance` from the centers and from the `x1` axis.
pub fn sample_points(
    cfg: &GHConfig,
    n: usize,
    seed: u64,
    rho_min: f64,
    rho_max: f64,
    clearance: f64,
) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let rho: f64 = rng.random_range(rho_min..=rho_max);
        let c: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        let s = (1.0 - c * c).sqrt();
        let x = [rho * c, rho * s * phi.cos(), rho * s * phi.sin()];
        if distance_to_centers(cfg, &x) < clearance
            || (x[1] * x[1] + x[2] * x[2]).sqrt() < clearance
        {
            continue;
        }
        let theta: f64 = rng.random_range(0.0..TAU);
        out.push(ChartPoint::new(x, theta, Patch::away_from(&x)));
    }
    out
}

/// Largest Ricci component from finite differences of the metric.
pub fn ricci_residual(cfg: &GHConfig, p: &ChartPoint, fd: &Fd) -> Result<f64> {
    let jet = MetricJet::from_field(fd, &metric_field(cfg, p.patch), &p.coords())?;
    Ok(jet.ricci().amax())
}

/// Largest component of `dω_i` over the three forms.
pub fn closedness_residual(cfg: &GHConfig, p: &ChartPoint, fd: &Fd) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..3 {
        let field = |q: &Point| Ok(triple_components(cfg, q, p.patch)?[i]);
        worst = worst.max(fd.d(&field, &p.coords())?.max_abs());
    }
    Ok(worst)
}

/// Largest component of `L_ξ g`.
pub fn killing_residual(cfg: &GHConfig, p: &ChartPoint, fd: &Fd) -> Result<f64> {
    let q = p.coords();
    let xi = xi_at(cfg, &q, p.patch)?;
    let g = metric_components(cfg, &q, p.patch)?;
    let dg: [Mat4; 4] = fd.gradient(&metric_field(cfg, p.patch), &q)?;
    let xi_field = |r: &Point| xi_at(cfg, r, p.patch);
    let dxi: [[f64; 4]; 4] = fd.gradient(&xi_field, &q)?;
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            let mut l = 0.0;
            for c in 0..4 {
                l += xi[c] * dg[c][(a, b)] + g[(c, b)] * dxi[a][c] + g[(a, c)] * dxi[b][c];
            }
            worst = worst.max(l.abs());
        }
    }
    Ok(worst)
}

/// `max |½ d(J_i dm) − ω_i|` for the 0-based form index `i`.
pub fn potential_residual(cfg: &GHConfig, p: &ChartPoint, fd: &Fd, i: usize) -> Result<f64> {
    let q = p.coords();
    let field = |r: &Point| j_dm(cfg, r, p.patch, i);
    let dj = fd.d(&field, &q)?;
    Ok((dj * 0.5 - triple_components(cfg, &q, p.patch)?[i]).max_abs())
}

/// Largest component of `dA − *dV` on the base.
pub fn eta_curl_residual(cfg: &GHConfig, x: &[f64; 3], patch: Patch, fd: &Fd) -> Result<f64> {
    let a = |q: &Point| {
        let c = super::geometry::eval_eta(cfg, &ChartPoint::new([q[0], q[1], q[2]], 0.0, patch))?;
        Ok(Form::covector([c[0], c[1], c[2], 0.0]))
    };
    let p = [x[0], x[1], x[2], 0.0];
    let da = fd.d(&a, &p)?;
    let gv = grad_v(cfg, x)?;
    let star_dv = Form::two(&[(1, 2, gv[0]), (2, 0, gv[1]), (0, 1, gv[2])]);
    Ok((da - star_dv).max_abs())
}

/// Euclidean Laplacian of `V` on the base.
pub fn v_laplacian(cfg: &GHConfig, x: &[f64; 3], fd: &Fd) -> Result<f64> {
    let v = |q: &Point| eval_v(cfg, &[q[0], q[1], q[2]]);
    let p = [x[0], x[1], x[2], 0.0];
    let mut s = 0.0;
    for i in 0..3 {
        s += fd.second(&v, &p, i, i)?;
    }
    Ok(s)
}

/// `∮ η` around the circle of the given radius about the `x1` axis at `x1`.
pub fn linking_holonomy(
    cfg: &GHConfig,
    x1: f64,
    radius: f64,
    patch: Patch,
    nodes: usize,
) -> Result<f64> {
    let step = TAU / nodes as f64;
    let mut terms = Vec::with_capacity(nodes);
    for n in 0..nodes {
        let phi = n as f64 * step;
        let x = [x1, radius * phi.cos(), radius * phi.sin()];
        let a = super::geometry::eval_eta(cfg, &ChartPoint::new(x, 0.0, patch))?;
        let tangent = [0.0, -radius * phi.sin(), radius * phi.cos()];
        terms.push(step * (a[0] * tangent[0] + a[1] * tangent[1] + a[2] * tangent[2]));
    }
    Ok(par::pairwise_sum(&terms))
}

/// Directions on the sphere used by decay fits, kept off the `x1` axis.
fn decay_directions() -> Vec<[f64; 3]> {
    let mut dirs = Vec::new();
    for c in [-0.8, -0.4, 0.0, 0.4, 0.8] {
        let s = (1.0f64 - c * c).sqrt();
        for n in 0..4 {
            let phi = 0.3 + n as f64 * TAU / 4.0;
            dirs.push([c, s * phi.cos(), s * phi.sin()]);
        }
    }
    dirs
}

/// Largest orthonormal-frame deviation of the metric from the flat model at
/// asymptotic radius `r`.
pub fn metric_deviation(cfg: &GHConfig, r: f64) -> Result<f64> {
    let model = cfg.asymptotic_model();
    let rho = rho_for_radius(cfg, r);
    let mut worst = 0.0f64;
    for d in decay_directions() {
        let p = [rho * d[0], rho * d[1], rho * d[2], 0.3];
        let patch = Patch::away_from(&[p[0], p[1], p[2]]);
        let g = metric_components(cfg, &p, patch)?;
        let g0 = MetricAt::new(metric_components(&model, &p, patch)?)?;
        let e = g0.coframe().try_inverse().ok_or(AleError::SingularMetric)?;
        let dev = e.transpose() * (g - g0.g) * e;
        worst = worst.max(dev.amax());
    }
    Ok(worst)
}

/// Fitted exponent of `|g − euc|` against `r`.
pub fn metric_decay_slope(cfg: &GHConfig, radii: &[f64]) -> Result<f64> {
    let devs = radii
        .iter()
        .map(|&r| metric_deviation(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    loglog_slope(radii, &devs)
}

/// Largest `|m − r²/2|` over the sphere of asymptotic radius `r`.
pub fn moment_deviation(cfg: &GHConfig, r: f64) -> f64 {
    let rho = rho_for_radius(cfg, r);
    decay_directions()
        .iter()
        .map(|d| {
            let x = [rho * d[0], rho * d[1], rho * d[2]];
            (moment_map(cfg, &x) - 0.5 * asymptotic_radius(cfg, &x).powi(2)).abs()
        })
        .fold(0.0, f64::max)
}

/// Fitted exponent of `|m − r²/2|` against `r`.
pub fn moment_decay_slope(cfg: &GHConfig, radii: &[f64]) -> Result<f64> {
    let devs: Vec<f64> = radii.iter().map(|&r| moment_deviation(cfg, r)).collect();
    loglog_slope(radii, &devs)
}
