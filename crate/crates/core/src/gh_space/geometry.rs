//! Potential, connection, metric and hyperkähler triple in chart
//! coordinates `(x1, x2, x3, θ)` with `θ` of period 2π.

use super::config::GHConfig;
use crate::error::{AleError, Result};
use crate::exterior_calculus::{Form, Mat4, MetricAt, Point, TripleAt};
use serde::{Deserialize, Serialize};

/// Gauge patch for the connection 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Patch {
    /// Strings along the rays `x1 < c1` from each center.
    North,
    /// Strings along the rays `x1 > c1` from each center.
    South,
}

impl Patch {
    pub fn name(self) -> &'static str {
        match self {
            Patch::North => "north",
            Patch::South => "south",
        }
    }

    /// Patch whose strings point away from `x`.
    pub fn away_from(x: &[f64; 3]) -> Patch {
        if x[0] >= 0.0 {
            Patch::North
        } else {
            Patch::South
        }
    }
}

/// A point of the circle bundle in a gauge patch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub base: [f64; 3],
    pub fiber_angle: f64,
    pub patch: Patch,
}

impl ChartPoint {
    pub fn new(base: [f64; 3], fiber_angle: f64, patch: Patch) -> Self {
        ChartPoint {
            base,
            fiber_angle,
            patch,
        }
    }

    /// Chart coordinates `(x1, x2, x3, θ)`.
    pub fn coords(&self) -> Point {
        [self.base[0], self.base[1], self.base[2], self.fiber_angle]
    }
}

fn base_of(p: &Point) -> [f64; 3] {
    [p[0], p[1], p[2]]
}

fn check_centers(cfg: &GHConfig, x: &[f64; 3]) -> Result<()> {
    for (index, c) in cfg.centers.iter().enumerate() {
        let d = dist(x, &c.position);
        if d < cfg.eps_center {
            return Err(AleError::CenterTooClose {
                index,
                distance: d,
                eps: cfg.eps_center,
            });
        }
    }
    Ok(())
}

fn dist(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

/// Harmonic potential `V = ½ Σ q_j / |x − p_j|`.
pub fn eval_v(cfg: &GHConfig, x: &[f64; 3]) -> Result<f64> {
    check_centers(cfg, x)?;
    Ok(cfg
        .centers
        .iter()
        .map(|c| 0.5 * c.multiplicity as f64 / dist(x, &c.position))
        .sum())
}

/// Euclidean gradient of `V`.
pub fn grad_v(cfg: &GHConfig, x: &[f64; 3]) -> Result<[f64; 3]> {
    check_centers(cfg, x)?;
    let mut g = [0.0; 3];
    for c in &cfg.centers {
        let r = dist(x, &c.position);
        let f = -0.5 * c.multiplicity as f64 / (r * r * r);
        for i in 0..3 {
            g[i] += f * (x[i] - c.position[i]);
        }
    }
    Ok(g)
}

/// Spatial connection coefficients `A` with `η = dθ + A` in the given patch.
pub fn eval_eta(cfg: &GHConfig, p: &ChartPoint) -> Result<[f64; 3]> {
    connection_coeffs(cfg, &p.base, p.patch)
}

fn connection_coeffs(cfg: &GHConfig, x: &[f64; 3], patch: Patch) -> Result<[f64; 3]> {
    check_centers(cfg, x)?;
    let mut a = [0.0; 3];
    for (index, c) in cfg.centers.iter().enumerate() {
        let q = c.multiplicity as f64;
        let along = x[0] - c.position[0];
        let y = x[1] - c.position[1];
        let z = x[2] - c.position[2];
        let s2 = y * y + z * z;
        let rho = (along * along + s2).sqrt();
        let on_string = s2.sqrt() < cfg.eps_string;
        // (ρ ± x) evaluated without cancellation.
        let (denominator, sign) = match patch {
            Patch::North => {
                if on_string && along < 0.0 {
                    return Err(AleError::OnDiracString {
                        index,
                        patch: patch.name(),
                    });
                }
                (
                    if along >= 0.0 {
                        rho + along
                    } else {
                        s2 / (rho - along)
                    },
                    -1.0,
                )
            }
            Patch::South => {
                if on_string && along > 0.0 {
                    return Err(AleError::OnDiracString {
                        index,
                        patch: patch.name(),
                    });
                }
                (
                    if along <= 0.0 {
                        rho - along
                    } else {
                        s2 / (rho + along)
                    },
                    1.0,
                )
            }
        };
        let f = sign * 0.5 * q / (rho * denominator);
        a[1] -= f * z;
        a[2] += f * y;
    }
    Ok(a)
}

/// Multiplicity-weighted azimuthal winding: `A_north − A_south = −Σ q_j dφ_j`.
pub fn patch_shift(cfg: &GHConfig, x: &[f64; 3]) -> Result<[f64; 3]> {
    let n = connection_coeffs(cfg, x, Patch::North)?;
    let s = connection_coeffs(cfg, x, Patch::South)?;
    Ok([n[0] - s[0], n[1] - s[1], n[2] - s[2]])
}

/// Metric components in chart coordinates.
pub fn metric_components(cfg: &GHConfig, p: &Point, patch: Patch) -> Result<Mat4> {
    let x = base_of(p);
    let v = eval_v(cfg, &x)?;
    let a = connection_coeffs(cfg, &x, patch)?;
    let mut g = Mat4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            g[(i, j)] = a[i] * a[j] / v + if i == j { v } else { 0.0 };
        }
        g[(i, 3)] = a[i] / v;
        g[(3, i)] = a[i] / v;
    }
    g[(3, 3)] = 1.0 / v;
    Ok(g)
}

/// Hyperkähler triple `ω_i = dx^i ∧ η + V dx^j ∧ dx^k` for cyclic `(i, j, k)`.
pub fn triple_components(cfg: &GHConfig, p: &Point, patch: Patch) -> Result<[Form; 3]> {
    let x = base_of(p);
    let v = eval_v(cfg, &x)?;
    let a = connection_coeffs(cfg, &x, patch)?;
    Ok(std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut w = Form::zero(2);
        w.add2(i, 3, 1.0);
        for (m, am) in a.iter().enumerate() {
            w.add2(i, m, *am);
        }
        w.add2(j, k, v);
        w
    }))
}

/// Metric and triple as a chart field, for finite differences.
pub fn triple_field(
    cfg: &GHConfig,
    patch: Patch,
) -> impl Fn(&Point) -> Result<TripleAt> + Sync + '_ {
    move |p: &Point| {
        Ok((
            MetricAt::new(metric_components(cfg, p, patch)?)?,
            triple_components(cfg, p, patch)?,
        ))
    }
}

/// Metric as a chart field.
pub fn metric_field(cfg: &GHConfig, patch: Patch) -> impl Fn(&Point) -> Result<Mat4> + Sync + '_ {
    move |p: &Point| metric_components(cfg, p, patch)
}

/// Frame data at a point.
#[derive(Clone, Debug)]
pub struct FrameSample {
    pub point: ChartPoint,
    /// Row `a` holds the chart components of `e^a`; `e^0 = V^{-1/2} η`, `e^i = V^{1/2} dx^i`.
    pub coframe: Mat4,
    pub metric: Mat4,
    pub triple: [Form; 3],
    /// Complex structures acting on tangent vectors, `ω_i(X, Y) = g(J_i X, Y)`.
    pub j: [Mat4; 3],
}

impl FrameSample {
    pub fn metric_at(&self) -> Result<MetricAt> {
        MetricAt::new(self.metric)
    }
}

/// Metric, coframe, triple and complex structures at a point.
pub fn metric_at(cfg: &GHConfig, p: &ChartPoint) -> Result<FrameSample> {
    let q = p.coords();
    let v = eval_v(cfg, &p.base)?;
    let a = eval_eta(cfg, p)?;
    let metric = metric_components(cfg, &q, p.patch)?;
    let triple = triple_components(cfg, &q, p.patch)?;
    let m = MetricAt::new(metric)?;
    let mut coframe = Mat4::zeros();
    let root = v.sqrt();
    for i in 0..3 {
        coframe[(0, i)] = a[i] / root;
        coframe[(i + 1, i)] = root;
    }
    coframe[(0, 3)] = 1.0 / root;
    let j = std::array::from_fn(|i| m.complex_structure(&triple[i]));
    Ok(FrameSample {
        point: *p,
        coframe,
        metric,
        triple,
        j,
    })
}

/// Moment map `m = Σ q_j |x − p_j|` of the circle action for `ω_1`.
pub fn moment_map(cfg: &GHConfig, x: &[f64; 3]) -> f64 {
    cfg.centers
        .iter()
        .map(|c| c.multiplicity as f64 * dist(x, &c.position))
        .sum()
}

/// Differential of the moment map as a chart covector.
pub fn moment_differential(cfg: &GHConfig, x: &[f64; 3]) -> Result<Form> {
    check_centers(cfg, x)?;
    let mut d = [0.0; 4];
    for c in &cfg.centers {
        let r = dist(x, &c.position);
        for i in 0..3 {
            d[i] += c.multiplicity as f64 * (x[i] - c.position[i]) / r;
        }
    }
    Ok(Form::covector(d))
}

/// `J_i dm` at a chart point.
pub fn j_dm(cfg: &GHConfig, p: &Point, patch: Patch, i: usize) -> Result<Form> {
    let m = MetricAt::new(metric_components(cfg, p, patch)?)?;
    let t = triple_components(cfg, p, patch)?;
    Ok(moment_differential(cfg, &base_of(p))?.map_covector(&m.j_covector(&t[i])))
}

/// Generator `ξ = (J_1 dm)♯` of the circle action.
pub fn xi_field(cfg: &GHConfig, p: &ChartPoint) -> Result<[f64; 4]> {
    xi_at(cfg, &p.coords(), p.patch)
}

pub(crate) fn xi_at(cfg: &GHConfig, p: &Point, patch: Patch) -> Result<[f64; 4]> {
    let m = MetricAt::new(metric_components(cfg, p, patch)?)?;
    Ok(m.sharp(&j_dm(cfg, p, patch, 0)?))
}

/// Euclidean distance from `x` to the nearest center.
pub fn distance_to_centers(cfg: &GHConfig, x: &[f64; 3]) -> f64 {
    cfg.centers
        .iter()
        .map(|c| dist(x, &c.position))
        .fold(f64::INFINITY, f64::min)
}

/// `r = √(2 n ρ)` with `n` the total multiplicity and `ρ = |x|`.
pub fn asymptotic_radius(cfg: &GHConfig, x: &[f64; 3]) -> f64 {
    let rho = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    (2.0 * cfg.total_multiplicity() as f64 * rho).sqrt()
}

/// Base-point distance `ρ` for an asymptotic radius `r`.
pub fn rho_for_radius(cfg: &GHConfig, r: f64) -> f64 {
    r * r / (2.0 * cfg.total_multiplicity() as f64)
}
