//! The L² harmonic 2-form of the A_k instanton.
//!
//! `Ω = c (df∧η − V *₃df)` with `f = V₀/V`, where `V₀` is the potential of
//! the multiplicity-one center alone. `Ω` is closed and anti-self-dual;
//! `c` is fixed by `∫_Σ Ω = 2π[Σ]²`, `[Σ]² = −(k+1)/k`.

use crate::error::{AleError, Result};
use crate::exterior_calculus::{Fd, Form, Mat4, MetricAt, Point};
use crate::fit::least_squares;
use crate::gh_space::{
    self, eval_eta, eval_v, grad_v, j_dm, metric_components, rho_for_radius, sigma_integrate,
    triple_components, ChartPoint, GHConfig, Patch, SIGMA_ORDER,
};
use crate::quadrature::{integrate_volume, QuadratureSpec, Region, VolumeChart};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// The harmonic form of a two-cluster configuration with its normalization.
#[derive(Clone, Debug)]
pub struct HarmonicFormBundle {
    pub config: GHConfig,
    pub normalization: f64,
    pub sigma_self_intersection: f64,
}

fn n_total(cfg: &GHConfig) -> f64 {
    cfg.total_multiplicity() as f64
}

/// `f = V₀/V` and its base gradient.
fn ratio_and_gradient(cfg: &GHConfig, x: &[f64; 3]) -> Result<(f64, [f64; 3])> {
    let v = eval_v(cfg, x)?;
    let gv = grad_v(cfg, x)?;
    let p0 = cfg.centers[0].position;
    let d = [x[0] - p0[0], x[1] - p0[1], x[2] - p0[2]];
    let r0 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let v0 = 0.5 / r0;
    let f = v0 / v;
    let grad = std::array::from_fn(|i| {
        let gv0 = -0.5 * d[i] / (r0 * r0 * r0);
        (gv0 * v - v0 * gv[i]) / (v * v)
    });
    Ok((f, grad))
}

/// Unnormalized `df∧η − V *₃df` in chart components.
fn raw_omega(cfg: &GHConfig, p: &Point, patch: Patch) -> Result<Form> {
    let x = [p[0], p[1], p[2]];
    let (_, df) = ratio_and_gradient(cfg, &x)?;
    let v = eval_v(cfg, &x)?;
    let a = eval_eta(cfg, &ChartPoint::new(x, p[3], patch))?;
    let df_form = Form::covector([df[0], df[1], df[2], 0.0]);
    let eta = Form::covector([a[0], a[1], a[2], 1.0]);
    let star = Form::two(&[(1, 2, df[0]), (2, 0, df[1]), (0, 1, df[2])]);
    Ok(df_form.wedge(&eta) - star * v)
}

/// `∂_{x1} f` on the axis, the density of the raw form on Σ.
fn sigma_density(cfg: &GHConfig, x1: f64) -> f64 {
    ratio_and_gradient(cfg, &[x1, 0.0, 0.0])
        .map(|(_, g)| g[0])
        .unwrap_or(f64::NAN)
}

/// Normalized harmonic form on a two-cluster configuration.
pub fn build_omega(cfg: &GHConfig) -> Result<HarmonicFormBundle> {
    cfg.sigma_segment()?;
    let k = cfg.k as f64;
    let self_intersection = -(k + 1.0) / k;
    let raw = sigma_integrate(cfg, &|x| sigma_density(cfg, x), SIGMA_ORDER)?;
    if !(raw.abs() > 1e-12) {
        return Err(AleError::NormalizationFailure { value: raw });
    }
    Ok(HarmonicFormBundle {
        config: cfg.clone(),
        normalization: TAU * self_intersection / raw,
        sigma_self_intersection: self_intersection,
    })
}

impl HarmonicFormBundle {
    /// `Ω` in chart components.
    pub fn omega_at(&self, p: &Point, patch: Patch) -> Result<Form> {
        Ok(raw_omega(&self.config, p, patch)? * self.normalization)
    }

    /// `∫_Σ Ω` by quadrature.
    pub fn sigma_integral(&self) -> Result<f64> {
        let raw = sigma_integrate(
            &self.config,
            &|x| sigma_density(&self.config, x),
            SIGMA_ORDER,
        )?;
        Ok(self.normalization * raw)
    }

    /// `c_Γ = (k+1) VolΣ/2π`.
    pub fn c_gamma(&self) -> f64 {
        n_total(&self.config) * n_total(&self.config) * self.config.lambda
    }

    /// Default outer radius `40 (k+1) λ` of the norm quadrature.
    pub fn default_outer_radius(&self) -> f64 {
        40.0 * n_total(&self.config) * self.config.lambda
    }
}

/// `‖Ω‖²` from a ball quadrature plus the analytic tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub ball: f64,
    pub tail: f64,
    pub tail_fraction: f64,
    pub r_out: f64,
}

/// Maximum allowed tail fraction.
pub const MAX_TAIL_FRACTION: f64 = 0.1;

/// `∫ −Ω∧Ω` over the ball of asymptotic radius `r_out` with the leading-profile tail.
pub fn omega_norm_with(
    bundle: &HarmonicFormBundle,
    r_out: f64,
    spec: &QuadratureSpec,
) -> Result<NormReport> {
    let cfg = &bundle.config;
    let (a, b) = cfg.sigma_segment()?;
    let chart = VolumeChart::Prolate {
        focus_a: a,
        focus_b: b,
        multiplicity: cfg.total_multiplicity(),
    };
    let density = |p: &Point| {
        let patch = Patch::away_from(&[p[0], p[1], p[2]]);
        let w = bundle.omega_at(p, patch)?;
        Ok(-w.wedge(&w)[15])
    };
    let ball = integrate_volume(&density, &chart, &Region::Ball { r_out }, spec)?;
    let n = n_total(cfg);
    let tail = 16.0 * PI * PI * bundle.c_gamma().powi(2) / (n * r_out.powi(4));
    let value = ball + tail;
    let tail_fraction = tail / value;
    if !(tail_fraction <= MAX_TAIL_FRACTION) {
        return Err(AleError::TailDominance {
            fraction: tail_fraction,
        });
    }
    Ok(NormReport {
        value,
        ball,
        tail,
        tail_fraction,
        r_out,
    })
}

/// [`omega_norm_with`] at the default radius and node counts.
pub fn omega_norm(bundle: &HarmonicFormBundle) -> Result<NormReport> {
    let r_out = bundle.default_outer_radius();
    omega_norm_with(bundle, r_out, &QuadratureSpec::ball(r_out))
}

/// `s = ∫_Σ ω_1 / ∫_Σ Ω`.
pub fn s_ratio(bundle: &HarmonicFormBundle) -> Result<f64> {
    let vol = sigma_integrate(&bundle.config, &|_| 1.0, SIGMA_ORDER)?;
    Ok(vol / bundle.sigma_integral()?)
}

/// Orthonormal-frame components of a 2-form.
pub fn frame_components(metric: &MetricAt, w: &Form) -> Mat4 {
    let inv = metric
        .coframe()
        .try_inverse()
        .expect("coframe of a positive metric is invertible");
    inv.transpose() * w.to_matrix() * inv
}

/// Largest residuals of the `α = −½ dd^C m` decomposition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlphaSplitReport {
    /// `max |α⁺ + ω_1|`.
    pub plus: f64,
    /// `max |α⁻ − sΩ|`.
    pub minus: f64,
    /// `max |dα⁻|`.
    pub closed: f64,
    pub s: f64,
}

fn alpha_at(cfg: &GHConfig, fd: &Fd, p: &Point, patch: Patch) -> Result<Form> {
    let jdm = |q: &Point| j_dm(cfg, q, patch, 0);
    Ok(fd.d(&jdm, p)? * -0.5)
}

/// Checks `α⁺ = −ω_1` and `α⁻ = sΩ` at the given points.
pub fn alpha_split_check(
    bundle: &HarmonicFormBundle,
    points: &[ChartPoint],
    fd: &Fd,
) -> Result<AlphaSplitReport> {
    let cfg = &bundle.config;
    let s = s_ratio(bundle)?;
    let mut rep = AlphaSplitReport {
        s,
        ..Default::default()
    };
    for p in points {
        let q = p.coords();
        let metric = MetricAt::new(metric_components(cfg, &q, p.patch)?)?;
        let alpha = alpha_at(cfg, fd, &q, p.patch)?;
        let (plus, minus) = metric.split_sd(&alpha);
        let w1 = triple_components(cfg, &q, p.patch)?[0];
        rep.plus = rep.plus.max((plus + w1).max_abs());
        rep.minus = rep
            .minus
            .max((minus - bundle.omega_at(&q, p.patch)? * s).max_abs());
        let minus_field = |r: &Point| {
            let m = MetricAt::new(metric_components(cfg, r, p.patch)?)?;
            Ok(m.split_sd(&alpha_at(cfg, fd, r, p.patch)?).1)
        };
        let outer = Fd::new(10.0 * fd.h);
        rep.closed = rep.closed.max(outer.d(&minus_field, &q)?.max_abs());
    }
    Ok(rep)
}

/// Largest `|dΩ|` and `|*Ω + Ω|` at the given points.
pub fn omega_residuals(
    bundle: &HarmonicFormBundle,
    points: &[ChartPoint],
    fd: &Fd,
) -> Result<(f64, f64)> {
    let cfg = &bundle.config;
    let (mut closed, mut asd) = (0.0f64, 0.0f64);
    for p in points {
        let q = p.coords();
        let field = |r: &Point| bundle.omega_at(r, p.patch);
        closed = closed.max(fd.d(&field, &q)?.max_abs());
        let metric = MetricAt::new(metric_components(cfg, &q, p.patch)?)?;
        let w = bundle.omega_at(&q, p.patch)?;
        asd = asd.max((metric.hodge(&w) + w).max_abs());
    }
    Ok((closed, asd))
}

/// `dd^C h = d(J_1 dh)` for a base function given with its gradient.
fn ddc<G>(cfg: &GHConfig, grad: &G, p: &Point, patch: Patch, fd: &Fd) -> Result<Form>
where
    G: Fn(&[f64; 3]) -> [f64; 3],
{
    let jdh = |q: &Point| {
        let m = MetricAt::new(metric_components(cfg, q, patch)?)?;
        let t = triple_components(cfg, q, patch)?;
        let g = grad(&[q[0], q[1], q[2]]);
        Ok(Form::covector([g[0], g[1], g[2], 0.0]).map_covector(&m.j_covector(&t[0])))
    };
    fd.d(&jdh, p)
}

/// Directions used by the far-field fits.
fn far_directions() -> Vec<[f64; 3]> {
    let mut dirs = Vec::new();
    for c in [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9] {
        let s = (1.0f64 - c * c).sqrt();
        for n in 0..3 {
            let phi = 0.2 + n as f64 * TAU / 3.0;
            dirs.push([c, s * phi.cos(), s * phi.sin()]);
        }
    }
    dirs
}

/// `dr` and `J_i dr` at a chart point, with `r = √(2nρ)`.
fn radial_frame(cfg: &GHConfig, p: &Point, patch: Patch) -> Result<(MetricAt, Form, [Form; 3])> {
    let metric = MetricAt::new(metric_components(cfg, p, patch)?)?;
    let t = triple_components(cfg, p, patch)?;
    let rho = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let r = (2.0 * n_total(cfg) * rho).sqrt();
    let scale = n_total(cfg) / (r * rho);
    let dr = Form::covector([scale * p[0], scale * p[1], scale * p[2], 0.0]);
    let j = std::array::from_fn(|i| dr.map_covector(&metric.j_covector(&t[i])));
    Ok((metric, dr, j))
}

/// Leading far-field profile `dr∧J_1dr − J_2dr∧J_3dr`.
pub fn leading_profile(cfg: &GHConfig, p: &Point, patch: Patch) -> Result<Form> {
    let (_, dr, j) = radial_frame(cfg, p, patch)?;
    Ok(dr.wedge(&j[0]) - j[1].wedge(&j[2]))
}

/// Largest frame-component deviation of `r⁴Ω` from `4c_Γ` times the
/// leading profile on the sphere of asymptotic radius `r`, relative to the
/// largest profile component.
pub fn leading_profile_error(bundle: &HarmonicFormBundle, r: f64) -> Result<f64> {
    let cfg = &bundle.config;
    let rho = rho_for_radius(cfg, r);
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for d in far_directions() {
        let p = [rho * d[0], rho * d[1], rho * d[2], 0.4];
        let patch = Patch::away_from(&[p[0], p[1], p[2]]);
        let metric = MetricAt::new(metric_components(cfg, &p, patch)?)?;
        let model = frame_components(
            &metric,
            &(leading_profile(cfg, &p, patch)? * (4.0 * bundle.c_gamma())),
        );
        let got = frame_components(&metric, &(bundle.omega_at(&p, patch)? * r.powi(4)));
        err = err.max((got - model).amax());
        scale = scale.max(model.amax());
    }
    Ok(err / scale)
}

/// Single-radius estimate of `c_Γ`: the least-squares multiple of
/// `4 × profile` closest to `r⁴Ω` over the sphere of asymptotic radius `r`.
pub fn c_gamma_estimate(bundle: &HarmonicFormBundle, r: f64) -> Result<f64> {
    let cfg = &bundle.config;
    let rho = rho_for_radius(cfg, r);
    let (mut num, mut den) = (0.0, 0.0);
    for d in far_directions() {
        let p = [rho * d[0], rho * d[1], rho * d[2], 0.4];
        let patch = Patch::away_from(&[p[0], p[1], p[2]]);
        let metric = MetricAt::new(metric_components(cfg, &p, patch)?)?;
        let model = frame_components(&metric, &(leading_profile(cfg, &p, patch)? * 4.0));
        let got = frame_components(&metric, &(bundle.omega_at(&p, patch)? * r.powi(4)));
        num += got.dot(&model);
        den += model.dot(&model);
    }
    Ok(num / den)
}

/// Far-field fit of `Ω ≈ dd^C(c_Γ/r² + a₁ q₁/r⁶ + a₂ P₂/ρ³)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub c_gamma: f64,
    pub a1: f64,
    /// `a₁ / (VolΣ/2π)²`.
    pub a1_normalized: f64,
    pub metric_exponent: f64,
    pub condition: f64,
    pub radii: Vec<f64>,
}

/// Fits the potential coefficients from samples of `Ω` on spheres of the given radii.
pub fn asymptotic_fit(bundle: &HarmonicFormBundle, radii: &[f64]) -> Result<AsymptoticFit> {
    let cfg = &bundle.config;
    let n = n_total(cfg);
    let min_r = 20.0 * n * cfg.lambda;
    if radii.len() < 2 || radii.iter().any(|&r| r < min_r * (1.0 - 1e-12)) {
        return Err(AleError::InvalidConfig(format!(
            "fit radii must be at least {min_r} and number two or more"
        )));
    }
    // 1/r² = 1/(2nρ); q₁/r⁶ = x1/(4n²ρ³); the quadrupole absorbs the next multipole.
    let basis: [Box<dyn Fn(&[f64; 3]) -> [f64; 3]>; 3] = [
        Box::new(move |x| {
            let rho2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let c = -1.0 / (2.0 * n * rho2 * rho2.sqrt());
            [c * x[0], c * x[1], c * x[2]]
        }),
        Box::new(move |x| {
            let rho2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let rho3 = rho2 * rho2.sqrt();
            let c = 1.0 / (4.0 * n * n);
            std::array::from_fn(|i| {
                let delta = if i == 0 { 1.0 } else { 0.0 };
                c * (delta / rho3 - 3.0 * x[0] * x[i] / (rho3 * rho2))
            })
        }),
        Box::new(move |x| {
            // P₂(cos)/ρ³ = (3x1² − ρ²)/(2ρ⁵)
            let rho2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let rho5 = rho2 * rho2 * rho2.sqrt();
            let num = 3.0 * x[0] * x[0] - rho2;
            let g = |i: usize| {
                let dnum = if i == 0 { 4.0 * x[0] } else { -2.0 * x[i] };
                0.5 * (dnum / rho5 - 5.0 * num * x[i] / (rho5 * rho2))
            };
            [g(0), g(1), g(2)]
        }),
    ];
    let mut rows: Vec<[f64; 3]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for &r in radii {
        let rho = rho_for_radius(cfg, r);
        let fd = Fd::new(1e-3 * rho);
        for d in far_directions() {
            let p = [rho * d[0], rho * d[1], rho * d[2], 0.4];
            let patch = Patch::away_from(&[p[0], p[1], p[2]]);
            let metric = MetricAt::new(metric_components(cfg, &p, patch)?)?;
            let target = frame_components(&metric, &bundle.omega_at(&p, patch)?);
            let cols = basis
                .iter()
                .map(|b| ddc(cfg, b, &p, patch, &fd).map(|f| frame_components(&metric, &f)))
                .collect::<Result<Vec<_>>>()?;
            // Weight each sample by r⁴ so all radii contribute comparably.
            let w = r.powi(4);
            for a in 0..4 {
                for b in (a + 1)..4 {
                    rows.push([
                        w * cols[0][(a, b)],
                        w * cols[1][(a, b)],
                        w * cols[2][(a, b)],
                    ]);
                    rhs.push(w * target[(a, b)]);
                }
            }
        }
    }
    let a = DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    // Column scaling keeps the condition number meaningful.
    let norms: Vec<f64> = (0..3).map(|j| a.column(j).norm()).collect();
    let scaled = DMatrix::from_fn(a.nrows(), 3, |i, j| a[(i, j)] / norms[j]);
    let (c, condition) = least_squares(&scaled, &b)?;
    let c_gamma = c[0] / norms[0];
    let a1 = c[1] / norms[1];
    let vol_over = n * cfg.lambda;
    let metric_exponent = gh_space::metric_decay_slope(cfg, radii)?;
    Ok(AsymptoticFit {
        c_gamma,
        a1,
        a1_normalized: a1 / (vol_over * vol_over),
        metric_exponent,
        condition,
        radii: radii.to_vec(),
    })
}

/// Harmonic function `φ_1 = 2(k+1) x1`.
pub fn harmonic_phi1(cfg: &GHConfig, p: &ChartPoint) -> f64 {
    2.0 * n_total(cfg) * p.base[0]
}

/// `q₁ = |z¹|² − |z²|²` under the identification `x = (|z¹|²−|z²|², 2 Re z¹z², 2 Im z¹z²)/(2n)`.
pub fn q1_at(cfg: &GHConfig, x: &[f64; 3]) -> f64 {
    2.0 * n_total(cfg) * x[0]
}

/// GH Laplacian of `φ_1` by finite differences.
pub fn phi1_laplacian(cfg: &GHConfig, p: &ChartPoint, fd: &Fd) -> Result<f64> {
    let metric = |q: &Point| MetricAt::new(metric_components(cfg, q, p.patch)?);
    let f = |q: &Point| Ok(2.0 * n_total(cfg) * q[0]);
    fd.laplacian(&metric, &f, &p.coords())
}

/// Average of `|Ω|²` over the sphere of asymptotic radius `r`.
pub fn sphere_mean_density(bundle: &HarmonicFormBundle, r: f64) -> Result<f64> {
    let cfg = &bundle.config;
    let rho = rho_for_radius(cfg, r);
    let dirs = far_directions();
    let mut s = 0.0;
    for d in &dirs {
        let p = [rho * d[0], rho * d[1], rho * d[2], 0.0];
        let patch = Patch::away_from(&[p[0], p[1], p[2]]);
        let metric = MetricAt::new(metric_components(cfg, &p, patch)?)?;
        let w = bundle.omega_at(&p, patch)?;
        s += metric.inner(&w, &w);
    }
    Ok(s / dirs.len() as f64)
}

/// Fitted decay exponent of the sphere-averaged `|Ω|²`.
pub fn density_decay_slope(bundle: &HarmonicFormBundle, radii: &[f64]) -> Result<f64> {
    let values = radii
        .iter()
        .map(|&r| sphere_mean_density(bundle, r))
        .collect::<Result<Vec<_>>>()?;
    crate::fit::loglog_slope(radii, &values)
}

#[cfg(test)]
mod tests;
