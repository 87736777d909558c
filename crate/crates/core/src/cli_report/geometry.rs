//! Checks on the S³ quadrature, the Gibbons-Hawking geometry and the
//! harmonic form.

use super::check::{Check, Provenance::*};
use crate::error::{AleError, Result};
use crate::exterior_calculus::riemann::max_abs4;
use crate::exterior_calculus::{Fd, MetricJet};
use crate::fit::geometric_radii;
use crate::gh_space::{
    closedness_residual, killing_residual, metric_decay_slope, metric_field, moment_decay_slope,
    moment_map, potential_residual, ricci_residual, sample_points, sigma_integrate, ChartPoint,
    GHConfig, SIGMA_ORDER,
};
use crate::l2_harmonic::{
    alpha_split_check, asymptotic_fit, build_omega, leading_profile_error, omega_norm,
    omega_residuals, s_ratio, AsymptoticFit,
};
use crate::par;
use crate::quadrature::{
    dcf_pairing, dcf_pairing_at, integrate_s3, random_closed_quadratic, random_closed_sd_quadratic,
    Duality, QuadratureSpec, S3Integrand,
};
use std::f64::consts::{PI, TAU};

/// Number of seeded triples in the pairing checks.
pub const PAIRING_SEEDS: u64 = 5;

/// Largest value of `f` over the points, the first error winning.
fn max_over<F>(points: &[ChartPoint], f: F) -> Result<f64>
where
    F: Fn(&ChartPoint) -> Result<f64> + Send + Sync,
{
    par::map(points.len(), |i| f(&points[i]))
        .into_iter()
        .try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

pub fn quadrature_checks() -> Vec<Check> {
    let spec = QuadratureSpec::sphere(1.0);
    let f = |x: &[f64; 4]| (x[0] * x[3] + x[1] * x[2]).powi(2);
    let g = |x: &[f64; 4]| (x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]).powi(2);
    let mut out = vec![
        Check::absolute(
            "quadrature.s3_moment_pi2_over_6",
            PI * PI / 6.0,
            Ok(integrate_s3(&S3Integrand::Scalar(&f), 1.0, &spec)),
            1e-8,
            PaperConstant,
        ),
        Check::absolute(
            "quadrature.s3_moment_2pi2_over_3",
            2.0 * PI * PI / 3.0,
            Ok(integrate_s3(&S3Integrand::Scalar(&g), 1.0, &spec)),
            1e-8,
            PaperConstant,
        ),
    ];
    let mut radius_drift = 0.0f64;
    for seed in 0..PAIRING_SEEDS {
        let t = random_closed_sd_quadratic(seed);
        let p = dcf_pairing(&t, &spec);
        out.push(Check::absolute(
            &format!("quadrature.pairing_sd.seed{seed}"),
            p.rhs,
            Ok(p.lhs),
            1e-6 * p.rhs.abs().max(1.0),
            PaperConstant,
        ));
        for r in [0.5, 2.0] {
            radius_drift = radius_drift.max((dcf_pairing_at(&t, r, &spec).lhs - p.lhs).abs());
        }
    }
    let asd = (0..PAIRING_SEEDS)
        .map(|seed| {
            dcf_pairing(&random_closed_quadratic(seed, Duality::AntiSelfDual), &spec)
                .lhs
                .abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::residual(
        "quadrature.pairing_asd_max",
        Ok(asd),
        1e-8,
        DerivedOracle,
    ));
    out.push(Check::residual(
        "quadrature.pairing_radius_drift",
        Ok(radius_drift),
        1e-8,
        DerivedOracle,
    ));
    out
}

/// `VolΣ`, `∫_Σ m ω₁`, `∫_Σ φ₁` and `m(p₁)` against their closed forms.
pub fn gh_constant_checks(k: u32, lambda: f64) -> Result<Vec<Check>> {
    let cfg = GHConfig::a_series(k, lambda)?;
    let n = k as f64 + 1.0;
    let vol = sigma_integrate(&cfg, &|_| 1.0, SIGMA_ORDER);
    let int_m = sigma_integrate(&cfg, &|x| moment_map(&cfg, &[x, 0.0, 0.0]), SIGMA_ORDER);
    let int_phi = sigma_integrate(&cfg, &|x| 2.0 * n * x, SIGMA_ORDER);
    let phi_exact = -TAU * n * n * (n - 2.0) * lambda * lambda;
    let phi_check = if k == 1 {
        Check::absolute("gh.int_phi1", phi_exact, int_phi, 1e-8, PaperConstant)
    } else {
        Check::relative("gh.int_phi1", phi_exact, int_phi, 1e-6, PaperConstant)
    };
    Ok(vec![
        Check::relative("gh.vol_sigma", TAU * n * lambda, vol, 1e-6, PaperConstant),
        Check::relative(
            "gh.int_m_omega1",
            PI * n.powi(3) * lambda * lambda,
            int_m,
            1e-6,
            PaperConstant,
        ),
        phi_check,
        Check::relative(
            "gh.m_p1",
            n * lambda,
            Ok(moment_map(&cfg, &cfg.centers[1].position)),
            1e-6,
            PaperConstant,
        ),
    ])
}

/// Sample points scaled with `λ`, away from the centers and the `x₁` axis.
fn scaled_points(cfg: &GHConfig, n: usize, seed: u64) -> Vec<ChartPoint> {
    let l = cfg.lambda;
    sample_points(cfg, n, seed, 0.5 * l, 10.0 * l, 0.3 * l)
}

/// Radii well outside the centers for decay fits.
fn decay_radii(k: u32, lambda: f64) -> Vec<f64> {
    let scale = (k as f64 + 1.0) * lambda;
    geometric_radii(10.0 * scale, 40.0 * scale, 5)
}

/// Hyperkähler residuals, decay exponents and flatness of a single center.
pub fn gh_geometry_checks(k: u32, lambda: f64) -> Result<Vec<Check>> {
    let cfg = GHConfig::a_series(k, lambda)?;
    let fd = Fd::new(1e-3 * lambda);
    let pts = scaled_points(&cfg, 20, 40 + k as u64);
    // For ω₁ the same expression is the α split checked by the harmonic suite.
    let potential = max_over(&pts, |p| {
        (1..3).try_fold(0.0f64, |m, i| {
            Ok(m.max(potential_residual(&cfg, p, &fd, i)?))
        })
    });
    let radii = decay_radii(k, lambda);
    let flat = GHConfig::single_center(k + 1);
    let flat_pts = sample_points(&flat, 5, 50 + k as u64, 0.5, 5.0, 0.3);
    let flat_fd = Fd::new(1e-3);
    let flatness = max_over(&flat_pts, |p| {
        Ok(max_abs4(
            &MetricJet::from_field(&flat_fd, &metric_field(&flat, p.patch), &p.coords())?.riemann(),
        ))
    });
    Ok(vec![
        Check::residual(
            "gh.ricci_max",
            max_over(&pts, |p| ricci_residual(&cfg, p, &fd)),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual(
            "gh.d_omega_max",
            max_over(&pts, |p| closedness_residual(&cfg, p, &fd)),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual(
            "gh.killing_max",
            max_over(&pts, |p| killing_residual(&cfg, p, &fd)),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual("gh.moment_potential_max_23", potential, 1e-5, PaperConstant),
        Check::upper_bound(
            "gh.metric_decay_exponent",
            -3.9,
            metric_decay_slope(&cfg, &radii),
            PaperConstant,
        ),
        Check::upper_bound(
            "gh.moment_decay_exponent",
            -1.8,
            moment_decay_slope(&cfg, &radii),
            DerivedOracle,
        ),
        Check::residual(
            "gh.single_center_riemann_max",
            flatness,
            1e-5,
            TrivialIdentity,
        ),
    ])
}

/// Primary and secondary radius sets of the far-field fit.
pub fn fit_radii(k: u32, lambda: f64) -> [Vec<f64>; 2] {
    let scale = (k as f64 + 1.0) * lambda;
    [
        geometric_radii(20.0 * scale, 80.0 * scale, 4),
        geometric_radii(30.0 * scale, 120.0 * scale, 4),
    ]
}

/// Largest spread between two fitted ratios relative to the larger, or
/// infinity when their signs differ.
fn ratio_spread(a: f64, b: f64) -> f64 {
    if a.signum() != b.signum() {
        return f64::INFINITY;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// Relative spread allowed between the `a₁` ratios of two radius sets.
pub const A1_CONSISTENCY_TOL: f64 = 0.25;

/// `‖Ω‖²`, closedness and anti-self-duality, the `α` split, `s`, and the
/// far-field coefficients.
pub fn harmonic_checks(k: u32, lambda: f64) -> Result<Vec<Check>> {
    let cfg = GHConfig::a_series(k, lambda)?;
    let kf = k as f64;
    let n = kf + 1.0;
    let bundle = build_omega(&cfg)?;
    let fd = Fd::new(1e-3 * lambda);
    let pts = scaled_points(&cfg, 10, 100 + k as u64);
    let residuals = omega_residuals(&bundle, &pts, &fd);
    let split = alpha_split_check(&bundle, &scaled_points(&cfg, 5, 9), &fd);
    let pick = |f: fn(&crate::l2_harmonic::AlphaSplitReport) -> f64| {
        split.as_ref().map(f).map_err(Clone::clone)
    };
    let [primary, secondary] = fit_radii(k, lambda);
    let fit = asymptotic_fit(&bundle, &primary);
    let fit2 = asymptotic_fit(&bundle, &secondary);
    let field = |f: fn(&AsymptoticFit) -> f64, fit: &Result<AsymptoticFit>| {
        fit.as_ref().map(f).map_err(Clone::clone)
    };
    let mut out = vec![
        Check::relative(
            "harmonic.omega_norm_sq",
            4.0 * PI * PI * n / kf,
            omega_norm(&bundle).map(|r| r.value),
            1e-3,
            PaperConstant,
        ),
        Check::residual(
            "harmonic.d_omega_max",
            residuals.as_ref().map(|r| r.0).map_err(Clone::clone),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual(
            "harmonic.asd_max",
            residuals.map(|r| r.1),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual(
            "harmonic.alpha_plus_max",
            pick(|r| r.plus),
            1e-4,
            PaperConstant,
        ),
        Check::residual(
            "harmonic.alpha_minus_max",
            pick(|r| r.minus),
            1e-4,
            PaperConstant,
        ),
        Check::residual(
            "harmonic.alpha_minus_closed_max",
            pick(|r| r.closed),
            1e-4,
            DerivedOracle,
        ),
        Check::absolute(
            "harmonic.s_ratio",
            -kf * lambda,
            s_ratio(&bundle),
            1e-4,
            DerivedOracle,
        ),
        Check::residual(
            "harmonic.leading_profile",
            leading_profile_error(&bundle, 25.0 * n * lambda),
            1e-2,
            PaperConstant,
        ),
        Check::relative(
            "harmonic.c_gamma",
            n * n * lambda,
            field(|f| f.c_gamma, &fit),
            1e-2,
            DerivedOracle,
        ),
    ];
    if k == 1 {
        out.push(Check::residual(
            "harmonic.a1_k1",
            field(|f| f.a1, &fit),
            1e-3,
            DerivedOracle,
        ));
    } else {
        let ratio = field(|f| f.a1_normalized, &fit);
        if k == 2 {
            out.push(
                Check::relative(
                    "harmonic.a1_ratio_k2",
                    -3.0,
                    ratio.clone(),
                    0.1,
                    PaperConstant,
                )
                .warning(),
            );
        }
        let spread =
            ratio.and_then(|a| field(|f| f.a1_normalized, &fit2).map(|b| ratio_spread(a, b)));
        out.push(
            Check::residual(
                "harmonic.a1_ratio_consistency",
                spread,
                A1_CONSISTENCY_TOL,
                DerivedOracle,
            )
            .with_note("same sign and relative spread across two radius sets"),
        );
    }
    Ok(out)
}

/// Rejects `k = 0` and non-positive or non-finite `λ` up front.
pub fn validate_family(k: u32, lambda: f64) -> Result<()> {
    if k == 0 {
        return Err(AleError::InvalidConfig("k must be at least 1".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(AleError::InvalidConfig(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}
