use super::*;
use crate::fit::geometric_radii;
use crate::gh_space::sample_points;

fn bundle(k: u32, l: f64) -> HarmonicFormBundle {
    build_omega(&GHConfig::a_series(k, l).unwrap()).unwrap()
}

/// Newtonian potential of the segment under Σ with line density ½.
fn segment_potential(cfg: &GHConfig, x: &[f64; 3]) -> f64 {
    let (a, b) = cfg.sigma_segment().unwrap();
    let s = (x[1] * x[1] + x[2] * x[2]).sqrt();
    0.5 * (((b - x[0]) / s).asinh() - ((a - x[0]) / s).asinh())
}

#[test]
fn omega_is_ddc_of_segment_potential() {
    let b = bundle(2, 1.0);
    let cfg = &b.config;
    let fd = Fd::new(1e-3);
    let outer = Fd::new(1e-2);
    for pt in sample_points(cfg, 4, 21, 0.5, 5.0, 0.3) {
        let jpsi = |q: &Point| {
            let m = MetricAt::new(metric_components(cfg, q, pt.patch)?)?;
            let t = triple_components(cfg, q, pt.patch)?;
            let psi = |r: &Point| Ok(segment_potential(cfg, &[r[0], r[1], r[2]]));
            Ok(fd.d_scalar(&psi, q)?.map_covector(&m.j_covector(&t[0])))
        };
        let p = pt.coords();
        let diff = outer.d(&jpsi, &p).unwrap() - b.omega_at(&p, pt.patch).unwrap();
        assert!(diff.max_abs() < 1e-6, "{}", diff.max_abs());
    }
}

#[test]
fn closed_and_anti_self_dual() {
    let fd = Fd::new(1e-3);
    for k in 1..=3 {
        let b = bundle(k, 1.0);
        let pts = sample_points(&b.config, 10, 100 + k as u64, 0.5, 10.0, 0.3);
        let (closed, asd) = omega_residuals(&b, &pts, &fd).unwrap();
        assert!(closed < 1e-5 && asd < 1e-6, "k={k}: {closed} {asd}");
    }
}

#[test]
fn normalization_and_sigma_integral() {
    for k in 1..=3 {
        let b = bundle(k, 0.8);
        let kf = k as f64;
        assert!((b.normalization - (kf + 1.0) / kf).abs() < 1e-12);
        assert!((b.sigma_integral().unwrap() - TAU * b.sigma_self_intersection).abs() < 1e-10);
    }
    assert!(build_omega(&GHConfig::single_center(1)).is_err());
}

#[test]
fn norm_matches_cohomological_value() {
    for k in 1..=3 {
        let b = bundle(k, 1.0);
        let kf = k as f64;
        let rep = omega_norm(&b).unwrap();
        let exact = 4.0 * PI * PI * (kf + 1.0) / kf;
        assert!((rep.value / exact - 1.0).abs() < 1e-3, "k={k}: {rep:?}");
        assert!(rep.tail_fraction < 1e-4);
    }
}

#[test]
fn norm_is_quadratic_in_the_form() {
    let mut b = bundle(2, 1.0);
    let spec = QuadratureSpec {
        sphere_order: 16,
        radial_nodes: 16,
        azimuth_nodes: 2,
        region: Region::Ball { r_out: 30.0 },
    };
    let one = omega_norm_with(&b, 30.0, &spec).unwrap();
    b.normalization *= 2.0;
    let two = omega_norm_with(&b, 30.0, &spec).unwrap();
    assert!((two.ball - 4.0 * one.ball).abs() <= 1e-12 * two.ball);
}

#[test]
fn small_ball_is_tail_dominated() {
    let b = bundle(1, 1.0);
    assert!(matches!(
        omega_norm_with(&b, 3.0, &QuadratureSpec::ball(3.0)),
        Err(AleError::TailDominance { .. })
    ));
}

#[test]
fn s_ratio_values_and_scaling() {
    assert!((s_ratio(&bundle(2, 1.0)).unwrap() + 2.0).abs() < 1e-10);
    assert!((s_ratio(&bundle(1, 0.5)).unwrap() + 0.5).abs() < 1e-10);
    for k in 1..=3 {
        let s1 = s_ratio(&bundle(k, 0.7)).unwrap();
        let s2 = s_ratio(&bundle(k, 1.4)).unwrap();
        assert!(s1 < 0.0);
        assert!((s2 - 2.0 * s1).abs() < 1e-10);
    }
}

#[test]
fn alpha_splits_into_kahler_form_and_harmonic_form() {
    let b = bundle(2, 1.0);
    let pts = sample_points(&b.config, 5, 9, 0.5, 8.0, 0.3);
    let rep = alpha_split_check(&b, &pts, &Fd::new(1e-3)).unwrap();
    assert!(
        rep.plus < 1e-5 && rep.minus < 1e-4 && rep.closed < 1e-5,
        "{rep:?}"
    );
}

#[test]
fn leading_profile_at_fifty() {
    for k in 1..=3 {
        assert!(leading_profile_error(&bundle(k, 1.0), 50.0).unwrap() < 1e-2);
    }
}

#[test]
fn potential_coefficients_from_fit() {
    let b = bundle(2, 1.0);
    let fit = asymptotic_fit(&b, &geometric_radii(60.0, 240.0, 4)).unwrap();
    assert!((fit.c_gamma / 9.0 - 1.0).abs() < 1e-2);
    assert!((fit.a1_normalized + 3.0).abs() < 0.3);
    assert!(fit.metric_exponent <= -3.9);
    let b = bundle(1, 1.0);
    let fit = asymptotic_fit(&b, &geometric_radii(40.0, 160.0, 4)).unwrap();
    assert!(fit.a1_normalized.abs() < 1e-3);
    assert!((fit.c_gamma / 4.0 - 1.0).abs() < 1e-2);
    assert!(asymptotic_fit(&b, &[1.0, 2.0]).is_err());
}

#[test]
fn phi1_values() {
    for k in 1..=3 {
        let cfg = GHConfig::a_series(k, 1.0).unwrap();
        let p1 = ChartPoint::new([1.0, 0.0, 0.0], 0.0, Patch::South);
        assert!((harmonic_phi1(&cfg, &p1) - 2.0 * (k as f64 + 1.0)).abs() < 1e-15);
        for p in sample_points(&cfg, 3, 4, 0.5, 6.0, 0.3) {
            assert!(phi1_laplacian(&cfg, &p, &Fd::new(1e-3)).unwrap().abs() < 1e-5);
        }
        let x = [30.0, 20.0, 10.0];
        let p = ChartPoint::new(x, 0.0, Patch::North);
        assert!((harmonic_phi1(&cfg, &p) / q1_at(&cfg, &x) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn density_decays_like_inverse_eighth_power() {
    let b = bundle(1, 1.0);
    let slope = density_decay_slope(&b, &geometric_radii(20.0, 80.0, 5)).unwrap();
    assert!(slope <= -7.5, "{slope}");
}

#[test]
fn single_radius_c_gamma_converges() {
    let b = bundle(2, 1.0);
    let near = c_gamma_estimate(&b, 30.0).unwrap();
    let far = c_gamma_estimate(&b, 240.0).unwrap();
    assert!((far / 9.0 - 1.0).abs() < 1e-2, "{far}");
    assert!((far - 9.0).abs() < (near - 9.0).abs());
}
