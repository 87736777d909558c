use super::*;
use crate::exterior_calculus::connection::check_frame;
use crate::exterior_calculus::{curvature_of, Linear};
use crate::fit::{geometric_radii, loglog_slope};
use crate::gh_space::{rho_for_radius, sample_points};

const P: Point = [0.31, -0.22, 0.17, 0.26];
const Q: Point = [-0.4, 0.12, 0.35, -0.18];

fn max3(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn lumpy(p: &Point) -> Result<Mat4> {
    let mut g = Mat4::identity() * (0.3 * p[0] + 0.2 * p[1] * p[2]).exp();
    g[(0, 1)] += 0.2 * p[2] * p[3];
    g[(1, 0)] += 0.2 * p[2] * p[3];
    g[(2, 2)] += 0.3 * p[0] * p[0];
    Ok(g)
}

fn flat_background(_: &Point) -> Result<TripleAt> {
    Ok((MetricAt::euclidean(), flat_sd_triple()))
}

#[test]
fn urbantke_recovers_flat_and_conformal_metrics() {
    let g = urbantke_metric(&flat_sd_triple()).unwrap();
    assert!((g.g - Mat4::identity()).abs().max() < 1e-12);
    let scaled = flat_sd_triple().map(|w| w * 3.0);
    let g = urbantke_metric(&scaled).unwrap();
    assert!((g.g - Mat4::identity() * 3.0).abs().max() < 1e-12);
}

#[test]
fn urbantke_recovers_gibbons_hawking_metric() {
    let cfg = GHConfig::a_series(2, 1.0).unwrap();
    for cp in sample_points(&cfg, 6, 3, 0.5, 4.0, 0.3) {
        let p = cp.coords();
        let g = urbantke_metric(&triple_components(&cfg, &p, cp.patch).unwrap()).unwrap();
        let exact = metric_components(&cfg, &p, cp.patch).unwrap();
        assert!((g.g - exact).abs().max() < 1e-10 * exact.abs().max());
    }
}

#[test]
fn family_frames_are_orthonormal_for_the_induced_metric() {
    let fam = DeformationFamily::random_constrained(2, false, 5).unwrap();
    let (metric, phi) = fam.triple(0.3, &P).unwrap();
    check_frame(&metric, &phi).unwrap();
    let (_, psi) = fam.frames(0.3, &P);
    for i in 0..3 {
        for a in 0..3 {
            assert!(phi[i].wedge(&psi[a]).max_abs() < 1e-12);
            let target = if i == a { 2.0 } else { 0.0 };
            assert!((metric.inner(&psi[i], &psi[a]) - target).abs() < 1e-10);
        }
        assert!((metric.hodge(&psi[i]) + psi[i]).max_abs() < 1e-10);
    }
}

#[test]
fn metric_variation_is_conformal_plus_paired_term() {
    let fam = DeformationFamily::random_constrained(2, false, 9).unwrap();
    let along = |s: &Point| fam.triple(s[0], &P).map(|t| t.0.g);
    let dg: Mat4 = Fd::new(1e-3).partial(&along, &[0.0; 4], 0).unwrap();
    let expected = Mat4::identity() * fam.lambda.eval(&P) + fam.metric_variation(&P);
    assert!((dg - expected).abs().max() < 1e-8, "{dg} vs {expected}");
}

#[test]
fn zero_deformation_has_zero_first_order_terms() {
    let zero_l = |_: &Point| Ok(0.0);
    let zero_phi = |_: &Point| Ok([Form::zero(2); 3]);
    let (a, r) =
        deformation_first_order(&Fd::default(), &flat_background, &zero_l, &zero_phi, &P).unwrap();
    assert_eq!(a.max_abs(), 0.0);
    assert!(r.iter().all(|f| f.max_abs() == 0.0));
}

#[test]
fn first_order_connection_matches_fd_in_t() {
    let fd = Fd::new(1e-3);
    let fd_t = Fd::new(1e-2);
    for (deg, seed) in [(1, 1), (1, 2), (2, 3)] {
        let fam = DeformationFamily::random_constrained(deg, false, seed).unwrap();
        assert!(fam.gauge().max_abs_coefficient() < 1e-12);
        let phi = fam.phi_forms();
        let phi_field = |q: &Point| Ok(std::array::from_fn(|i| phi[i].eval(q)));
        let lam = |q: &Point| Ok(fam.lambda.eval(q));
        for p in [P, Q] {
            let (a, r) =
                deformation_first_order(&fd, &flat_background, &lam, &phi_field, &p).unwrap();
            let (oracle, _) = fam.connection_coefficients(&fd, &fd_t, &p).unwrap();
            let mut diff = oracle;
            diff.axpy(-1.0, &a);
            assert!(diff.max_abs() < 1e-4, "deg {deg}: {}", diff.max_abs());
            let exact = fam.first_curvature().map(|f| f.eval(&p));
            for i in 0..3 {
                assert!((r[i] - exact[i]).max_abs() < 1e-6);
            }
        }
    }
}

#[test]
fn first_order_curvature_matches_fd_in_t() {
    let fam = DeformationFamily::random_constrained(2, false, 4).unwrap();
    let fd = Fd::new(1e-2);
    let along = |s: &Point| {
        let frame = |q: &Point| fam.triple(s[0], q);
        curvature_from_phi(&fd, &frame, &P)
    };
    let oracle: [Form; 3] = Fd::new(1e-2).partial(&along, &[0.0; 4], 0).unwrap();
    let exact = fam.first_curvature().map(|f| f.eval(&P));
    assert!(exact.iter().any(|f| f.max_abs() > 1e-2));
    for i in 0..3 {
        assert!((oracle[i] - exact[i]).max_abs() < 1e-4);
    }
}

#[test]
fn outside_gauge_the_connection_picks_up_half_the_gauge_defect() {
    let mut fam = DeformationFamily::random_constrained(1, false, 7).unwrap();
    fam.lambda = Poly::var(0).scale(0.4) + Poly::var(3).scale(-0.7);
    let defect = fam.gauge().eval(&P);
    assert!(defect.max_abs() > 0.1);
    let (oracle, _) = fam
        .connection_coefficients(&Fd::new(1e-3), &Fd::new(1e-2), &P)
        .unwrap();
    let flat = MetricAt::euclidean();
    let omega = flat_sd_triple();
    let star_d = fam.first_connection().map(|f| f.eval(&P));
    for i in 0..3 {
        let predicted = star_d[i] + defect.map_covector(&flat.j_covector(&omega[i])) * 0.5;
        assert!((oracle.a[i] - predicted).max_abs() < 1e-6);
    }
}

#[test]
fn gauge_violation_is_reported() {
    let lam = |q: &Point| Ok(q[0]);
    let zero_phi = |_: &Point| Ok([Form::zero(2); 3]);
    let err =
        deformation_first_order(&Fd::default(), &flat_background, &lam, &zero_phi, &P).unwrap_err();
    assert!(matches!(err, AleError::GaugeViolation { residual } if (residual - 1.0).abs() < 1e-8));
}

#[test]
fn einstein_deformation_has_self_dual_curvature_with_harmonic_coefficients() {
    let fam = DeformationFamily::random_constrained(4, true, 11).unwrap();
    assert!(fam.gauge().max_abs_coefficient() < 1e-12);
    let r = fam.first_curvature();
    for ri in &r {
        assert!(ri.split().1.max_abs_coefficient() < 1e-12);
    }
    let rp = fam.first_rplus();
    let flat = |_: &Point| Ok(MetricAt::euclidean());
    let fd = Fd::new(1e-2);
    let mut largest = 0.0_f64;
    for row in &rp {
        for rij in row {
            largest = largest.max(rij.max_abs_coefficient());
            let f = |q: &Point| Ok(rij.eval(q));
            assert!(fd.laplacian(&flat, &f, &P).unwrap().abs() < 1e-4);
            assert!(rij.laplacian().max_abs_coefficient() < 1e-12);
        }
    }
    assert!(largest > 1e-2, "Einstein family is trivial");
}

#[test]
fn second_order_formula_matches_family_oracle() {
    let fam = DeformationFamily::random_constrained(4, true, 11).unwrap();
    let fd = Fd::new(1e-2);
    let fd_t = Fd::new(2e-2);
    let flat = MetricAt::euclidean();
    let psi = flat_asd_triple();
    for p in [P, Q] {
        let (a1, _) = fam.connection_coefficients(&fd, &fd_t, &p).unwrap();
        let a2 = |q: &Point| fam.connection_coefficients(&fd, &fd_t, q).map(|c| c.1);
        let phi = fam.phi_forms().map(|f| f.eval(&p));
        let rp = fam.first_rplus();
        let rplus = Matrix3::from_fn(|i, j| rp[i][j].eval(&p));
        let forms = ric0_second_order(&fd, &flat, &a1, &a2, &phi, &rplus, &p).unwrap();
        let formula = Matrix3::from_fn(|i, a| 0.5 * flat.inner(&forms[i], &psi[a]));
        let oracle = fam.rminus_second(&fd, &fd_t, &p).unwrap();
        assert!(max3(&oracle) > 1e-3);
        assert!(max3(&(formula - oracle)) < 1e-4, "{formula} vs {oracle}");
    }
}

#[test]
fn second_order_formula_vanishes_on_zero_inputs() {
    let zero = |_: &Point| Ok(ConnectionForm::zero());
    let out = ric0_second_order(
        &Fd::default(),
        &MetricAt::euclidean(),
        &ConnectionForm::zero(),
        &zero,
        &[Form::zero(2); 3],
        &Matrix3::zeros(),
        &P,
    )
    .unwrap();
    assert!(out.iter().all(|f| f.max_abs() == 0.0));
}

#[test]
fn bianchi_operator_examples() {
    let fd = Fd::new(1e-3);
    let b = bianchi_gauge(&fd, &lumpy, &lumpy, &P).unwrap();
    assert!(b.max_abs() < 1e-8);
    let slope = [0.7, -0.3, 0.5, 1.1];
    let f = |q: &Point| slope.iter().zip(q).map(|(s, x)| s * x).sum::<f64>();
    let h = |q: &Point| Ok(lumpy(q)? * f(q));
    let b = bianchi_gauge(&fd, &lumpy, &h, &P).unwrap();
    assert!((b - Form::covector(slope)).max_abs() < 1e-10);
}

#[test]
fn gauge_condition_is_the_bianchi_gauge() {
    let fd = Fd::new(1e-3);
    let flat = |_: &Point| Ok(Mat4::identity());
    for (seed, gauge) in [(3, true), (4, false)] {
        let mut fam = DeformationFamily::random_constrained(2, false, seed).unwrap();
        if !gauge {
            fam.lambda = fam.lambda.scale(-1.0);
        }
        let h = |q: &Point| Ok(Mat4::identity() * fam.lambda.eval(q) + fam.metric_variation(q));
        let b = bianchi_gauge(&fd, &flat, &h, &P).unwrap();
        let defect = fam.gauge().eval(&P);
        assert!((b - defect).max_abs() < 1e-8);
        assert_eq!(b.max_abs() < 1e-8, gauge);
    }
}

#[test]
fn linearized_einstein_operator_is_d_minus_d_minus_star() {
    let fd = Fd::new(1e-3);
    let fd_t = Fd::new(1e-2);
    let flat = |_: &Point| Ok(Mat4::identity());
    for seed in [21, 22] {
        let mut fam = DeformationFamily::random_constrained(3, false, seed).unwrap();
        fam.phi[0][1] = fam.phi[0][1].clone() + Poly::monomial([1, 0, 2, 0], 0.8);
        let h = |q: &Point| Ok(fam.metric_variation(q));
        let ricci = |s: &Point| -> Result<Mat4> {
            let g = |q: &Point| Ok(Mat4::identity() + fam.metric_variation(q) * s[0]);
            Ok(MetricJet::from_field(&fd, &g, &P)?.ricci())
        };
        let ric1: Mat4 = fd_t.partial(&ricci, &[0.0; 4], 0).unwrap();
        let b = |q: &Point| bianchi_gauge(&fd, &flat, &h, q);
        let db: [Form; 4] = Fd::new(1e-2).gradient(&b, &P).unwrap();
        let sym_grad = Mat4::from_fn(|a, c| 0.5 * (db[a][1 << c] + db[c][1 << a]));
        let lhs = ric1 + sym_grad;
        let p_phi = fam.phi_forms().map(|f| f.codiff().d().split().1.eval(&P));
        let rhs = sym_from_pairs(&MetricAt::euclidean(), &p_phi, &flat_sd_triple());
        assert!(rhs.abs().max() > 1e-2);
        assert!((lhs - rhs).abs().max() < 1e-4, "{lhs} vs {rhs}");
    }
}

#[test]
fn gh_alpha_is_a_closed_coclosed_primitive() {
    let cfg = GHConfig::a_series(2, 1.0).unwrap();
    let fd = Fd::new(1e-3);
    for cp in sample_points(&cfg, 8, 17, 0.5, 5.0, 0.3) {
        let (closed, coclosed) = gh_alpha_residuals(&cfg, &cp.coords(), cp.patch, &fd).unwrap();
        assert!(closed < 1e-5, "closed {closed}");
        assert!(coclosed < 1e-5, "coclosed {coclosed}");
    }
}

#[test]
fn gh_first_order_connection_has_the_prescribed_curvature() {
    let cfg = GHConfig::a_series(1, 1.0).unwrap();
    let block = [[0.7, -0.4], [-0.4, 0.25]];
    let fd = Fd::new(1e-3);
    for cp in sample_points(&cfg, 5, 8, 0.5, 4.0, 0.3) {
        let p = cp.coords();
        let conn = |q: &Point| gh_first_order_connection(&cfg, &block, q, cp.patch);
        let field = |q: &Point| conn(q).map(|c| c.a);
        let da = d3(&fd, &field, &p).unwrap();
        let omega = triple_components(&cfg, &p, cp.patch).unwrap();
        assert!(da[0].max_abs() < 1e-6);
        for row in 0..2 {
            let expected = omega[1] * block[row][0] + omega[2] * block[row][1];
            assert!((da[row + 1] - expected).max_abs() < 1e-5);
        }
        let metric = |q: &Point| MetricAt::new(metric_components(&cfg, q, cp.patch)?);
        for i in 0..3 {
            let ai = |q: &Point| conn(q).map(|c| c.a[i]);
            assert!(fd.codiff(&metric, &ai, &p).unwrap().max_abs() < 1e-5);
        }
    }
}

/// Curvature `dA + A ∧ A` of the `so(3)` matrix of 1-forms with
/// `∇v_j = Σ_k A_kj v_k`, read off as `R_1 = F_32`, `R_2 = F_13`, `R_3 = F_21`.
fn matrix_curvature<F>(fd: &Fd, conn: &F, p: &Point) -> [Form; 3]
where
    F: Fn(&Point) -> Result<ConnectionForm>,
{
    let matrix = |c: &ConnectionForm| -> [[Form; 3]; 3] {
        let z = Form::zero(1);
        let [a1, a2, a3] = c.a;
        [[z, -a3, a2], [a3, z, -a1], [-a2, a1, z]]
    };
    let a = matrix(&conn(p).unwrap());
    let entries = |q: &Point| -> Result<[Form; 9]> {
        let m = matrix(&conn(q)?);
        Ok(std::array::from_fn(|n| m[n / 3][n % 3]))
    };
    let grad: [[Form; 9]; 4] = fd.gradient(&entries, p).unwrap();
    let f = |k: usize, j: usize| {
        let mut out = Form::zero(2);
        for (i, gi) in grad.iter().enumerate() {
            out += &Form::dx(i).wedge(&gi[3 * k + j]);
        }
        for l in 0..3 {
            out += &a[k][l].wedge(&a[l][j]);
        }
        out
    };
    [f(2, 1), f(0, 2), f(1, 0)]
}

#[test]
fn gh_middle_term_has_unit_minor_coefficient() {
    let cfg = GHConfig::a_series(1, 1.0).unwrap();
    let block = [[0.9, 0.35], [0.35, -0.6]];
    let minor = block[0][0] * block[1][1] - block[0][1] * block[0][1];
    let fd = Fd::new(1e-3);
    for cp in sample_points(&cfg, 4, 29, 0.5, 3.0, 0.3) {
        let p = cp.coords();
        let metric = MetricAt::new(metric_components(&cfg, &p, cp.patch).unwrap()).unwrap();
        let conn = |q: &Point| gh_first_order_connection(&cfg, &block, q, cp.patch);
        let full = curvature_of(&fd, &conn, &p).unwrap();
        let oracle = matrix_curvature(&fd, &conn, &p);
        for i in 0..3 {
            assert!((full[i] - oracle[i]).max_abs() < 1e-6);
        }
        let a = conn(&p).unwrap();
        let middle = metric.split_sd(&(a.bracket(&a)[0] * 0.5)).1;
        let al2 = gh_alpha(&cfg, &p, cp.patch, 1).unwrap();
        let al3 = gh_alpha(&cfg, &p, cp.patch, 2).unwrap();
        let wedge = metric.split_sd(&al2.wedge(&al3)).1;
        assert!(wedge.max_abs() > 1e-3);
        assert!((middle - wedge * minor).max_abs() < 1e-8);
        assert!((middle - wedge * (2.0 * minor)).max_abs() > 1e-3);
    }
}

#[test]
fn gh_alpha_radial_contraction_decays_like_r_cubed() {
    let cfg = GHConfig::a_series(2, 1.0).unwrap();
    let radii = geometric_radii(20.0, 80.0, 6);
    let dirs: [[f64; 3]; 6] = [
        [0.3, 0.8, 0.52],
        [-0.6, 0.2, 0.77],
        [0.1, -0.7, 0.7],
        [0.9, 0.3, -0.3],
        [-0.2, -0.4, -0.89],
        [0.5, -0.5, 0.7],
    ];
    for i in 1..3 {
        let means: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let rho = rho_for_radius(&cfg, r);
                let total: f64 = dirs
                    .iter()
                    .enumerate()
                    .map(|(n, d)| {
                        let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                        let x = [rho * d[0] / len, rho * d[1] / len, rho * d[2] / len];
                        let p = [x[0], x[1], x[2], 0.7 * n as f64];
                        radial_contraction(&cfg, &p, Patch::away_from(&x), i).unwrap()
                    })
                    .sum();
                total / dirs.len() as f64
            })
            .collect();
        let slope = loglog_slope(&radii, &means).unwrap();
        assert!(slope <= -2.8, "alpha_{} slope {slope}", i + 1);
    }
}
