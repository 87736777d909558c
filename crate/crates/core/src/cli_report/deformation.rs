//! Checks on the deformation formalism against finite differences in the
//! deformation parameter.

use super::check::{Check, Provenance::*};
use crate::error::Result;
use crate::exterior_calculus::connection::d3;
use crate::exterior_calculus::deformation::{
    bianchi_gauge, deformation_first_order, gh_alpha_residuals, gh_first_order_connection,
    radial_contraction, ric0_second_order, sym_from_pairs, DeformationFamily,
};
use crate::exterior_calculus::{
    flat_asd_triple, flat_sd_triple, Fd, Form, Linear, Mat4, MetricAt, MetricJet, Point,
};
use crate::fit::{geometric_radii, loglog_slope};
use crate::gh_space::{
    metric_components, rho_for_radius, sample_points, triple_components, GHConfig, Patch,
};
use crate::poly::Poly;
use nalgebra::Matrix3;

const P: Point = [0.31, -0.22, 0.17, 0.26];
const Q: Point = [-0.4, 0.12, 0.35, -0.18];

fn flat_background(_: &Point) -> Result<(MetricAt, [Form; 3])> {
    Ok((MetricAt::euclidean(), flat_sd_triple()))
}

fn max3(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// First-order connection and curvature against the family oracle.
fn first_order() -> Result<(f64, f64)> {
    let fd = Fd::new(1e-3);
    let fd_t = Fd::new(1e-2);
    let (mut conn, mut curv) = (0.0f64, 0.0f64);
    for (deg, seed) in [(1, 1), (1, 2), (2, 3)] {
        let fam = DeformationFamily::random_constrained(deg, false, seed)?;
        let phi = fam.phi_forms();
        let phi_field = |q: &Point| Ok(std::array::from_fn(|i| phi[i].eval(q)));
        let lam = |q: &Point| Ok(fam.lambda.eval(q));
        for p in [P, Q] {
            let (a, r) = deformation_first_order(&fd, &flat_background, &lam, &phi_field, &p)?;
            let (mut diff, _) = fam.connection_coefficients(&fd, &fd_t, &p)?;
            diff.axpy(-1.0, &a);
            conn = conn.max(diff.max_abs());
            let exact = fam.first_curvature().map(|f| f.eval(&p));
            for i in 0..3 {
                curv = curv.max((r[i] - exact[i]).max_abs());
            }
        }
    }
    Ok((conn, curv))
}

/// `Ric'(h) + δ*B(h)` against `sym Σ (d₋d₋*φ)_i ∘ ω_i` on flat space.
fn linearized_einstein() -> Result<f64> {
    let fd = Fd::new(1e-3);
    let fd_t = Fd::new(1e-2);
    let flat = |_: &Point| Ok(Mat4::identity());
    let mut worst = 0.0f64;
    for seed in [21, 22] {
        let mut fam = DeformationFamily::random_constrained(3, false, seed)?;
        fam.phi[0][1] = fam.phi[0][1].clone() + Poly::monomial([1, 0, 2, 0], 0.8);
        let h = |q: &Point| Ok(fam.metric_variation(q));
        let ricci = |s: &Point| -> Result<Mat4> {
            let g = |q: &Point| Ok(Mat4::identity() + fam.metric_variation(q) * s[0]);
            Ok(MetricJet::from_field(&fd, &g, &P)?.ricci())
        };
        let ric1: Mat4 = fd_t.partial(&ricci, &[0.0; 4], 0)?;
        let b = |q: &Point| bianchi_gauge(&fd, &flat, &h, q);
        let db: [Form; 4] = Fd::new(1e-2).gradient(&b, &P)?;
        let sym_grad = Mat4::from_fn(|a, c| 0.5 * (db[a][1 << c] + db[c][1 << a]));
        let p_phi = fam.phi_forms().map(|f| f.codiff().d().split().1.eval(&P));
        let rhs = sym_from_pairs(&MetricAt::euclidean(), &p_phi, &flat_sd_triple());
        worst = worst.max((ric1 + sym_grad - rhs).abs().max());
    }
    Ok(worst)
}

/// Second-order trace-free Ricci formula against the Einstein family oracle.
fn second_order() -> Result<f64> {
    let fam = DeformationFamily::random_constrained(4, true, 11)?;
    let fd = Fd::new(1e-2);
    let fd_t = Fd::new(2e-2);
    let flat = MetricAt::euclidean();
    let psi = flat_asd_triple();
    let mut worst = 0.0f64;
    for p in [P, Q] {
        let (a1, _) = fam.connection_coefficients(&fd, &fd_t, &p)?;
        let a2 = |q: &Point| fam.connection_coefficients(&fd, &fd_t, q).map(|c| c.1);
        let phi = fam.phi_forms().map(|f| f.eval(&p));
        let rp = fam.first_rplus();
        let rplus = Matrix3::from_fn(|i, j| rp[i][j].eval(&p));
        let forms = ric0_second_order(&fd, &flat, &a1, &a2, &phi, &rplus, &p)?;
        let formula = Matrix3::from_fn(|i, a| 0.5 * flat.inner(&forms[i], &psi[a]));
        worst = worst.max(max3(&(formula - fam.rminus_second(&fd, &fd_t, &p)?)));
    }
    Ok(worst)
}

/// `da = R⁽¹⁾` and `d*a = 0` for the first-order connection on the GH space.
fn gh_connection(cfg: &GHConfig) -> Result<(f64, f64)> {
    let block = [[0.7, -0.4], [-0.4, 0.25]];
    let l = cfg.lambda;
    let fd = Fd::new(1e-3 * l);
    let (mut da_err, mut codiff) = (0.0f64, 0.0f64);
    for cp in sample_points(cfg, 5, 8, 0.5 * l, 4.0 * l, 0.3 * l) {
        let p = cp.coords();
        let conn = |q: &Point| gh_first_order_connection(cfg, &block, q, cp.patch);
        let field = |q: &Point| conn(q).map(|c| c.a);
        let da = d3(&fd, &field, &p)?;
        let omega = triple_components(cfg, &p, cp.patch)?;
        da_err = da_err.max(da[0].max_abs());
        for row in 0..2 {
            let expected = omega[1] * block[row][0] + omega[2] * block[row][1];
            da_err = da_err.max((da[row + 1] - expected).max_abs());
        }
        let metric = |q: &Point| MetricAt::new(metric_components(cfg, q, cp.patch)?);
        for i in 0..3 {
            let ai = |q: &Point| conn(q).map(|c| c.a[i]);
            codiff = codiff.max(fd.codiff(&metric, &ai, &p)?.max_abs());
        }
    }
    Ok((da_err, codiff))
}

fn gh_alpha(cfg: &GHConfig) -> Result<(f64, f64)> {
    let l = cfg.lambda;
    let fd = Fd::new(1e-3 * l);
    let (mut closed, mut coclosed) = (0.0f64, 0.0f64);
    for cp in sample_points(cfg, 8, 17, 0.5 * l, 5.0 * l, 0.3 * l) {
        let (c, cc) = gh_alpha_residuals(cfg, &cp.coords(), cp.patch, &fd)?;
        closed = closed.max(c);
        coclosed = coclosed.max(cc);
    }
    Ok((closed, coclosed))
}

/// Largest fitted decay exponent of `∂_r ⌟ α_i`, `i = 2, 3`.
fn alpha_radial_slope(cfg: &GHConfig) -> Result<f64> {
    let scale = cfg.total_multiplicity() as f64 * cfg.lambda;
    let radii = geometric_radii(20.0 * scale / 3.0, 80.0 * scale / 3.0, 6);
    let dirs: [[f64; 3]; 6] = [
        [0.3, 0.8, 0.52],
        [-0.6, 0.2, 0.77],
        [0.1, -0.7, 0.7],
        [0.9, 0.3, -0.3],
        [-0.2, -0.4, -0.89],
        [0.5, -0.5, 0.7],
    ];
    let mut worst = f64::NEG_INFINITY;
    for i in 1..3 {
        let means = radii
            .iter()
            .map(|&r| {
                let rho = rho_for_radius(cfg, r);
                let mut total = 0.0;
                for (n, d) in dirs.iter().enumerate() {
                    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                    let x = [rho * d[0] / len, rho * d[1] / len, rho * d[2] / len];
                    let p = [x[0], x[1], x[2], 0.7 * n as f64];
                    total += radial_contraction(cfg, &p, Patch::away_from(&x), i)?;
                }
                Ok(total / dirs.len() as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        worst = worst.max(loglog_slope(&radii, &means)?);
    }
    Ok(worst)
}

fn split<T: Copy>(r: &Result<(T, T)>, first: bool) -> Result<T> {
    r.as_ref()
        .map(|v| if first { v.0 } else { v.1 })
        .map_err(Clone::clone)
}

/// Flat-space formulas are independent of `(k, λ)`; the GH checks use them.
pub fn deformation_checks(k: u32, lambda: f64) -> Result<Vec<Check>> {
    let cfg = GHConfig::a_series(k, lambda)?;
    let first = first_order();
    let conn = gh_connection(&cfg);
    let alpha = gh_alpha(&cfg);
    Ok(vec![
        Check::residual(
            "deformation.first_order_connection",
            split(&first, true),
            1e-4,
            DerivedOracle,
        ),
        Check::residual(
            "deformation.first_order_curvature",
            split(&first, false),
            1e-4,
            DerivedOracle,
        ),
        Check::residual(
            "deformation.linearized_einstein",
            linearized_einstein(),
            1e-4,
            DerivedOracle,
        ),
        Check::residual(
            "deformation.second_order_ric0",
            second_order(),
            1e-4,
            DerivedOracle,
        ),
        Check::residual(
            "deformation.gh_da_minus_curvature",
            split(&conn, true),
            1e-5,
            DerivedOracle,
        ),
        Check::residual(
            "deformation.gh_codifferential",
            split(&conn, false),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual(
            "deformation.gh_alpha_closed",
            split(&alpha, true),
            1e-5,
            TrivialIdentity,
        ),
        Check::residual(
            "deformation.gh_alpha_coclosed",
            split(&alpha, false),
            1e-5,
            TrivialIdentity,
        ),
        Check::upper_bound(
            "deformation.gh_alpha_radial_exponent",
            -2.8,
            alpha_radial_slope(&cfg),
            PaperConstant,
        ),
    ])
}
