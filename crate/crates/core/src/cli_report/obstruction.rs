//! Checks on the obstruction pipeline and the invariant `D`.

use super::check::{Check, Provenance::*};
use crate::error::Result;
use crate::exterior_calculus::{CurvatureBlock, Fd, Mat4};
use crate::obstruction::{
    a_coefficient, a_coefficient_moment_form, average_field, binary_dihedral_group,
    binary_icosahedral_group, binary_octahedral_group, binary_tetrahedral_group,
    curvature_fd_oracle, curvature_from_jet2, cyclic_group, d2_invariant, d2_invariant_symbolic,
    first_row_norm, gauge_projection, lambda_obstruction, minor, mu1_ak, mu1_generic, random_field,
    symmetrized_derivative, wall_side, with_first_row_zero, InstantonConstants, Jet2, Jet4,
    WallSide, WALL_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn block_diff(a: &CurvatureBlock, b: &CurvatureBlock) -> f64 {
    let rp = a.rplus.iter().flatten().zip(b.rplus.iter().flatten());
    let rm = a.rminus.iter().flatten().zip(b.rminus.iter().flatten());
    rp.chain(rm)
        .fold((a.scal - b.scal).abs(), |m, (x, y)| m.max((x - y).abs()))
}

fn det_regime_block(r22: f64, r33: f64, r23: f64) -> CurvatureBlock {
    CurvatureBlock {
        rplus: [[0.0; 3], [0.0, r22, r23], [0.0, r23, r33]],
        ..CurvatureBlock::zero()
    }
}

fn curvature_vs_oracle() -> Result<f64> {
    let fd = Fd::new(0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let jet = Jet2::random(300 + seed, 1.0);
        let dir: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let oracle = curvature_fd_oracle(&jet, &dir, 1e-2, &fd)?;
        worst = worst.max(block_diff(&oracle, &curvature_from_jet2(&jet)));
    }
    Ok(worst)
}

/// Largest curvature change and largest Bianchi residual after projection.
fn gauge_invariance() -> (f64, f64) {
    let (mut curv, mut resid) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let jet = Jet2::random(100 + seed, 1.0);
        let proj = gauge_projection(&jet);
        curv = curv.max(block_diff(
            &curvature_from_jet2(&jet),
            &curvature_from_jet2(&proj.jet),
        ));
        resid = resid.max(proj.residual_after);
    }
    (curv, resid)
}

/// Correct classifications out of 40: 20 jets with a zero first row must
/// give `λ = 0`, 20 generic jets must give `λ ≠ 0`.
fn lambda_iff(c: &InstantonConstants) -> f64 {
    let mut correct = 0;
    for seed in 0..20 {
        let zero_row = curvature_from_jet2(&with_first_row_zero(&Jet2::random(1000 + seed, 1.0)));
        if lambda_obstruction(&zero_row, c)
            .iter()
            .all(|x| x.abs() < 1e-10)
        {
            correct += 1;
        }
        let generic = curvature_from_jet2(&Jet2::random(1100 + seed, 1.0));
        let norm = lambda_obstruction(&generic, c)
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        if first_row_norm(&generic) > 1e-3 && norm > 1e-3 {
            correct += 1;
        }
    }
    correct as f64
}

/// Largest relative gap between the two `μ₁` forms for `k = 1`.
fn mu1_forms_gap(c1: &InstantonConstants) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let block = det_regime_block(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let d = rng.random_range(-50.0..50.0);
        let generic = mu1_generic(&block, c1)?;
        worst = worst.max((mu1_ak(&block, d, 1, c1)? - generic).abs() / generic.abs().max(1.0));
    }
    Ok(worst)
}

fn a_forms_gap(k: u32, c: &InstantonConstants) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let block = det_regime_block(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-1.0..1.0),
        );
        let d = rng.random_range(-20.0..20.0);
        worst = worst.max(
            (a_coefficient(&block, d, k, c)? - a_coefficient_moment_form(&block, d, k, c)?).abs(),
        );
    }
    Ok(worst)
}

fn side_code(side: WallSide) -> f64 {
    match side {
        WallSide::EinsteinSide => 1.0,
        WallSide::OnWall => 0.0,
        WallSide::EmptySide => -1.0,
    }
}

/// Pipeline checks for `A_k` at scale `λ`. The `k = 1` comparison of the
/// two `μ₁` forms always uses the `A₁` constants at the same scale.
pub fn obstruction_checks(k: u32, lambda: f64) -> Result<Vec<Check>> {
    let c = InstantonConstants::a_series(k, lambda)?;
    let c1 = if k == 1 {
        c
    } else {
        InstantonConstants::a_series(1, lambda)?
    };
    let kf = k as f64;
    let n = kf + 1.0;
    let vol = c.vol_sigma.value;
    let (gauge_curv, gauge_resid) = gauge_invariance();
    let canonical = det_regime_block(1.0, 1.0, 0.0);
    let balanced = det_regime_block(1.2, 0.9, 0.3);
    let m = minor(&balanced);
    let d_bal = 16.0 * (kf - 1.0) / n * m;
    let mut out = vec![
        Check::residual(
            "obstruction.curvature_vs_fd",
            curvature_vs_oracle(),
            1e-6,
            DerivedOracle,
        ),
        Check::residual(
            "obstruction.gauge_curvature_change",
            Ok(gauge_curv),
            1e-10,
            DerivedOracle,
        ),
        Check::residual(
            "obstruction.gauge_bianchi_residual",
            Ok(gauge_resid),
            1e-10,
            TrivialIdentity,
        ),
        Check::absolute(
            "obstruction.lambda_iff_first_row",
            40.0,
            Ok(lambda_iff(&c)),
            0.0,
            DerivedOracle,
        )
        .with_note("correct classifications out of 40"),
        Check::relative(
            "obstruction.mu1_canonical",
            kf * n * n * lambda * lambda,
            mu1_generic(&canonical, &c),
            1e-6,
            DerivedOracle,
        ),
        Check::residual(
            "obstruction.mu1_ak_vs_generic_k1",
            mu1_forms_gap(&c1),
            1e-12,
            TrivialIdentity,
        ),
        Check::absolute(
            "obstruction.mu1_balanced_d",
            4.0 * kf * vol * vol / (n * c.omega_norm_sq.value) * m,
            mu1_ak(&balanced, d_bal, k, &c),
            1e-10,
            PaperConstant,
        ),
        Check::absolute(
            "obstruction.a_balanced_d",
            0.0,
            a_coefficient(&balanced, d_bal, k, &c),
            1e-10,
            TrivialIdentity,
        ),
        Check::residual(
            "obstruction.a_forms_agree",
            a_forms_gap(k, &c),
            1e-10,
            DerivedOracle,
        ),
        Check::absolute(
            "obstruction.int_m_omega1_identity",
            PI * n * (vol / (2.0 * PI)).powi(2),
            Ok(c.int_m_omega1.value),
            1e-8,
            PaperConstant,
        ),
    ];
    for (label, det, want) in [
        ("plus", 0.5, 1.0),
        ("zero", 0.0, 0.0),
        ("minus", -0.5, -1.0),
    ] {
        out.push(Check::absolute(
            &format!("obstruction.wall_side_{label}"),
            want,
            Ok(side_code(wall_side(det, WALL_TOL))),
            0.0,
            TrivialIdentity,
        ));
    }
    Ok(out)
}

fn invariant_pair(group: &[Mat4], seed: u64) -> (Jet2, Jet4) {
    let jet = with_first_row_zero(&Jet2::random(seed, 1.0)).average_over(group);
    (jet, Jet4::random(seed + 1000, 1.0).average_over(group))
}

fn fd_vs_symbolic() -> Result<f64> {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let jet = with_first_row_zero(&Jet2::random(400 + seed, 1.0));
        let jet4 = Jet4::random(500 + seed, 1.0);
        worst = worst
            .max((d2_invariant(&jet, &jet4)? - d2_invariant_symbolic(&jet, &jet4)?.value).abs());
    }
    Ok(worst)
}

fn polyhedral_d() -> Result<f64> {
    let groups = [
        binary_dihedral_group(2)?,
        binary_dihedral_group(3)?,
        binary_tetrahedral_group()?,
        binary_octahedral_group()?,
        binary_icosahedral_group()?,
    ];
    let mut worst = 0.0f64;
    for (n, group) in groups.iter().enumerate() {
        let (jet, jet4) = invariant_pair(group, 600 + n as u64);
        worst = worst.max(d2_invariant(&jet, &jet4)?.abs());
    }
    Ok(worst)
}

fn invariant_gauge_change() -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 1..=3u32 {
        let group = cyclic_group(k + 1)?;
        let (jet, jet4) = invariant_pair(&group, 800 + k as u64);
        let field = average_field(&random_field(5, 900 + k as u64, 1.0), &group);
        let gauge = Jet4::from_polys(&symmetrized_derivative(&field));
        let before = d2_invariant(&jet, &jet4)?;
        worst = worst.max((before - d2_invariant(&jet, &(jet4 + gauge))?).abs());
    }
    Ok(worst)
}

fn general_gauge_change() -> Result<f64> {
    let jet = with_first_row_zero(&Jet2::random(14, 1.0));
    let jet4 = Jet4::random(15, 1.0);
    let gauge = Jet4::from_polys(&symmetrized_derivative(&random_field(5, 16, 1.0)));
    let before = d2_invariant_symbolic(&jet, &jet4)?.value;
    Ok((before - d2_invariant_symbolic(&jet, &(jet4 + gauge))?.value).abs())
}

pub fn d_invariant_checks() -> Vec<Check> {
    vec![
        Check::residual("d.fd_vs_symbolic", fd_vs_symbolic(), 1e-6, DerivedOracle),
        Check::residual(
            "d.polyhedral_groups_vanish",
            polyhedral_d(),
            1e-8,
            DerivedOracle,
        ),
        Check::residual(
            "d.invariant_gauge_change",
            invariant_gauge_change(),
            1e-6,
            DerivedOracle,
        ),
        Check::residual(
            "d.general_gauge_change",
            general_gauge_change(),
            1e-10,
            DerivedOracle,
        ),
    ]
}
