//! Curvature at the origin of `euc + H + H⁽²⁾` and the second-derivative
//! invariant `D`.

use super::jets::{Jet2, Jet4, PolyMatrix};
use crate::error::{AleError, Result};
use crate::exterior_calculus::riemann::Tensor3;
use crate::exterior_calculus::{
    bundle_curvature_forms, decompose, flat_sd_triple, CurvatureBlock, Fd, Linear, Mat4, MetricAt,
    MetricJet, Point, Tensor4,
};
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};

/// Threshold on `|R₊(H)(I₁)|` above which the higher coefficients are undefined.
pub const FIRST_ROW_TOL: f64 = 1e-8;

/// Signs of `∇²_00 + ∇²_11 − ∇²_22 − ∇²_33`.
pub const D_SIGNS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// Curvature block of a lowered Riemann tensor at a Euclidean point.
pub fn block_from_riemann(riem: &Tensor4) -> CurvatureBlock {
    let metric = MetricAt::euclidean();
    let frame = flat_sd_triple();
    decompose(
        &bundle_curvature_forms(&metric, riem, &frame),
        &metric,
        &frame,
    )
}

/// Curvature of `euc + H` at the origin; exact, since the metric is flat to first order there.
pub fn curvature_from_jet2(jet: &Jet2) -> CurvatureBlock {
    let ddg = std::array::from_fn(|c| {
        std::array::from_fn(|d| Mat4::from_fn(|a, b| 2.0 * jet.get(&[c, d, a, b])))
    });
    let riem = MetricJet {
        metric: MetricAt::euclidean(),
        dg: [Mat4::zeros(); 4],
        ddg,
    }
    .riemann();
    block_from_riemann(&riem)
}

/// `|R₊(H)(I₁)|`, the norm of the first row of the self-dual block.
pub fn first_row_norm(block: &CurvatureBlock) -> f64 {
    block.rplus[0].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Metric field `euc + H + H⁽²⁾`.
pub fn jet_metric<'a>(
    jet: &'a Jet2,
    jet4: Option<&'a Jet4>,
) -> impl Fn(&Point) -> Result<Mat4> + Sync + 'a {
    move |x| {
        let mut g = Mat4::identity() + jet.eval(x);
        if let Some(h2) = jet4 {
            g += h2.eval(x);
        }
        Ok(g)
    }
}

fn block_at(jet: &Jet2, fd: &Fd, p: &Point) -> Result<CurvatureBlock> {
    let mj = MetricJet::from_field(fd, &jet_metric(jet, None), p)?;
    let frame = mj.metric.sd_basis();
    Ok(decompose(
        &bundle_curvature_forms(&mj.metric, &mj.riemann(), &frame),
        &mj.metric,
        &frame,
    ))
}

fn combine(a: &CurvatureBlock, wa: f64, b: &CurvatureBlock, wb: f64) -> CurvatureBlock {
    let mix = |x: &[[f64; 3]; 3], y: &[[f64; 3]; 3]| {
        std::array::from_fn(|i| std::array::from_fn(|j| wa * x[i][j] + wb * y[i][j]))
    };
    CurvatureBlock {
        rplus: mix(&a.rplus, &b.rplus),
        rminus: mix(&a.rminus, &b.rminus),
        scal: wa * a.scal + wb * b.scal,
    }
}

/// Finite-difference curvature of `euc + H` at `s·direction` for `s = radius`
/// and `radius/2`, Richardson-extrapolated to the origin. The curvature is
/// even in the position, so the extrapolation error is `O(radius⁴)`.
pub fn curvature_fd_oracle(
    jet: &Jet2,
    direction: &Point,
    radius: f64,
    fd: &Fd,
) -> Result<CurvatureBlock> {
    let at = |s: f64| block_at(jet, fd, &direction.map(|d| s * d));
    let far = at(radius)?;
    let near = at(0.5 * radius)?;
    Ok(combine(&near, 4.0 / 3.0, &far, -1.0 / 3.0))
}

/// Adds the minimum-norm jet correction that moves the listed block
/// functionals to their targets.
fn constrain<F>(base: &Jet2, functionals: F, targets: &[f64]) -> Jet2
where
    F: Fn(&CurvatureBlock) -> Vec<f64>,
{
    let n = Jet2::parameter_count();
    let m = targets.len();
    let mut system = DMatrix::zeros(m, n);
    let mut unit = vec![0.0; n];
    for col in 0..n {
        unit[col] = 1.0;
        system.set_column(
            col,
            &DVector::from_vec(functionals(&curvature_from_jet2(&Jet2::from_params(&unit)))),
        );
        unit[col] = 0.0;
    }
    let current = DVector::from_vec(functionals(&curvature_from_jet2(base)));
    let rhs = DVector::from_column_slice(targets) - current;
    let svd = system.svd(true, true);
    let cutoff = 1e-12 * svd.singular_values.max();
    let step = svd.solve(&rhs, cutoff).expect("both factors were computed");
    base.clone() + Jet2::from_params(step.as_slice())
}

/// `base` corrected so that its self-dual block equals `target`, which must be symmetric.
pub fn with_rplus(base: &Jet2, target: &[[f64; 3]; 3]) -> Jet2 {
    let flat: Vec<f64> = target.iter().flatten().copied().collect();
    constrain(base, |b| b.rplus.iter().flatten().copied().collect(), &flat)
}

/// `base` corrected so that `R₊(H)(I₁) = 0`.
pub fn with_first_row_zero(base: &Jet2) -> Jet2 {
    constrain(base, |b| b.rplus[0].to_vec(), &[0.0; 3])
}

/// `base` corrected so that the whole curvature operator annihilates `I₁`.
pub fn with_curvature_row_zero(base: &Jet2) -> Jet2 {
    constrain(
        base,
        |b| b.rplus[0].iter().chain(&b.rminus[0]).copied().collect(),
        &[0.0; 6],
    )
}

/// `D` with the coordinate part and Christoffel correction kept apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D2Evaluation {
    pub value: f64,
    /// Contribution of `Σ ±∂_e∂_e R` alone.
    pub coordinate_part: f64,
}

/// Steps of the nested finite differences in [`d2_evaluate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D2Steps {
    /// Step for the metric derivatives inside the curvature.
    pub inner: f64,
    /// Coarse step for the derivatives of the curvature and Christoffel
    /// fields; a second pass at half the step is extrapolated against it.
    pub outer: f64,
}

impl Default for D2Steps {
    fn default() -> Self {
        D2Steps {
            inner: 5e-2,
            outer: 1e-2,
        }
    }
}

fn pairing(riem: &Tensor4) -> f64 {
    2.0 * block_from_riemann(riem).rplus[0][0]
}

/// `Σ_e s_e (∂_e∂_e R − Σ_slots ∂_eΓ_e · R)` from derivative data at a point where `Γ = 0`.
fn covariant_sum(riem: &Tensor4, ddr: &[Tensor4; 4], dgamma: &[Tensor3; 4]) -> (Tensor4, Tensor4) {
    let mut total = [[[[0.0; 4]; 4]; 4]; 4];
    let mut coordinate = [[[[0.0; 4]; 4]; 4]; 4];
    for e in 0..4 {
        let s = D_SIGNS[e];
        let dg = &dgamma[e];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut corr = 0.0;
                        for m in 0..4 {
                            corr += dg[m][e][a] * riem[m][b][c][d]
                                + dg[m][e][b] * riem[a][m][c][d]
                                + dg[m][e][c] * riem[a][b][m][d]
                                + dg[m][e][d] * riem[a][b][c][m];
                        }
                        coordinate[a][b][c][d] += s * ddr[e][a][b][c][d];
                        total[a][b][c][d] += s * (ddr[e][a][b][c][d] - corr);
                    }
                }
            }
        }
    }
    (total, coordinate)
}

fn require_first_row_zero(jet: &Jet2) -> Result<()> {
    let norm = first_row_norm(&curvature_from_jet2(jet));
    if norm > FIRST_ROW_TOL {
        return Err(AleError::FirstObstructionNonzero { norm });
    }
    Ok(())
}

/// `D = ⟨(∇²_00 + ∇²_11 − ∇²_22 − ∇²_33) R(0) I₁, I₁⟩` by nested finite
/// differences of the curvature and Christoffel fields of `euc + H + H⁽²⁾`.
pub fn d2_evaluate(jet: &Jet2, jet4: &Jet4, steps: D2Steps) -> Result<D2Evaluation> {
    require_first_row_zero(jet)?;
    let metric = jet_metric(jet, Some(jet4));
    let inner = Fd::new(steps.inner);
    let riem_field = |x: &Point| Ok(MetricJet::from_field(&inner, &metric, x)?.riemann());
    let christoffel_field = |x: &Point| {
        let lower = MetricJet {
            metric: MetricAt::new(metric(x)?)?,
            dg: inner.gradient(&metric, x)?,
            ddg: [[Mat4::zeros(); 4]; 4],
        };
        Ok(lower.christoffel())
    };
    let origin = [0.0; 4];
    let riem = riem_field(&origin)?;
    let coarse = Fd::new(steps.outer);
    let fine = Fd::new(0.5 * steps.outer);
    let mut ddr = [[[[[0.0; 4]; 4]; 4]; 4]; 4];
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for e in 0..4 {
        ddr[e] = richardson(
            coarse.second(&riem_field, &origin, e, e)?,
            fine.second(&riem_field, &origin, e, e)?,
        );
        dgamma[e] = richardson(
            coarse.partial(&christoffel_field, &origin, e)?,
            fine.partial(&christoffel_field, &origin, e)?,
        );
    }
    let (total, coordinate) = covariant_sum(&riem, &ddr, &dgamma);
    Ok(D2Evaluation {
        value: pairing(&total),
        coordinate_part: pairing(&coordinate),
    })
}

/// Removes the `h⁴` error term of a pair of fourth-order stencils at `h` and `h/2`.
fn richardson<T: Linear>(coarse: T, fine: T) -> T {
    let mut out = fine.zero_like();
    out.axpy(16.0 / 15.0, &fine);
    out.axpy(-1.0 / 15.0, &coarse);
    out
}

/// [`d2_evaluate`] at the default steps.
pub fn d2_invariant(jet: &Jet2, jet4: &Jet4) -> Result<f64> {
    Ok(d2_evaluate(jet, jet4, D2Steps::default())?.value)
}

/// `D` from the exact Taylor expansion of the curvature to second order.
pub fn d2_invariant_symbolic(jet: &Jet2, jet4: &Jet4) -> Result<D2Evaluation> {
    require_first_row_zero(jet)?;
    let (h, h2) = (jet.polys(), jet4.polys());
    let g: PolyMatrix = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            h[a][b].clone() + h2[a][b].clone() + Poly::constant((a == b) as u8 as f64)
        })
    });
    let lower: [[[Poly; 4]; 4]; 4] = std::array::from_fn(|e| {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                (g[e][b].deriv(a) + g[e][a].deriv(b) - g[a][b].deriv(e)).scale(0.5)
            })
        })
    });
    let dd = |a: usize, b: usize, c: usize, d: usize| g[a][b].deriv(c).deriv(d);
    let mut riem_poly: Vec<Poly> = Vec::with_capacity(256);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = (dd(a, d, b, c) + dd(b, c, a, d) - dd(a, c, b, d) - dd(b, d, a, c))
                        .scale(0.5);
                    for e in 0..4 {
                        v = v + &lower[e][b][c] * &lower[e][a][d]
                            - &lower[e][b][d] * &lower[e][a][c];
                    }
                    riem_poly.push(v.truncate(2));
                }
            }
        }
    }
    let at_origin = |p: &Poly| p.coefficient(&[0; 4]);
    let tensor = |f: &dyn Fn(&Poly) -> f64| -> Tensor4 {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                std::array::from_fn(|c| {
                    std::array::from_fn(|d| f(&riem_poly[((a * 4 + b) * 4 + c) * 4 + d]))
                })
            })
        })
    };
    let riem = tensor(&at_origin);
    let ddr: [Tensor4; 4] =
        std::array::from_fn(|e| tensor(&|p: &Poly| at_origin(&p.deriv(e).deriv(e))));
    let dgamma: [Tensor3; 4] = std::array::from_fn(|e| {
        std::array::from_fn(|m| {
            std::array::from_fn(|a| std::array::from_fn(|b| at_origin(&lower[m][a][b].deriv(e))))
        })
    });
    let (total, coordinate) = covariant_sum(&riem, &ddr, &dgamma);
    Ok(D2Evaluation {
        value: pairing(&total),
        coordinate_part: pairing(&coordinate),
    })
}
