//! Levi-Civita data of a metric field from finite differences.
//!
//! The lowered Riemann tensor uses the convention in which the round
//! sphere has `R_abab > 0`.

use super::fd::Fd;
use super::forms::{Form, Mat4, MetricAt, Point};
use crate::error::Result;

/// Rank-4 array.
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];
/// Rank-3 array.
pub type Tensor3 = [[[f64; 4]; 4]; 4];

/// Metric with first and second derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub metric: MetricAt,
    pub dg: [Mat4; 4],
    pub ddg: [[Mat4; 4]; 4],
}

impl MetricJet {
    pub fn from_field<F>(fd: &Fd, metric: &F, p: &Point) -> Result<Self>
    where
        F: Fn(&Point) -> Result<Mat4> + ?Sized,
    {
        Ok(MetricJet {
            metric: MetricAt::new(metric(p)?)?,
            dg: fd.gradient(metric, p)?,
            ddg: fd.hessian(metric, p)?,
        })
    }

    /// `Γ_{e,ab} = ½(∂_a g_eb + ∂_b g_ea − ∂_e g_ab)`.
    pub fn christoffel_lower(&self) -> Tensor3 {
        let mut out = [[[0.0; 4]; 4]; 4];
        for (e, oe) in out.iter_mut().enumerate() {
            for (a, oa) in oe.iter_mut().enumerate() {
                for (b, ob) in oa.iter_mut().enumerate() {
                    *ob = 0.5 * (self.dg[a][(e, b)] + self.dg[b][(e, a)] - self.dg[e][(a, b)]);
                }
            }
        }
        out
    }

    /// `Γ^e_ab`.
    pub fn christoffel(&self) -> Tensor3 {
        raise_first(&self.metric.inv, &self.christoffel_lower())
    }

    /// Lowered Riemann tensor.
    pub fn riemann(&self) -> Tensor4 {
        let lower = self.christoffel_lower();
        let inv = &self.metric.inv;
        let dd = |a: usize, b: usize, c: usize, d: usize| self.ddg[c][d][(a, b)];
        let mut r = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut v = 0.5
                            * (dd(a, d, b, c) + dd(b, c, a, d) - dd(a, c, b, d) - dd(b, d, a, c));
                        for e in 0..4 {
                            for f in 0..4 {
                                v += inv[(e, f)]
                                    * (lower[e][b][c] * lower[f][a][d]
                                        - lower[e][b][d] * lower[f][a][c]);
                            }
                        }
                        r[a][b][c][d] = v;
                    }
                }
            }
        }
        r
    }

    pub fn ricci(&self) -> Mat4 {
        ricci_from(&self.metric, &self.riemann())
    }

    pub fn scalar(&self) -> f64 {
        (self.metric.inv.component_mul(&self.ricci())).sum()
    }
}

/// `T^e_ab = g^{ef} T_{f,ab}`.
pub fn raise_first(inv: &Mat4, lower: &Tensor3) -> Tensor3 {
    let mut out = [[[0.0; 4]; 4]; 4];
    for (e, oe) in out.iter_mut().enumerate() {
        for a in 0..4 {
            for b in 0..4 {
                oe[a][b] = (0..4).map(|f| inv[(e, f)] * lower[f][a][b]).sum();
            }
        }
    }
    out
}

/// `Ric_bd = g^{ac} R_abcd`.
pub fn ricci_from(metric: &MetricAt, riem: &Tensor4) -> Mat4 {
    Mat4::from_fn(|b, d| {
        let mut v = 0.0;
        for a in 0..4 {
            for c in 0..4 {
                v += metric.inv[(a, c)] * riem[a][b][c][d];
            }
        }
        v
    })
}

/// Largest absolute entry of a rank-4 array.
pub fn max_abs4(t: &Tensor4) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .flatten()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Curvature 2-forms of the bundle of self-dual forms in a frame `Φ_i`.
///
/// Returns `R_i` with `(R_i)_cd = −½ R_cdab Φ_i^ab`, so that the unit
/// sphere gives `R_i = −Φ_i`.
pub fn bundle_curvature_forms(metric: &MetricAt, riem: &Tensor4, frame: &[Form; 3]) -> [Form; 3] {
    std::array::from_fn(|i| {
        let up = metric.inv * frame[i].to_matrix() * metric.inv;
        let mut out = Form::zero(2);
        for c in 0..4 {
            for d in (c + 1)..4 {
                let mut v = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        v += riem[c][d][a][b] * up[(a, b)];
                    }
                }
                out.add2(c, d, -0.5 * v);
            }
        }
        out
    })
}
