//! Connection and curvature of the bundle of self-dual 2-forms, computed
//! from an orthonormal self-dual frame `Φ_1, Φ_2, Φ_3` with `⟨Φ_i, Φ_j⟩ = 2δ_ij`.
//!
//! The connection is `∇Φ_1 = a_3 Φ_2 − a_2 Φ_3` (cyclically) and the curvature is
//! `R_i = da_i + a_j ∧ a_k` for cyclic `(i, j, k)`. `R` is the bundle curvature,
//! the negative of the Riemannian curvature operator.

use super::fd::{Fd, Linear};
use super::forms::{masks, merge_sign, Form, Mat4, MetricAt, Point};
use crate::error::{AleError, Result};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

/// Metric and self-dual frame at a point.
pub type TripleAt = (MetricAt, [Form; 3]);

/// Tolerance on `⟨Φ_i, Φ_j⟩ = 2δ_ij` and self-duality of an input frame.
pub const FRAME_TOL: f64 = 1e-8;

/// Components `a_i` of `a = Σ a_i ⊗ v_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionForm {
    pub a: [Form; 3],
}

impl ConnectionForm {
    pub fn zero() -> Self {
        ConnectionForm {
            a: [Form::zero(1); 3],
        }
    }

    /// Components in the rotated frame `v'_i = Σ_j o_ij v_j`.
    pub fn rotated(&self, o: &Matrix3<f64>) -> Self {
        ConnectionForm {
            a: rotate3(&self.a, o),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0_f64, |m, f| m.max(f.max_abs()))
    }

    /// Curvature contribution `½[a, b] + ½[b, a]` restricted to the cross bracket, i.e.
    /// `(a_j ∧ b_k − a_k ∧ b_j)` on component `i`.
    pub fn bracket(&self, other: &ConnectionForm) -> [Form; 3] {
        std::array::from_fn(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            self.a[j].wedge(&other.a[k]) - self.a[k].wedge(&other.a[j])
        })
    }
}

/// `Σ_j o_ij x_j` for a triple of forms.
pub fn rotate3(x: &[Form; 3], o: &Matrix3<f64>) -> [Form; 3] {
    std::array::from_fn(|i| {
        let mut acc = Form::zero(x[0].deg());
        for (j, xj) in x.iter().enumerate() {
            acc += &(*xj * o[(i, j)]);
        }
        acc
    })
}

/// Checks `⟨Φ_i, Φ_j⟩ = 2δ_ij` and `*Φ_i = Φ_i`.
pub fn check_frame(metric: &MetricAt, frame: &[Form; 3]) -> Result<()> {
    let mut dev = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 2.0 } else { 0.0 };
            dev = dev.max((metric.inner(&frame[i], &frame[j]) - target).abs());
        }
        dev = dev.max((metric.hodge(&frame[i]) - frame[i]).max_abs());
    }
    if dev > FRAME_TOL {
        Err(AleError::FrameNotOrthonormal { deviation: dev })
    } else {
        Ok(())
    }
}

/// Exterior derivative of a triple of form fields.
pub fn d3<F>(fd: &Fd, field: &F, p: &Point) -> Result<[Form; 3]>
where
    F: Fn(&Point) -> Result<[Form; 3]> + ?Sized,
{
    let grad: [[Form; 3]; 4] = fd.gradient(field, p)?;
    let deg = grad[0][0].deg();
    Ok(std::array::from_fn(|n| {
        let mut out = Form::zero(deg + 1);
        for (i, gi) in grad.iter().enumerate() {
            for k in masks(deg) {
                if k & (1 << i) == 0 {
                    out[k | (1 << i)] += merge_sign(1 << i, k) * gi[n][k];
                }
            }
        }
        out
    }))
}

/// Levi-Civita connection of the frame at `p`.
pub fn connection_from_phi<F>(fd: &Fd, frame: &F, p: &Point) -> Result<ConnectionForm>
where
    F: Fn(&Point) -> Result<TripleAt> + ?Sized,
{
    let (metric, phi) = frame(p)?;
    check_frame(&metric, &phi)?;
    let starred = |q: &Point| -> Result<[Form; 3]> {
        let (m, f) = frame(q)?;
        Ok(std::array::from_fn(|i| m.hodge(&f[i])))
    };
    let d_star = d3(fd, &starred, p)?;
    let codiff: [Form; 3] = std::array::from_fn(|i| -metric.hodge(&d_star[i]));
    let j: [Mat4; 3] = std::array::from_fn(|i| metric.j_covector(&phi[i]));
    Ok(ConnectionForm {
        a: std::array::from_fn(|i| {
            let (n1, n2) = ((i + 1) % 3, (i + 2) % 3);
            (codiff[i] + codiff[n1].map_covector(&j[n2]) - codiff[n2].map_covector(&j[n1])) * 0.5
        }),
    })
}

/// Curvature `R_i = da_i + a_j ∧ a_k` of a connection field at `p`.
pub fn curvature_of<F>(fd: &Fd, connection: &F, p: &Point) -> Result<[Form; 3]>
where
    F: Fn(&Point) -> Result<ConnectionForm> + ?Sized,
{
    let field = |q: &Point| connection(q).map(|c| c.a);
    let da = d3(fd, &field, p)?;
    let a = connection(p)?;
    let quad = a.bracket(&a);
    Ok(std::array::from_fn(|i| da[i] + quad[i] * 0.5))
}

/// Curvature of the Levi-Civita connection of a frame field.
pub fn curvature_from_phi<F>(fd: &Fd, frame: &F, p: &Point) -> Result<[Form; 3]>
where
    F: Fn(&Point) -> Result<TripleAt> + ?Sized,
{
    let conn = |q: &Point| connection_from_phi(fd, frame, q);
    curvature_of(fd, &conn, p)
}

/// Largest component of `dΦ_i − a_k ∧ Φ_j + a_j ∧ Φ_k` over cyclic `(i, j, k)`.
pub fn torsion_residual<F>(fd: &Fd, frame: &F, a: &ConnectionForm, p: &Point) -> Result<f64>
where
    F: Fn(&Point) -> Result<TripleAt> + ?Sized,
{
    let phi_field = |q: &Point| frame(q).map(|s| s.1);
    let dphi = d3(fd, &phi_field, p)?;
    let (_, phi) = frame(p)?;
    let mut worst = 0.0_f64;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let r = dphi[i] - a.a[k].wedge(&phi[j]) + a.a[j].wedge(&phi[k]);
        worst = worst.max(r.max_abs());
    }
    Ok(worst)
}

/// Curvature operator blocks at a point.
///
/// `rplus[i][j] = R_ij` with `R_i^+ = Σ_j R_ij Φ_j`; `rminus[i][j]` are the
/// components of `R_i^-` on the anti-self-dual coframe basis; `scal` is the
/// scalar curvature. Conventions: `R = −𝐑` and `⟨Φ_i, Φ_j⟩ = 2δ_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBlock {
    pub rplus: [[f64; 3]; 3],
    pub rminus: [[f64; 3]; 3],
    pub scal: f64,
}

impl CurvatureBlock {
    pub fn zero() -> Self {
        CurvatureBlock {
            rplus: [[0.0; 3]; 3],
            rminus: [[0.0; 3]; 3],
            scal: 0.0,
        }
    }

    pub fn rplus_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rplus[i][j])
    }

    pub fn rminus_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rminus[i][j])
    }

    pub fn max_abs(&self) -> f64 {
        let m = self
            .rplus
            .iter()
            .chain(self.rminus.iter())
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        m.max(self.scal.abs())
    }

    /// Conventions attached to every block.
    pub const CONVENTION: &'static str =
        "R is the bundle curvature (R = -bold R); <w_i, w_j> = 2 delta_ij";
}

/// Splits curvature forms into blocks.
pub fn decompose(r: &[Form; 3], metric: &MetricAt, frame: &[Form; 3]) -> CurvatureBlock {
    let asd = metric.asd_basis();
    let mut rplus = [[0.0; 3]; 3];
    let mut rminus = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rplus[i][j] = 0.5 * metric.inner(&r[i], &frame[j]);
            rminus[i][j] = 0.5 * metric.inner(&r[i], &asd[j]);
        }
    }
    let trace = rplus[0][0] + rplus[1][1] + rplus[2][2];
    CurvatureBlock {
        rplus,
        rminus,
        scal: -4.0 * trace,
    }
}

/// Trace-free Ricci tensor from the anti-self-dual parts of the curvature forms,
/// `Ric₀ = Σ_i R_i^- ∘ Φ_i` lowered to a bilinear form. The unit scale is fixed
/// against a finite-difference Ricci tensor (see the tests).
pub fn ric0_from_curvature(r: &[Form; 3], metric: &MetricAt, frame: &[Form; 3]) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..3 {
        let (_, minus) = metric.split_sd(&r[i]);
        out += minus.to_matrix() * metric.inv * frame[i].to_matrix();
    }
    (out + out.transpose()) * 0.5
}

impl Linear for ConnectionForm {
    fn zero_like(&self) -> Self {
        ConnectionForm::zero()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        self.a.axpy(a, &x.a);
    }
}
