//! Deformations of a self-dual 2-form frame: the metric induced by a triple,
//! explicit deformation families on flat space, first- and second-order
//! connection and curvature terms, the Bianchi gauge operator, and the
//! harmonic 1-forms `α_i = ½ J_i dm` on a Gibbons-Hawking space.

use super::connection::{connection_from_phi, curvature_from_phi, d3, ConnectionForm, TripleAt};
use super::fd::Fd;
use super::forms::{flat_asd_triple, flat_sd_triple, Form, Mat4, MetricAt, Point};
use super::riemann::MetricJet;
use crate::error::{AleError, Result};
use crate::gh_space::{j_dm, metric_components, triple_components, GHConfig, Patch};
use crate::poly::{monomials, Poly, PolyForm};
use nalgebra::{DMatrix, Matrix3, Matrix6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Tolerance on the gauge condition `Σ J_i *dφ_i + dλ = 0`.
pub const GAUGE_TOL: f64 = 1e-6;

fn perm_sign(p: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Metric whose self-dual forms are spanned by `phi`, scaled so that
/// `Φ_1 ∧ Φ_1 = 2 vol_g`.
pub fn urbantke_metric(phi: &[Form; 3]) -> Result<MetricAt> {
    let m: [Mat4; 3] = std::array::from_fn(|i| phi[i].to_matrix());
    let mut eps4 = Vec::with_capacity(24);
    for c in 0..4 {
        for d in 0..4 {
            for e in 0..4 {
                for f in 0..4 {
                    let s = perm_sign(&[c, d, e, f]);
                    if s != 0.0 {
                        eps4.push((c, d, e, f, s));
                    }
                }
            }
        }
    }
    let mut u = Mat4::zeros();
    for a in 0..4 {
        for b in a..4 {
            let mut acc = 0.0;
            for &(i, j, k) in &[
                (0, 1, 2),
                (1, 2, 0),
                (2, 0, 1),
                (0, 2, 1),
                (2, 1, 0),
                (1, 0, 2),
            ] {
                let s3 = perm_sign(&[i, j, k]);
                for &(c, d, e, f, s4) in &eps4 {
                    acc += s3 * s4 * m[i][(a, c)] * m[j][(b, d)] * m[k][(e, f)];
                }
            }
            u[(a, b)] = acc;
            u[(b, a)] = acc;
        }
    }
    if u.trace() < 0.0 {
        u = -u;
    }
    let raw = MetricAt::new(u)?;
    let target = 0.5 * phi[0].wedge(&phi[0])[15];
    if !(target > 0.0) {
        return Err(AleError::SingularMetric);
    }
    MetricAt::new(u * (target / raw.sqrt_det).sqrt())
}

/// Coefficients of a deformation on flat R⁴: a conformal factor `λ` and the
/// anti-self-dual forms `φ_i = Σ_a φ_ai ψ_a` with `ψ` the flat ASD triple.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationFamily {
    pub lambda: Poly,
    /// `phi[a][i] = φ_ai`.
    pub phi: [[Poly; 3]; 3],
}

impl DeformationFamily {
    pub fn zero() -> Self {
        DeformationFamily {
            lambda: Poly::zero(),
            phi: Default::default(),
        }
    }

    /// Generator `[[λ, −φᵀ], [−φ, λ]]` acting on `(ω_1..3, ψ_1..3)`.
    pub fn generator(&self, p: &Point) -> Matrix6<f64> {
        let lam = self.lambda.eval(p);
        let mut m = Matrix6::identity() * lam;
        for a in 0..3 {
            for i in 0..3 {
                let v = -self.phi[a][i].eval(p);
                m[(i, 3 + a)] = v;
                m[(3 + a, i)] = v;
            }
        }
        m
    }

    /// Deformed self-dual and anti-self-dual frames `exp(tM)(ω, ψ)`.
    pub fn frames(&self, t: f64, p: &Point) -> ([Form; 3], [Form; 3]) {
        let e = (self.generator(p) * t).exp();
        let omega = flat_sd_triple();
        let psi = flat_asd_triple();
        let row = |r: usize| {
            let mut f = Form::zero(2);
            for j in 0..3 {
                f += &(omega[j] * e[(r, j)]);
                f += &(psi[j] * e[(r, 3 + j)]);
            }
            f
        };
        (
            std::array::from_fn(row),
            std::array::from_fn(|a| row(3 + a)),
        )
    }

    /// Deformed metric and self-dual frame at `p`.
    pub fn triple(&self, t: f64, p: &Point) -> Result<TripleAt> {
        let (phi, _) = self.frames(t, p);
        Ok((urbantke_metric(&phi)?, phi))
    }

    /// The forms `φ_i` with polynomial coefficients.
    pub fn phi_forms(&self) -> [PolyForm; 3] {
        let psi = flat_asd_triple();
        std::array::from_fn(|i| {
            (0..3).fold(PolyForm::zero(2), |acc, a| {
                acc + PolyForm::from_form(&psi[a], &self.phi[a][i])
            })
        })
    }

    /// `Σ_i J_i *dφ_i + dλ`.
    pub fn gauge(&self) -> PolyForm {
        let omega = flat_sd_triple();
        let flat = MetricAt::euclidean();
        let dl = PolyForm::from_form(&Form::scalar(1.0), &self.lambda).d();
        self.phi_forms()
            .iter()
            .zip(omega.iter())
            .fold(dl, |acc, (f, w)| {
                acc + f.d().hodge().map_covector(&flat.j_covector(w))
            })
    }

    /// `d_-*dφ_i`, the first-order trace-free Ricci curvature.
    pub fn einstein_defect(&self) -> [PolyForm; 3] {
        self.phi_forms().map(|f| f.d().hodge().d().split().1)
    }

    /// `a_i^(1) = *dφ_i`, valid when [`Self::gauge`] vanishes.
    pub fn first_connection(&self) -> [PolyForm; 3] {
        self.phi_forms().map(|f| f.d().hodge())
    }

    /// `R_i^(1) = d*dφ_i`.
    pub fn first_curvature(&self) -> [PolyForm; 3] {
        self.first_connection().map(|a| a.d())
    }

    /// Coefficients `R_ij` of `(R_i^(1))_+ = Σ_j R_ij ω_j`.
    pub fn first_rplus(&self) -> [[Poly; 3]; 3] {
        let omega = flat_sd_triple();
        let r = self.first_curvature();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                r[i].inner(&PolyForm::from_form(&omega[j], &Poly::constant(1.0)))
                    .scale(0.5)
            })
        })
    }

    /// Symmetric 2-tensor `Σ_i φ_i ∘ ω_i` lowered with the flat metric.
    pub fn metric_variation(&self, p: &Point) -> Mat4 {
        let phi = self.phi_forms().map(|f| f.eval(p));
        sym_from_pairs(&MetricAt::euclidean(), &phi, &flat_sd_triple())
    }

    fn unknown_count(
        phi_degs: &[u8],
        lambda_degs: &[u8],
    ) -> (Vec<(usize, usize, [u8; 4])>, Vec<[u8; 4]>) {
        let mut phi = Vec::new();
        for a in 0..3 {
            for i in 0..3 {
                for &d in phi_degs {
                    for e in monomials(d) {
                        phi.push((a, i, e));
                    }
                }
            }
        }
        let lam = lambda_degs.iter().flat_map(|&d| monomials(d)).collect();
        (phi, lam)
    }

    /// Random family with homogeneous coefficients of degree `deg` satisfying the
    /// gauge condition, and the first-order Einstein condition when `einstein`.
    pub fn random_constrained(deg: u8, einstein: bool, seed: u64) -> Result<Self> {
        let (phi_unknowns, lam_unknowns) = Self::unknown_count(&[deg], &[deg]);
        let n = phi_unknowns.len() + lam_unknowns.len();
        let unit = |j: usize| {
            let mut fam = DeformationFamily::zero();
            if j < phi_unknowns.len() {
                let (a, i, e) = phi_unknowns[j];
                fam.phi[a][i] = Poly::monomial(e, 1.0);
            } else {
                fam.lambda = Poly::monomial(lam_unknowns[j - phi_unknowns.len()], 1.0);
            }
            fam
        };
        let mut rows: BTreeMap<(usize, usize, [u8; 4]), usize> = BTreeMap::new();
        let mut entries = Vec::new();
        for j in 0..n {
            let fam = unit(j);
            let mut constraints = vec![fam.gauge()];
            if einstein {
                constraints.extend(fam.einstein_defect());
            }
            for (tag, c) in constraints.iter().enumerate() {
                for mask in 0..16 {
                    for (e, v) in c.component(mask).terms() {
                        let next = rows.len();
                        let r = *rows.entry((tag, mask, *e)).or_insert(next);
                        entries.push((r, j, *v));
                    }
                }
            }
        }
        let m = rows.len().max(n);
        let mut a = DMatrix::<f64>::zeros(m, n);
        for (r, j, v) in entries {
            a[(r, j)] += v;
        }
        let svd = a.svd(false, true);
        let vt = svd.v_t.ok_or(AleError::FitUnstable {
            condition: f64::INFINITY,
        })?;
        let smax = svd.singular_values.max();
        let null: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&r| svd.singular_values[r] <= 1e-10 * smax)
            .collect();
        if null.is_empty() {
            return Err(AleError::FitUnstable {
                condition: f64::INFINITY,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![0.0; n];
        for &r in &null {
            let w: f64 = rng.random_range(-1.0..1.0);
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += w * vt[(r, j)];
            }
        }
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let mut fam = DeformationFamily::zero();
        for (j, c) in coeffs.iter().enumerate() {
            let c = c / scale;
            if j < phi_unknowns.len() {
                let (a, i, e) = phi_unknowns[j];
                fam.phi[a][i].add_term(e, c);
            } else {
                fam.lambda.add_term(lam_unknowns[j - phi_unknowns.len()], c);
            }
        }
        Ok(fam)
    }

    /// Connection of the deformed frame at parameter `t`.
    pub fn connection(&self, fd: &Fd, t: f64, p: &Point) -> Result<ConnectionForm> {
        let frame = |q: &Point| self.triple(t, q);
        connection_from_phi(fd, &frame, p)
    }

    /// Taylor coefficients `a^(1)`, `a^(2)` of the connection in `t`, by finite
    /// differences with step `fd_t.h`.
    pub fn connection_coefficients(
        &self,
        fd: &Fd,
        fd_t: &Fd,
        p: &Point,
    ) -> Result<(ConnectionForm, ConnectionForm)> {
        let along = |s: &Point| self.connection(fd, s[0], p);
        let origin = [0.0; 4];
        let first = fd_t.partial(&along, &origin, 0)?;
        let second: ConnectionForm = fd_t.second(&along, &origin, 0, 0)?;
        Ok((
            first,
            ConnectionForm {
                a: second.a.map(|f| f * 0.5),
            },
        ))
    }

    /// Components `½⟨R_i(t), Ψ_a(t)⟩` of the anti-self-dual curvature of the
    /// deformed metric in the deformed anti-self-dual frame.
    pub fn rminus(&self, fd: &Fd, t: f64, p: &Point) -> Result<Matrix3<f64>> {
        let frame = |q: &Point| self.triple(t, q);
        let r = curvature_from_phi(fd, &frame, p)?;
        let (metric, _) = self.triple(t, p)?;
        let (_, psi) = self.frames(t, p);
        Ok(Matrix3::from_fn(|i, a| 0.5 * metric.inner(&r[i], &psi[a])))
    }

    /// Second Taylor coefficient of [`Self::rminus`] in `t`.
    pub fn rminus_second(&self, fd: &Fd, fd_t: &Fd, p: &Point) -> Result<Matrix3<f64>> {
        let along = |s: &Point| -> Result<Mat4> {
            let m = self.rminus(fd, s[0], p)?;
            Ok(Mat4::from_fn(
                |i, j| if i < 3 && j < 3 { m[(i, j)] } else { 0.0 },
            ))
        };
        let second: Mat4 = fd_t.second(&along, &[0.0; 4], 0, 0)?;
        Ok(Matrix3::from_fn(|i, j| 0.5 * second[(i, j)]))
    }
}

/// `sym Σ_i φ_i ∘ ω_i` lowered to a bilinear form.
pub fn sym_from_pairs(metric: &MetricAt, phi: &[Form; 3], frame: &[Form; 3]) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..3 {
        out += phi[i].to_matrix() * metric.inv * frame[i].to_matrix();
    }
    (out + out.transpose()) * 0.5
}

/// First-order connection and curvature `a_i = *dφ_i`, `R_i = d*dφ_i` for a
/// deformation of a hyperkähler frame, after checking the gauge condition.
pub fn deformation_first_order<B, L, P>(
    fd: &Fd,
    background: &B,
    lambda: &L,
    phi: &P,
    p: &Point,
) -> Result<(ConnectionForm, [Form; 3])>
where
    B: Fn(&Point) -> Result<TripleAt> + ?Sized,
    L: Fn(&Point) -> Result<f64> + ?Sized,
    P: Fn(&Point) -> Result<[Form; 3]> + ?Sized,
{
    let residual = gauge_residual(fd, background, lambda, phi, p)?;
    if residual > GAUGE_TOL {
        return Err(AleError::GaugeViolation { residual });
    }
    let star_d = |q: &Point| -> Result<[Form; 3]> {
        let (metric, _) = background(q)?;
        let dphi = d3(fd, phi, q)?;
        Ok(dphi.map(|f| metric.hodge(&f)))
    };
    let a = star_d(p)?;
    let r = d3(fd, &star_d, p)?;
    Ok((ConnectionForm { a }, r))
}

/// Largest component of `Σ_i J_i *dφ_i + dλ`.
pub fn gauge_residual<B, L, P>(
    fd: &Fd,
    background: &B,
    lambda: &L,
    phi: &P,
    p: &Point,
) -> Result<f64>
where
    B: Fn(&Point) -> Result<TripleAt> + ?Sized,
    L: Fn(&Point) -> Result<f64> + ?Sized,
    P: Fn(&Point) -> Result<[Form; 3]> + ?Sized,
{
    let (metric, omega) = background(p)?;
    let dphi = d3(fd, phi, p)?;
    let mut g = fd.d_scalar(lambda, p)?;
    for i in 0..3 {
        g += &metric
            .hodge(&dphi[i])
            .map_covector(&metric.j_covector(&omega[i]));
    }
    Ok(g.max_abs())
}

/// Anti-self-dual part of the second-order curvature of a first-order Einstein
/// deformation, `d_-a^(2) + ½[a^(1), a^(1)]_- + φ(R_+^(1))` with
/// `φ(R_+)_i = Σ_j R_ij φ_j`. The sign of the last term is the one measured
/// against the family oracle for the generator `[[λ, −φᵀ], [−φ, λ]]`.
pub fn ric0_second_order<A>(
    fd: &Fd,
    metric: &MetricAt,
    a1: &ConnectionForm,
    a2: &A,
    phi: &[Form; 3],
    rplus1: &Matrix3<f64>,
    p: &Point,
) -> Result<[Form; 3]>
where
    A: Fn(&Point) -> Result<ConnectionForm> + ?Sized,
{
    let field = |q: &Point| a2(q).map(|c| c.a);
    let da2 = d3(fd, &field, p)?;
    let quad = a1.bracket(a1);
    Ok(std::array::from_fn(|i| {
        let mut phi_r = Form::zero(2);
        for j in 0..3 {
            phi_r += &(phi[j] * rplus1[(i, j)]);
        }
        metric.split_sd(&(da2[i] + quad[i] * 0.5)).1 + phi_r
    }))
}

/// Bianchi operator `B h = δh + ½ d Tr h` with `(δh)_b = −g^{ac} ∇_a h_cb`.
pub fn bianchi_gauge<G, H>(fd: &Fd, metric: &G, h: &H, p: &Point) -> Result<Form>
where
    G: Fn(&Point) -> Result<Mat4> + ?Sized,
    H: Fn(&Point) -> Result<Mat4> + ?Sized,
{
    let jet = MetricJet::from_field(fd, metric, p)?;
    let gamma = jet.christoffel();
    let inv = jet.metric.inv;
    let hp = h(p)?;
    let dh: [Mat4; 4] = fd.gradient(h, p)?;
    let trace = |q: &Point| -> Result<f64> { Ok((MetricAt::new(metric(q)?)?.inv * h(q)?).trace()) };
    let dtr = fd.gradient(&trace, p)?;
    let mut out = [0.0; 4];
    for (b, ob) in out.iter_mut().enumerate() {
        let mut div = 0.0;
        for a in 0..4 {
            for c in 0..4 {
                let mut cov = dh[a][(c, b)];
                for e in 0..4 {
                    cov -= gamma[e][a][c] * hp[(e, b)] + gamma[e][a][b] * hp[(c, e)];
                }
                div += inv[(a, c)] * cov;
            }
        }
        *ob = -div + 0.5 * dtr[b];
    }
    Ok(Form::covector(out))
}

/// `½ J_i dm` on a Gibbons-Hawking chart.
pub fn gh_alpha(cfg: &GHConfig, p: &Point, patch: Patch, i: usize) -> Result<Form> {
    Ok(j_dm(cfg, p, patch, i)? * 0.5)
}

/// Connection `a = Σ_{i,j ∈ {2,3}} R_ij α_j ⊗ v_i` built from a symmetric block
/// `[[R22, R23], [R23, R33]]`.
pub fn gh_first_order_connection(
    cfg: &GHConfig,
    block: &[[f64; 2]; 2],
    p: &Point,
    patch: Patch,
) -> Result<ConnectionForm> {
    let al = [gh_alpha(cfg, p, patch, 1)?, gh_alpha(cfg, p, patch, 2)?];
    let comp = |row: usize| al[0] * block[row][0] + al[1] * block[row][1];
    Ok(ConnectionForm {
        a: [Form::zero(1), comp(0), comp(1)],
    })
}

/// Residuals of `dα_i = ω_i` (i = 2, 3) and `d*α_i = 0` (i = 1, 2, 3) at a point.
pub fn gh_alpha_residuals(cfg: &GHConfig, p: &Point, patch: Patch, fd: &Fd) -> Result<(f64, f64)> {
    let metric = |q: &Point| MetricAt::new(metric_components(cfg, q, patch)?);
    let omega = triple_components(cfg, p, patch)?;
    let mut closed = 0.0_f64;
    let mut coclosed = 0.0_f64;
    for i in 0..3 {
        let field = |q: &Point| gh_alpha(cfg, q, patch, i);
        if i > 0 {
            closed = closed.max((fd.d(&field, p)? - omega[i]).max_abs());
        }
        coclosed = coclosed.max(fd.codiff(&metric, &field, p)?.max_abs());
    }
    Ok((closed, coclosed))
}

/// `|∂_r ⌟ α_i|` with `∂_r = dr♯/|dr|²` and `r = √(2nρ)` the asymptotic radius.
pub fn radial_contraction(cfg: &GHConfig, p: &Point, patch: Patch, i: usize) -> Result<f64> {
    let metric = MetricAt::new(metric_components(cfg, p, patch)?)?;
    let rho = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let n = cfg.total_multiplicity() as f64;
    let scale = (2.0 * n).sqrt() / (2.0 * rho.sqrt() * rho);
    let dr = Form::covector([scale * p[0], scale * p[1], scale * p[2], 0.0]);
    let alpha = gh_alpha(cfg, p, patch, i)?;
    Ok((metric.inner(&alpha, &dr) / metric.inner(&dr, &dr)).abs())
}

#[cfg(test)]
mod tests;
