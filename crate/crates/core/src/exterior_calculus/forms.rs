//! Pointwise exterior algebra on a 4-dimensional chart.
//!
//! A form of degree `p` stores one component per increasing index set,
//! addressed by a bitmask over the four chart coordinates. The chart
//! orientation is `dx0 ∧ dx1 ∧ dx2 ∧ dx3`.

use crate::error::{AleError, Result};
use nalgebra::Matrix4;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// Chart point.
pub type Point = [f64; 4];
/// Dense 4×4 matrix (metrics, endomorphisms, 2-form component matrices).
pub type Mat4 = Matrix4<f64>;

/// Number of indices in a mask.
pub fn grade(mask: usize) -> usize {
    (mask as u32).count_ones() as usize
}

/// Masks of the given degree in increasing order.
pub fn masks(deg: usize) -> impl Iterator<Item = usize> {
    (0..16usize).filter(move |&m| grade(m) == deg)
}

/// Number of independent components of a form of degree `deg`.
pub fn component_count(deg: usize) -> usize {
    [1, 4, 6, 4, 1][deg]
}

fn indices(mask: usize) -> Vec<usize> {
    (0..4).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the shuffle that sorts the concatenation of two disjoint index sets.
pub fn merge_sign(a: usize, b: usize) -> f64 {
    let mut inversions = 0;
    for i in 0..4 {
        if a & (1 << i) != 0 {
            inversions += (0..i).filter(|j| b & (1 << j) != 0).count();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Determinant of the submatrix with the given row and column masks.
pub fn minor(m: &Mat4, rows: usize, cols: usize) -> f64 {
    let r = indices(rows);
    let c = indices(cols);
    debug_assert_eq!(r.len(), c.len());
    small_det(&r, &c, m)
}

fn small_det(r: &[usize], c: &[usize], m: &Mat4) -> f64 {
    match r.len() {
        0 => 1.0,
        1 => m[(r[0], c[0])],
        2 => m[(r[0], c[0])] * m[(r[1], c[1])] - m[(r[0], c[1])] * m[(r[1], c[0])],
        n => {
            let mut acc = 0.0;
            for j in 0..n {
                let sub_c: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &x)| x)
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * m[(r[0], c[j])] * small_det(&r[1..], &sub_c, m);
            }
            acc
        }
    }
}

/// A differential form at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Form {
    deg: usize,
    c: [f64; 16],
}

impl Form {
    pub fn zero(deg: usize) -> Self {
        assert!(deg <= 4, "form degree {deg} out of range");
        Form { deg, c: [0.0; 16] }
    }

    pub fn scalar(v: f64) -> Self {
        let mut f = Form::zero(0);
        f.c[0] = v;
        f
    }

    /// 1-form from covector components.
    pub fn covector(v: [f64; 4]) -> Self {
        let mut f = Form::zero(1);
        for (i, x) in v.iter().enumerate() {
            f.c[1 << i] = *x;
        }
        f
    }

    /// Coordinate basis 1-form `dx^i`.
    pub fn dx(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Form::covector(v)
    }

    /// 2-form `Σ s·dx^i∧dx^j` over the listed triples.
    pub fn two(terms: &[(usize, usize, f64)]) -> Self {
        let mut f = Form::zero(2);
        for &(i, j, s) in terms {
            f.add2(i, j, s);
        }
        f
    }

    /// Top form `v·dx0∧dx1∧dx2∧dx3`.
    pub fn top(v: f64) -> Self {
        let mut f = Form::zero(4);
        f.c[15] = v;
        f
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    /// Components in increasing mask order.
    pub fn components(&self) -> Vec<f64> {
        masks(self.deg).map(|m| self.c[m]).collect()
    }

    pub fn from_components(deg: usize, comps: &[f64]) -> Self {
        assert_eq!(comps.len(), component_count(deg));
        let mut f = Form::zero(deg);
        for (m, v) in masks(deg).zip(comps) {
            f.c[m] = *v;
        }
        f
    }

    pub fn covector_components(&self) -> [f64; 4] {
        debug_assert_eq!(self.deg, 1);
        [self.c[1], self.c[2], self.c[4], self.c[8]]
    }

    /// Antisymmetric component `α(∂_i, ∂_j)` of a 2-form.
    pub fn get2(&self, i: usize, j: usize) -> f64 {
        debug_assert_eq!(self.deg, 2);
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.c[(1 << i) | (1 << j)],
            std::cmp::Ordering::Greater => -self.c[(1 << i) | (1 << j)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Adds `s·dx^i∧dx^j`.
    pub fn add2(&mut self, i: usize, j: usize, s: f64) {
        debug_assert_eq!(self.deg, 2);
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.c[(1 << i) | (1 << j)] += s,
            std::cmp::Ordering::Greater => self.c[(1 << i) | (1 << j)] -= s,
            std::cmp::Ordering::Equal => {}
        }
    }

    /// Matrix `W_ab = α(∂_a, ∂_b)` of a 2-form.
    pub fn to_matrix(&self) -> Mat4 {
        Mat4::from_fn(|i, j| self.get2(i, j))
    }

    /// 2-form from the antisymmetric part of a matrix.
    pub fn from_matrix(m: &Mat4) -> Self {
        let mut f = Form::zero(2);
        for i in 0..4 {
            for j in (i + 1)..4 {
                f.c[(1 << i) | (1 << j)] = 0.5 * (m[(i, j)] - m[(j, i)]);
            }
        }
        f
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let deg = self.deg + other.deg;
        assert!(deg <= 4, "wedge product of degree {deg}");
        let mut out = Form::zero(deg);
        for a in masks(self.deg) {
            if self.c[a] == 0.0 {
                continue;
            }
            for b in masks(other.deg) {
                if a & b == 0 {
                    out.c[a | b] += merge_sign(a, b) * self.c[a] * other.c[b];
                }
            }
        }
        out
    }

    /// Interior product with a vector.
    pub fn interior(&self, v: &[f64; 4]) -> Form {
        assert!(self.deg >= 1);
        let mut out = Form::zero(self.deg - 1);
        for rest in masks(self.deg - 1) {
            let mut acc = 0.0;
            for (i, vi) in v.iter().enumerate() {
                if rest & (1 << i) == 0 {
                    acc += vi * merge_sign(1 << i, rest) * self.c[rest | (1 << i)];
                }
            }
            out.c[rest] = acc;
        }
        out
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Applies a linear map to a 1-form given as a matrix on component columns.
    pub fn map_covector(&self, m: &Mat4) -> Form {
        let v = nalgebra::Vector4::from(self.covector_components());
        let w = m * v;
        Form::covector([w[0], w[1], w[2], w[3]])
    }
}

impl Index<usize> for Form {
    type Output = f64;
    fn index(&self, mask: usize) -> &f64 {
        debug_assert_eq!(grade(mask), self.deg);
        &self.c[mask]
    }
}

impl IndexMut<usize> for Form {
    fn index_mut(&mut self, mask: usize) -> &mut f64 {
        debug_assert_eq!(grade(mask), self.deg);
        &mut self.c[mask]
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, o: &Form) {
        assert_eq!(self.deg, o.deg, "adding forms of different degree");
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
    }
}

impl SubAssign<&Form> for Form {
    fn sub_assign(&mut self, o: &Form) {
        assert_eq!(self.deg, o.deg, "subtracting forms of different degree");
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a -= b;
        }
    }
}

impl Add for Form {
    type Output = Form;
    fn add(mut self, o: Form) -> Form {
        self += &o;
        self
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(mut self, o: Form) -> Form {
        self -= &o;
        self
    }
}

impl Mul<f64> for Form {
    type Output = Form;
    fn mul(mut self, s: f64) -> Form {
        self.c.iter_mut().for_each(|x| *x *= s);
        self
    }
}

impl Mul<Form> for f64 {
    type Output = Form;
    fn mul(self, f: Form) -> Form {
        f * self
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self * -1.0
    }
}

/// A metric at a point with its inverse and volume factor cached.
#[derive(Clone, Copy, Debug)]
pub struct MetricAt {
    pub g: Mat4,
    pub inv: Mat4,
    pub sqrt_det: f64,
    chol: Mat4,
}

impl MetricAt {
    pub fn new(g: Mat4) -> Result<Self> {
        let sym = (g + g.transpose()) * 0.5;
        let chol = sym.cholesky().ok_or(AleError::SingularMetric)?;
        let l = chol.l();
        let inv = chol.inverse();
        let sqrt_det = l.diagonal().product();
        if !sqrt_det.is_finite() || sqrt_det <= 0.0 {
            return Err(AleError::SingularMetric);
        }
        Ok(MetricAt {
            g: sym,
            inv,
            sqrt_det,
            chol: l,
        })
    }

    pub fn euclidean() -> Self {
        MetricAt::new(Mat4::identity()).expect("identity is positive definite")
    }

    /// Oriented orthonormal coframe; row `a` holds the components of `e^a`.
    pub fn coframe(&self) -> Mat4 {
        self.chol.transpose()
    }

    /// Coframe 1-forms.
    pub fn coframe_forms(&self) -> [Form; 4] {
        let e = self.coframe();
        std::array::from_fn(|a| Form::covector([e[(a, 0)], e[(a, 1)], e[(a, 2)], e[(a, 3)]]))
    }

    /// Index-raised components `α^I`.
    fn raise(&self, a: &Form) -> [f64; 16] {
        let mut out = [0.0; 16];
        for i in masks(a.deg) {
            out[i] = masks(a.deg).map(|k| minor(&self.inv, i, k) * a.c[k]).sum();
        }
        out
    }

    /// Hodge star for the chart orientation.
    pub fn hodge(&self, a: &Form) -> Form {
        let up = self.raise(a);
        let mut out = Form::zero(4 - a.deg);
        for i in masks(a.deg) {
            let j = 15 & !i;
            out.c[j] = self.sqrt_det * merge_sign(i, j) * up[i];
        }
        out
    }

    /// Pointwise inner product; `|e^1∧e^2| = 1` for orthonormal `e`.
    pub fn inner(&self, a: &Form, b: &Form) -> f64 {
        assert_eq!(a.deg, b.deg);
        let up = self.raise(a);
        masks(a.deg).map(|m| up[m] * b.c[m]).sum()
    }

    pub fn norm(&self, a: &Form) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    /// Self-dual and anti-self-dual parts of a 2-form.
    pub fn split_sd(&self, a: &Form) -> (Form, Form) {
        let star = self.hodge(a);
        ((*a + star) * 0.5, (*a - star) * 0.5)
    }

    /// Raises a covector.
    pub fn sharp(&self, a: &Form) -> [f64; 4] {
        let v = self.inv * nalgebra::Vector4::from(a.covector_components());
        [v[0], v[1], v[2], v[3]]
    }

    /// Lowers a vector.
    pub fn flat(&self, v: &[f64; 4]) -> Form {
        let w = self.g * nalgebra::Vector4::from(*v);
        Form::covector([w[0], w[1], w[2], w[3]])
    }

    /// Endomorphism `J` of tangent vectors with `ω(X, Y) = g(JX, Y)`.
    pub fn complex_structure(&self, omega: &Form) -> Mat4 {
        -(self.inv * omega.to_matrix())
    }

    /// Induced action on covectors, `Jα = (J α♯)♭`.
    pub fn j_covector(&self, omega: &Form) -> Mat4 {
        -(omega.to_matrix() * self.inv)
    }

    /// Orthonormal self-dual basis built on the coframe, each of norm √2.
    pub fn sd_basis(&self) -> [Form; 3] {
        let e = self.coframe_forms();
        [
            e[0].wedge(&e[1]) + e[2].wedge(&e[3]),
            e[0].wedge(&e[2]) - e[1].wedge(&e[3]),
            e[0].wedge(&e[3]) + e[1].wedge(&e[2]),
        ]
    }

    /// Orthonormal anti-self-dual basis built on the coframe, each of norm √2.
    pub fn asd_basis(&self) -> [Form; 3] {
        let e = self.coframe_forms();
        [
            e[0].wedge(&e[1]) - e[2].wedge(&e[3]),
            e[0].wedge(&e[2]) + e[1].wedge(&e[3]),
            e[0].wedge(&e[3]) - e[1].wedge(&e[2]),
        ]
    }
}

/// The flat self-dual triple `dx0dx1 + dx2dx3`, `dx0dx2 − dx1dx3`, `dx0dx3 + dx1dx2`.
pub fn flat_sd_triple() -> [Form; 3] {
    MetricAt::euclidean().sd_basis()
}

/// The flat anti-self-dual triple matching [`flat_sd_triple`].
pub fn flat_asd_triple() -> [Form; 3] {
    MetricAt::euclidean().asd_basis()
}
