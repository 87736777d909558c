//! Centered finite differences on chart fields.

use super::forms::{masks, merge_sign, Form, Mat4, MetricAt, Point};
use crate::error::{AleError, Result};

/// Values that can be combined linearly by a stencil.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    fn axpy(&mut self, a: f64, x: &Self);
}

impl Linear for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

impl Linear for Form {
    fn zero_like(&self) -> Self {
        Form::zero(self.deg())
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += &(*x * a);
    }
}

impl Linear for Mat4 {
    fn zero_like(&self) -> Self {
        Mat4::zeros()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
}

impl<T: Linear, const N: usize> Linear for [T; N] {
    fn zero_like(&self) -> Self {
        std::array::from_fn(|i| self[i].zero_like())
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            s.axpy(a, v);
        }
    }
}

impl<T: Linear> Linear for Vec<T> {
    fn zero_like(&self) -> Self {
        self.iter().map(Linear::zero_like).collect()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            s.axpy(a, v);
        }
    }
}

/// Stencil accuracy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Plain centered differences, error O(h²).
    Second,
    /// Richardson-extrapolated centered differences, error O(h⁴).
    Fourth,
}

/// Finite-difference step and accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fd {
    pub h: f64,
    pub order: Order,
}

impl Default for Fd {
    fn default() -> Self {
        Fd {
            h: 1e-3,
            order: Order::Fourth,
        }
    }
}

const FIRST2: [(f64, f64); 2] = [(-1.0, -0.5), (1.0, 0.5)];
const FIRST4: [(f64, f64); 4] = [
    (-2.0, 1.0 / 12.0),
    (-1.0, -8.0 / 12.0),
    (1.0, 8.0 / 12.0),
    (2.0, -1.0 / 12.0),
];
const SECOND2: [(f64, f64); 3] = [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)];
const SECOND4: [(f64, f64); 5] = [
    (-2.0, -1.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (2.0, -1.0 / 12.0),
];

fn shifted(p: &Point, dir: usize, by: f64) -> Point {
    let mut q = *p;
    q[dir] += by;
    q
}

fn tag<T>(r: Result<T>, p: &Point) -> Result<T> {
    r.map_err(|e| match e {
        AleError::EvaluationDomain(_) => e,
        other => AleError::EvaluationDomain(format!("stencil point {p:?}: {other}")),
    })
}

impl Fd {
    pub fn new(h: f64) -> Self {
        Fd { h, ..Fd::default() }
    }

    pub fn second_order(h: f64) -> Self {
        Fd {
            h,
            order: Order::Second,
        }
    }

    /// Step scaled with the coordinate magnitude of `p` for far-field work.
    pub fn at_scale_of(self, p: &Point, spatial: usize) -> Self {
        let mag = p[..spatial].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Fd {
            h: self.h * mag.max(1.0),
            ..self
        }
    }

    fn first_stencil(&self) -> &'static [(f64, f64)] {
        match self.order {
            Order::Second => &FIRST2,
            Order::Fourth => &FIRST4,
        }
    }

    fn second_stencil(&self) -> &'static [(f64, f64)] {
        match self.order {
            Order::Second => &SECOND2,
            Order::Fourth => &SECOND4,
        }
    }

    /// Partial derivative along coordinate `i`.
    pub fn partial<T: Linear, F>(&self, f: &F, p: &Point, i: usize) -> Result<T>
    where
        F: Fn(&Point) -> Result<T> + ?Sized,
    {
        let mut acc: Option<T> = None;
        for &(off, w) in self.first_stencil() {
            let q = shifted(p, i, off * self.h);
            let v = tag(f(&q), &q)?;
            match acc.as_mut() {
                None => {
                    let mut z = v.zero_like();
                    z.axpy(w / self.h, &v);
                    acc = Some(z);
                }
                Some(a) => a.axpy(w / self.h, &v),
            }
        }
        Ok(acc.expect("nonempty stencil"))
    }

    /// All four partial derivatives.
    pub fn gradient<T: Linear, F>(&self, f: &F, p: &Point) -> Result<[T; 4]>
    where
        F: Fn(&Point) -> Result<T> + ?Sized,
    {
        Ok([
            self.partial(f, p, 0)?,
            self.partial(f, p, 1)?,
            self.partial(f, p, 2)?,
            self.partial(f, p, 3)?,
        ])
    }

    /// Second partial derivative along `i` and `j`.
    pub fn second<T: Linear, F>(&self, f: &F, p: &Point, i: usize, j: usize) -> Result<T>
    where
        F: Fn(&Point) -> Result<T> + ?Sized,
    {
        let h2 = self.h * self.h;
        let mut acc: Option<T> = None;
        let mut push = |w: f64, v: T| match acc.as_mut() {
            None => {
                let mut z = v.zero_like();
                z.axpy(w, &v);
                acc = Some(z);
            }
            Some(a) => a.axpy(w, &v),
        };
        if i == j {
            for &(off, w) in self.second_stencil() {
                let q = shifted(p, i, off * self.h);
                push(w / h2, tag(f(&q), &q)?);
            }
        } else {
            for &(oi, wi) in self.first_stencil() {
                for &(oj, wj) in self.first_stencil() {
                    let q = shifted(&shifted(p, i, oi * self.h), j, oj * self.h);
                    push(wi * wj / h2, tag(f(&q), &q)?);
                }
            }
        }
        Ok(acc.expect("nonempty stencil"))
    }

    /// Symmetric matrix of second derivatives.
    pub fn hessian<T: Linear, F>(&self, f: &F, p: &Point) -> Result<[[T; 4]; 4]>
    where
        F: Fn(&Point) -> Result<T> + ?Sized,
    {
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(4);
        for i in 0..4 {
            let mut row = Vec::with_capacity(4);
            for j in 0..4 {
                if j < i {
                    row.push(rows[j][i].clone());
                } else {
                    row.push(self.second(f, p, i, j)?);
                }
            }
            rows.push(row);
        }
        let mut it = rows.into_iter().map(|r| {
            let mut r = r.into_iter();
            std::array::from_fn(|_| r.next().expect("four columns"))
        });
        Ok(std::array::from_fn(|_| it.next().expect("four rows")))
    }

    /// Exterior derivative of a form field.
    pub fn d<F>(&self, field: &F, p: &Point) -> Result<Form>
    where
        F: Fn(&Point) -> Result<Form> + ?Sized,
    {
        let grad: [Form; 4] = self.gradient(field, p)?;
        let deg = grad[0].deg();
        let mut out = Form::zero(deg + 1);
        for (i, gi) in grad.iter().enumerate() {
            for k in masks(deg) {
                if k & (1 << i) == 0 {
                    out[k | (1 << i)] += merge_sign(1 << i, k) * gi[k];
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative of a scalar field.
    pub fn d_scalar<F>(&self, f: &F, p: &Point) -> Result<Form>
    where
        F: Fn(&Point) -> Result<f64> + ?Sized,
    {
        Ok(Form::covector(self.gradient(f, p)?))
    }

    /// Codifferential `d* = −*d*` of a form field for a metric field.
    pub fn codiff<M, F>(&self, metric: &M, field: &F, p: &Point) -> Result<Form>
    where
        M: Fn(&Point) -> Result<MetricAt> + ?Sized,
        F: Fn(&Point) -> Result<Form> + ?Sized,
    {
        let starred = |q: &Point| -> Result<Form> { Ok(metric(q)?.hodge(&field(q)?)) };
        let ds = self.d(&starred, p)?;
        Ok(-metric(p)?.hodge(&ds))
    }

    /// Laplace-Beltrami operator `Δ = d*d` on functions (non-negative spectrum).
    pub fn laplacian<M, F>(&self, metric: &M, f: &F, p: &Point) -> Result<f64>
    where
        M: Fn(&Point) -> Result<MetricAt> + ?Sized,
        F: Fn(&Point) -> Result<f64> + ?Sized,
    {
        let df = |q: &Point| self.d_scalar(f, q);
        Ok(self.codiff(metric, &df, p)?[0])
    }
}
