//! Sparse real polynomials in the four chart coordinates, and differential
//! forms with polynomial coefficients on flat R⁴. Used for exact jet
//! arithmetic and for building constrained test fields.

use crate::exterior_calculus::forms::{masks, merge_sign};
use crate::exterior_calculus::{Form, Mat4, Point};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector of a monomial.
pub type Exponent = [u8; 4];

fn unit(i: usize) -> Exponent {
    let mut e = [0; 4];
    e[i] = 1;
    e
}

/// Exponents of all monomials of total degree `deg`, in lexicographic order.
pub fn monomials(deg: u8) -> Vec<Exponent> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=(deg - a) {
            for c in 0..=(deg - a - b) {
                out.push([a, b, c, deg - a - b - c]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Exponent, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial([0; 4], c)
    }

    pub fn var(i: usize) -> Self {
        Poly::monomial(unit(i), 1.0)
    }

    pub fn monomial(e: Exponent, c: f64) -> Self {
        let mut p = Poly::zero();
        p.add_term(e, c);
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &f64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponent) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn degree(&self) -> Option<u8> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &self.terms {
            p.add_term(*e, c * s);
        }
        p
    }

    pub fn deriv(&self, i: usize) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                p.add_term(f, c * e[i] as f64);
            }
        }
        p
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * (0..4).map(|i| x[i].powi(e[i] as i32)).product::<f64>())
            .sum()
    }

    /// Homogeneous part of the given degree.
    pub fn homogeneous(&self, deg: u8) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &self.terms {
            if e.iter().sum::<u8>() == deg {
                p.add_term(*e, *c);
            }
        }
        p
    }

    /// Drops all terms of degree above `deg`.
    pub fn truncate(&self, deg: u8) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &self.terms {
            if e.iter().sum::<u8>() <= deg {
                p.add_term(*e, *c);
            }
        }
        p
    }

    /// Composition with the linear map `x ↦ m x`.
    pub fn linear_substitute(&self, m: &Mat4) -> Poly {
        let images: [Poly; 4] = std::array::from_fn(|i| {
            let mut p = Poly::zero();
            for j in 0..4 {
                p.add_term(unit(j), m[(i, j)]);
            }
            p
        });
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for i in 0..4 {
                for _ in 0..e[i] {
                    term = &term * &images[i];
                }
            }
            out = out + term;
        }
        out
    }

    /// Euclidean Laplacian `Σ ∂_i²` (negative spectrum convention).
    pub fn laplacian(&self) -> Poly {
        (0..4).fold(Poly::zero(), |acc, i| acc + self.deriv(i).deriv(i))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + rhs.scale(-1.0)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                p.add_term(
                    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
                    ca * cb,
                );
            }
        }
        p
    }
}

/// A differential form with polynomial coefficients on flat R⁴.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm {
    deg: usize,
    c: Vec<Poly>,
}

impl PolyForm {
    pub fn zero(deg: usize) -> Self {
        PolyForm {
            deg,
            c: vec![Poly::zero(); 16],
        }
    }

    /// `f · w` for a constant form `w`.
    pub fn from_form(w: &Form, f: &Poly) -> Self {
        let mut out = PolyForm::zero(w.deg());
        for m in masks(w.deg()) {
            if w[m] != 0.0 {
                out.c[m] = f.scale(w[m]);
            }
        }
        out
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn component(&self, mask: usize) -> &Poly {
        &self.c[mask]
    }

    pub fn component_mut(&mut self, mask: usize) -> &mut Poly {
        &mut self.c[mask]
    }

    pub fn eval(&self, x: &Point) -> Form {
        let mut f = Form::zero(self.deg);
        for m in masks(self.deg) {
            f[m] = self.c[m].eval(x);
        }
        f
    }

    pub fn scale(&self, s: f64) -> Self {
        PolyForm {
            deg: self.deg,
            c: self.c.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.c
            .iter()
            .fold(0.0, |m, p| m.max(p.max_abs_coefficient()))
    }

    pub fn d(&self) -> Self {
        let mut out = PolyForm::zero(self.deg + 1);
        for k in masks(self.deg) {
            for i in 0..4 {
                if k & (1 << i) == 0 {
                    let t = self.c[k].deriv(i).scale(merge_sign(1 << i, k));
                    let slot = &mut out.c[k | (1 << i)];
                    *slot = std::mem::take(slot) + t;
                }
            }
        }
        out
    }

    /// Euclidean Hodge star.
    pub fn hodge(&self) -> Self {
        let mut out = PolyForm::zero(4 - self.deg);
        for i in masks(self.deg) {
            let j = 15 & !i;
            out.c[j] = self.c[i].scale(merge_sign(i, j));
        }
        out
    }

    /// Euclidean codifferential `−*d*`.
    pub fn codiff(&self) -> Self {
        self.hodge().d().hodge().scale(-1.0)
    }

    /// Self-dual and anti-self-dual parts of a 2-form.
    pub fn split(&self) -> (Self, Self) {
        let s = self.hodge();
        (
            (self.clone() + s.clone()).scale(0.5),
            (self.clone() - s).scale(0.5),
        )
    }

    /// Applies a constant endomorphism to a 1-form, matching [`Form::map_covector`].
    pub fn map_covector(&self, m: &Mat4) -> Self {
        assert_eq!(self.deg, 1);
        let mut out = PolyForm::zero(1);
        for j in 0..4 {
            let mut acc = Poly::zero();
            for i in 0..4 {
                if m[(j, i)] != 0.0 {
                    acc = acc + self.c[1 << i].scale(m[(j, i)]);
                }
            }
            out.c[1 << j] = acc;
        }
        out
    }

    pub fn wedge(&self, other: &PolyForm) -> Self {
        let mut out = PolyForm::zero(self.deg + other.deg);
        for a in masks(self.deg) {
            if self.c[a].is_zero() {
                continue;
            }
            for b in masks(other.deg) {
                if a & b == 0 && !other.c[b].is_zero() {
                    let t = (&self.c[a] * &other.c[b]).scale(merge_sign(a, b));
                    let slot = &mut out.c[a | b];
                    *slot = std::mem::take(slot) + t;
                }
            }
        }
        out
    }

    /// Euclidean inner product of the coefficient vectors, as a polynomial.
    pub fn inner(&self, other: &PolyForm) -> Poly {
        assert_eq!(self.deg, other.deg);
        masks(self.deg).fold(Poly::zero(), |acc, m| acc + &self.c[m] * &other.c[m])
    }
}

impl Add for PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: PolyForm) -> PolyForm {
        assert_eq!(self.deg, rhs.deg);
        PolyForm {
            deg: self.deg,
            c: self.c.into_iter().zip(rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: PolyForm) -> PolyForm {
        self + rhs.scale(-1.0)
    }
}
