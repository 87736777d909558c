//! Homogeneous metric jets `H_{i..j mn} x^i..x^j dx^m dx^n` on R⁴ and the
//! finite subgroups of SU(2) acting on them.

use crate::error::{AleError, Result};
use crate::exterior_calculus::{Mat4, Point};
use crate::poly::{monomials, Exponent, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ops::{Add, Sub};

/// Largest tolerated asymmetry in ingested coefficients.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Matrix of polynomial entries.
pub type PolyMatrix = [[Poly; 4]; 4];

/// Vector field with polynomial components.
pub type PolyField = [Poly; 4];

/// Coefficients of a symmetric-matrix-valued homogeneous polynomial of
/// degree `DEG`, stored densely with the `DEG` position indices first and
/// the two form indices last.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousJet<const DEG: usize> {
    coeffs: Vec<f64>,
}

/// Quadratic jet `H`.
pub type Jet2 = HomogeneousJet<2>;
/// Quartic jet `H⁽²⁾`.
pub type Jet4 = HomogeneousJet<4>;

fn exponent_of(positions: &[usize]) -> Exponent {
    let mut e = [0u8; 4];
    for &i in positions {
        e[i] += 1;
    }
    e
}

fn orderings(e: &Exponent) -> f64 {
    let fact = |n: u8| (1..=n as u64).product::<u64>() as f64;
    fact(e.iter().sum()) / e.iter().map(|&k| fact(k)).product::<f64>()
}

fn unflatten(mut flat: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % 4;
        flat /= 4;
    }
    idx
}

fn flatten(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 4 + i)
}

fn index_path(name: &str, idx: &[usize]) -> String {
    let mut s = name.to_string();
    for i in idx {
        s.push_str(&format!("[{i}]"));
    }
    s
}

impl<const DEG: usize> HomogeneousJet<DEG> {
    pub const RANK: usize = DEG + 2;
    pub const LEN: usize = 1 << (2 * (DEG + 2));

    pub fn zero() -> Self {
        HomogeneousJet {
            coeffs: vec![0.0; Self::LEN],
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), Self::RANK);
        self.coeffs[flatten(idx)]
    }

    /// Dense row-major coefficients.
    pub fn dense(&self) -> &[f64] {
        &self.coeffs
    }

    /// Ingests dense row-major coefficients, rejecting any asymmetry above
    /// [`SYMMETRY_TOL`] with the offending index path under `name`.
    pub fn from_dense(values: &[f64], name: &str) -> Result<Self> {
        if values.len() != Self::LEN {
            return Err(AleError::SchemaError {
                path: name.to_string(),
                message: format!(
                    "expected {} coefficients, found {}",
                    Self::LEN,
                    values.len()
                ),
            });
        }
        for (flat, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(AleError::SchemaError {
                    path: index_path(name, &unflatten(flat, Self::RANK)),
                    message: "coefficient is not finite".into(),
                });
            }
            let idx = unflatten(flat, Self::RANK);
            let mut swaps: Vec<(usize, usize)> =
                (0..DEG.saturating_sub(1)).map(|s| (s, s + 1)).collect();
            swaps.push((DEG, DEG + 1));
            for (s, t) in swaps {
                let mut other = idx.clone();
                other.swap(s, t);
                let w = values[flatten(&other)];
                if (v - w).abs() > SYMMETRY_TOL {
                    return Err(AleError::SchemaError {
                        path: index_path(name, &idx),
                        message: format!(
                            "differs from {} by {:.3e}",
                            index_path(name, &other),
                            (v - w).abs()
                        ),
                    });
                }
            }
        }
        // Each entry is read from its canonical index so the result is exactly symmetric.
        let coeffs = (0..Self::LEN)
            .map(|flat| {
                let mut idx = unflatten(flat, Self::RANK);
                idx[..DEG].sort_unstable();
                if idx[DEG] > idx[DEG + 1] {
                    idx.swap(DEG, DEG + 1);
                }
                values[flatten(&idx)]
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// Degree-`DEG` part of a matrix of polynomials, symmetrized.
    pub fn from_polys(entries: &PolyMatrix) -> Self {
        let mut coeffs = vec![0.0; Self::LEN];
        for (flat, c) in coeffs.iter_mut().enumerate() {
            let idx = unflatten(flat, Self::RANK);
            let e = exponent_of(&idx[..DEG]);
            let (m, n) = (idx[DEG], idx[DEG + 1]);
            let value = 0.5 * (entries[m][n].coefficient(&e) + entries[n][m].coefficient(&e));
            *c = value / orderings(&e);
        }
        HomogeneousJet { coeffs }
    }

    /// The matrix of homogeneous polynomials `H_mn(x)`.
    pub fn polys(&self) -> PolyMatrix {
        let mut out: PolyMatrix = Default::default();
        for (flat, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                let idx = unflatten(flat, Self::RANK);
                out[idx[DEG]][idx[DEG + 1]].add_term(exponent_of(&idx[..DEG]), c);
            }
        }
        out
    }

    pub fn eval(&self, x: &Point) -> Mat4 {
        let mut powers = vec![1.0];
        for _ in 0..DEG {
            powers = powers
                .iter()
                .flat_map(|p| x.iter().map(move |xi| p * xi))
                .collect();
        }
        let mut out = Mat4::zeros();
        for (block, &w) in self.coeffs.chunks_exact(16).zip(&powers) {
            if w != 0.0 {
                for (mn, c) in block.iter().enumerate() {
                    out[(mn / 4, mn % 4)] += w * c;
                }
            }
        }
        out
    }

    /// Number of independent coefficients.
    pub fn parameter_count() -> usize {
        monomials(DEG as u8).len() * 10
    }

    /// Builds a jet from independent coefficients: for each monomial, the
    /// upper-triangular entries `(m ≤ n)` in row order.
    pub fn from_params(params: &[f64]) -> Self {
        assert_eq!(params.len(), Self::parameter_count());
        let mut entries: PolyMatrix = Default::default();
        let mut it = params.iter();
        for e in monomials(DEG as u8) {
            for m in 0..4 {
                for n in m..4 {
                    let c = *it.next().expect("parameter count");
                    entries[m][n].add_term(e, c);
                    if m != n {
                        entries[n][m].add_term(e, c);
                    }
                }
            }
        }
        Self::from_polys(&entries)
    }

    pub fn params(&self) -> Vec<f64> {
        let entries = self.polys();
        let mut out = Vec::with_capacity(Self::parameter_count());
        for e in monomials(DEG as u8) {
            for m in 0..4 {
                for n in m..4 {
                    out.push(entries[m][n].coefficient(&e));
                }
            }
        }
        out
    }

    /// Independent coefficients drawn uniformly from `[−scale, scale]`.
    pub fn random(seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params: Vec<f64> = (0..Self::parameter_count())
            .map(|_| rng.random_range(-scale..scale))
            .collect();
        Self::from_params(&params)
    }

    pub fn scale(&self, s: f64) -> Self {
        HomogeneousJet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Pullback `x ↦ mᵀ H(m x) m` by a linear map.
    pub fn pullback(&self, m: &Mat4) -> Self {
        let entries = self.polys();
        let moved: PolyMatrix =
            std::array::from_fn(|a| std::array::from_fn(|b| entries[a][b].linear_substitute(m)));
        let mut out: PolyMatrix = Default::default();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let w = m[(c, a)] * m[(d, b)];
                        if w != 0.0 {
                            out[a][b] = out[a][b].clone() + moved[c][d].scale(w);
                        }
                    }
                }
            }
        }
        Self::from_polys(&out)
    }

    /// Mean of the pullbacks over a finite group.
    pub fn average_over(&self, group: &[Mat4]) -> Self {
        let sum = group
            .iter()
            .fold(Self::zero(), |acc, g| acc + self.pullback(g));
        sum.scale(1.0 / group.len() as f64)
    }
}

impl<const DEG: usize> Add for HomogeneousJet<DEG> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        HomogeneousJet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<const DEG: usize> Sub for HomogeneousJet<DEG> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        HomogeneousJet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Symmetrized derivative `(δ*X)_ab = ½(∂_a X_b + ∂_b X_a)` of a Euclidean vector field.
pub fn symmetrized_derivative(field: &PolyField) -> PolyMatrix {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| (field[b].deriv(a) + field[a].deriv(b)).scale(0.5))
    })
}

/// Vector field with independent coefficients in `[−scale, scale]` on the
/// monomials of degree `deg`.
pub fn random_field(deg: u8, seed: u64, scale: f64) -> PolyField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::array::from_fn(|_| {
        let mut p = Poly::zero();
        for e in monomials(deg) {
            p.add_term(e, rng.random_range(-scale..scale));
        }
        p
    })
}

/// Mean of `x ↦ gᵀ X(g x)` over an orthogonal group.
pub fn average_field(field: &PolyField, group: &[Mat4]) -> PolyField {
    let mut out: PolyField = Default::default();
    let w = 1.0 / group.len() as f64;
    for g in group {
        let moved: PolyField = std::array::from_fn(|c| field[c].linear_substitute(g));
        for a in 0..4 {
            for c in 0..4 {
                out[a] = out[a].clone() + moved[c].scale(w * g[(c, a)]);
            }
        }
    }
    out
}

fn quaternion_product(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

/// Right multiplication `x ↦ x q` on R⁴ = H with `x = x0 + x1 i + x2 j + x3 k`.
///
/// Unit quaternions act this way by isometries fixing the flat self-dual
/// triple; `e^{iθ}` acts as `diag(e^{iθ}, e^{−iθ})` on `(x0 + i x1, x2 + i x3)`.
pub fn su2_action(q: [f64; 4]) -> Mat4 {
    let mut m = Mat4::zeros();
    for c in 0..4 {
        let mut e = [0.0; 4];
        e[c] = 1.0;
        let image = quaternion_product(e, q);
        for r in 0..4 {
            m[(r, c)] = image[r];
        }
    }
    m
}

/// Closure of a set of orthogonal generators under multiplication.
pub fn generate_group(generators: &[Mat4]) -> Result<Vec<Mat4>> {
    const MAX_ORDER: usize = 512;
    let mut group = vec![Mat4::identity()];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in generators {
                let prod = a * g;
                if !group.iter().any(|h| (h - prod).abs().max() < 1e-9) {
                    group.push(prod);
                    next.push(prod);
                    if group.len() > MAX_ORDER {
                        return Err(AleError::SymmetryError(format!(
                            "generators do not close within {MAX_ORDER} elements"
                        )));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(group)
}

fn unit_complex(angle: f64) -> [f64; 4] {
    [angle.cos(), angle.sin(), 0.0, 0.0]
}

/// Cyclic group `Z_n = ⟨diag(ζ, ζ̄)⟩`.
pub fn cyclic_group(n: u32) -> Result<Vec<Mat4>> {
    generate_group(&[su2_action(unit_complex(std::f64::consts::TAU / n as f64))])
}

/// Binary dihedral group of order `4n`, the group of the `D_{n+2}` singularity.
pub fn binary_dihedral_group(n: u32) -> Result<Vec<Mat4>> {
    generate_group(&[
        su2_action(unit_complex(std::f64::consts::PI / n as f64)),
        su2_action([0.0, 0.0, 1.0, 0.0]),
    ])
}

/// Binary tetrahedral group of order 24, the group of `E_6`.
pub fn binary_tetrahedral_group() -> Result<Vec<Mat4>> {
    generate_group(&[
        su2_action([0.0, 1.0, 0.0, 0.0]),
        su2_action([0.0, 0.0, 1.0, 0.0]),
        su2_action([0.5; 4]),
    ])
}

/// Binary octahedral group of order 48, the group of `E_7`.
pub fn binary_octahedral_group() -> Result<Vec<Mat4>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    generate_group(&[su2_action([s, s, 0.0, 0.0]), su2_action([0.5; 4])])
}

/// Binary icosahedral group of order 120, the group of `E_8`.
pub fn binary_icosahedral_group() -> Result<Vec<Mat4>> {
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    generate_group(&[
        su2_action([0.5; 4]),
        su2_action([0.5 * golden, 0.5 / golden, 0.5, 0.0]),
    ])
}
