//! Bianchi gauge for quadratic jets.

use super::jets::{symmetrized_derivative, Jet2, PolyField, PolyMatrix};
use crate::poly::{monomials, Poly};
use nalgebra::{DMatrix, DVector};

/// Euclidean Bianchi operator `(B h)_b = −∂_a h_ab + ½ ∂_b tr h`.
pub fn bianchi_operator(h: &PolyMatrix) -> PolyField {
    let trace = (0..4).fold(Poly::zero(), |acc, a| acc + h[a][a].clone());
    std::array::from_fn(|b| {
        let div = (0..4).fold(Poly::zero(), |acc, a| acc + h[a][b].deriv(a));
        trace.deriv(b).scale(0.5) - div
    })
}

/// Largest coefficient of `B_euc H`.
pub fn bianchi_residual(jet: &Jet2) -> f64 {
    bianchi_operator(&jet.polys())
        .iter()
        .fold(0.0, |m, p| m.max(p.max_abs_coefficient()))
}

/// Result of [`gauge_projection`].
#[derive(Clone, Debug)]
pub struct GaugeProjection {
    pub jet: Jet2,
    /// The cubic vector field `X` with `jet = H + δ*X`.
    pub corrector: PolyField,
    /// Rank of the linear system `B δ*X = −B H`.
    pub rank: usize,
    pub residual_before: f64,
    pub residual_after: f64,
}

fn coefficient_vector(field: &PolyField) -> DVector<f64> {
    let linear = monomials(1);
    DVector::from_iterator(
        16,
        field
            .iter()
            .flat_map(|p| linear.iter().map(move |e| p.coefficient(e))),
    )
}

/// Adds the minimum-norm `δ*X`, `X` cubic, that puts `H` in Bianchi gauge.
pub fn gauge_projection(jet: &Jet2) -> GaugeProjection {
    let cubic = monomials(3);
    let columns: Vec<(usize, [u8; 4])> = (0..4)
        .flat_map(|b| cubic.iter().map(move |e| (b, *e)))
        .collect();
    let mut system = DMatrix::zeros(16, columns.len());
    for (col, (b, e)) in columns.iter().enumerate() {
        let mut field: PolyField = Default::default();
        field[*b] = Poly::monomial(*e, 1.0);
        system.set_column(
            col,
            &coefficient_vector(&bianchi_operator(&symmetrized_derivative(&field))),
        );
    }
    let rhs = -coefficient_vector(&bianchi_operator(&jet.polys()));
    let svd = system.svd(true, true);
    let cutoff = 1e-12 * svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    let x = svd.solve(&rhs, cutoff).expect("both factors were computed");
    let mut corrector: PolyField = Default::default();
    for ((b, e), c) in columns.iter().zip(x.iter()) {
        corrector[*b].add_term(*e, *c);
    }
    let projected = jet.clone() + Jet2::from_polys(&symmetrized_derivative(&corrector));
    GaugeProjection {
        residual_before: bianchi_residual(jet),
        residual_after: bianchi_residual(&projected),
        jet: projected,
        corrector,
        rank,
    }
}

/// `H + δ*X` in Bianchi gauge; the curvature at the origin is unchanged.
pub fn gauge_project(jet: &Jet2) -> Jet2 {
    gauge_projection(jet).jet
}
