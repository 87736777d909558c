//! Desingularization obstructions of an orbifold point from metric jets.
//!
//! A metric near the orbifold point is `euc + H + H⁽²⁾ + …` with `H`
//! quadratic and `H⁽²⁾` quartic. The curvature block of `H` gives the first
//! obstruction `λ`; when its first row vanishes, the next coefficients `μ₁`
//! and `A` follow from the 2×2 minor and the invariant `D`.

pub mod coefficients;
pub mod curvature;
pub mod gauge;
pub mod jets;
pub mod report;

pub use coefficients::{
    a_coefficient, a_coefficient_moment_form, bold_det, det_leading, first_row_pairing,
    lambda_obstruction, leading_block, minor, mu1_ak, mu1_generic, wall_side, ConstantSource,
    ConstantsOverride, GroupKind, InstantonConstants, TaggedConstant, WallSide, WALL_TOL,
};
pub use curvature::{
    curvature_fd_oracle, curvature_from_jet2, d2_evaluate, d2_invariant, d2_invariant_symbolic,
    first_row_norm, with_curvature_row_zero, with_first_row_zero, with_rplus, D2Evaluation,
    D2Steps, FIRST_ROW_TOL,
};
pub use gauge::{bianchi_residual, gauge_project, gauge_projection, GaugeProjection};
pub use jets::{
    average_field, binary_dihedral_group, binary_icosahedral_group, binary_octahedral_group,
    binary_tetrahedral_group, cyclic_group, random_field, su2_action, symmetrized_derivative,
    HomogeneousJet, Jet2, Jet4,
};
pub use report::{
    jet_to_json, obstruction_report, ObstructionInput, ObstructionReport, SCHEMA_VERSION,
};
