//! Finite-difference exterior calculus and the curvature formalism of the
//! bundle of self-dual 2-forms.

pub mod connection;
pub mod deformation;
pub mod fd;
pub mod forms;
pub mod riemann;

pub use connection::{
    check_frame, connection_from_phi, curvature_from_phi, curvature_of, decompose,
    ric0_from_curvature, torsion_residual, ConnectionForm, CurvatureBlock, TripleAt,
};
pub use fd::{Fd, Linear, Order};
pub use forms::{flat_asd_triple, flat_sd_triple, Form, Mat4, MetricAt, Point};
pub use riemann::{bundle_curvature_forms, MetricJet, Tensor4};
