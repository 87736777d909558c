//! Deterministic product quadrature: Gauss-Legendre and periodic rules, the
//! round 3-sphere, and fiber-invariant volume integrals on Gibbons-Hawking charts.

pub mod rules;
pub mod s3;
pub mod volume;

pub use rules::{gauss_legendre, periodic, QuadratureSpec, Region};
pub use s3::{
    closed_triple_basis, dcf_pairing, dcf_pairing_at, integrate_s3, random_closed_quadratic,
    random_closed_sd_quadratic, Duality, Pairing, QuadraticTriple, S3Integrand,
};
pub use volume::{integrate_volume, VolumeChart};
