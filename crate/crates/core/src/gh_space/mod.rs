//! The A_k instanton from the Gibbons-Hawking ansatz.

pub mod checks;
pub mod config;
pub mod geometry;

pub use checks::{
    closedness_residual, eta_curl_residual, killing_residual, linking_holonomy, metric_decay_slope,
    metric_deviation, moment_decay_slope, moment_deviation, potential_residual, ricci_residual,
    sample_points, sigma_integrate, v_laplacian, SIGMA_ORDER,
};
pub use config::{Center, GHConfig, Orientation};
pub use geometry::{
    asymptotic_radius, distance_to_centers, eval_eta, eval_v, grad_v, j_dm, metric_at,
    metric_components, metric_field, moment_differential, moment_map, rho_for_radius,
    triple_components, triple_field, xi_field, ChartPoint, FrameSample, Patch,
};
