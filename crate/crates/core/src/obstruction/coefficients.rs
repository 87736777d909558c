//! Instanton constants and the obstruction coefficients built from them.

use super::curvature::{first_row_norm, FIRST_ROW_TOL};
use crate::error::{AleError, Result};
use crate::exterior_calculus::CurvatureBlock;
use crate::gh_space::{moment_map, sigma_integrate, GHConfig, SIGMA_ORDER};
use crate::l2_harmonic::{build_omega, omega_norm};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Default tolerance of [`wall_side`].
pub const WALL_TOL: f64 = 1e-8;

/// Type of the orbifold group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    Computed,
    UserSupplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedConstant {
    pub value: f64,
    pub source: ConstantSource,
}

impl TaggedConstant {
    pub fn computed(value: f64) -> Self {
        TaggedConstant {
            value,
            source: ConstantSource::Computed,
        }
    }

    pub fn supplied(value: f64) -> Self {
        TaggedConstant {
            value,
            source: ConstantSource::UserSupplied,
        }
    }
}

/// Caller-supplied values; any subset for the A series, all four otherwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsOverride {
    #[serde(rename = "volSigma")]
    pub vol_sigma: Option<f64>,
    #[serde(rename = "omegaNorm2")]
    pub omega_norm_sq: Option<f64>,
    #[serde(rename = "intMomega")]
    pub int_m_omega1: Option<f64>,
    #[serde(rename = "mP1")]
    pub m_p1: Option<f64>,
}

/// `VolΣ`, `‖Ω‖²`, `∫_Σ m ω₁` and `m(p₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstantonConstants {
    pub vol_sigma: TaggedConstant,
    pub omega_norm_sq: TaggedConstant,
    pub int_m_omega1: TaggedConstant,
    pub m_p1: TaggedConstant,
}

impl InstantonConstants {
    /// All four values by quadrature on the A_k instanton of scale `lambda`.
    pub fn a_series(k: u32, lambda: f64) -> Result<Self> {
        let cfg = GHConfig::a_series(k, lambda)?;
        let vol = sigma_integrate(&cfg, &|_| 1.0, SIGMA_ORDER)?;
        let int_m = sigma_integrate(&cfg, &|x| moment_map(&cfg, &[x, 0.0, 0.0]), SIGMA_ORDER)?;
        let norm = omega_norm(&build_omega(&cfg)?)?.value;
        let m_p1 = moment_map(&cfg, &cfg.centers[1].position);
        Ok(InstantonConstants {
            vol_sigma: TaggedConstant::computed(vol),
            omega_norm_sq: TaggedConstant::computed(norm),
            int_m_omega1: TaggedConstant::computed(int_m),
            m_p1: TaggedConstant::computed(m_p1),
        })
    }

    /// Every value supplied by the caller.
    pub fn supplied(vol_sigma: f64, omega_norm_sq: f64, int_m_omega1: f64, m_p1: f64) -> Self {
        InstantonConstants {
            vol_sigma: TaggedConstant::supplied(vol_sigma),
            omega_norm_sq: TaggedConstant::supplied(omega_norm_sq),
            int_m_omega1: TaggedConstant::supplied(int_m_omega1),
            m_p1: TaggedConstant::supplied(m_p1),
        }
    }

    /// Constants for a group: computed for the A series with overrides
    /// taking precedence; all four must be supplied for D and E.
    pub fn resolve(
        group: GroupKind,
        k: u32,
        lambda: f64,
        overrides: Option<&ConstantsOverride>,
    ) -> Result<Self> {
        let o = overrides.copied().unwrap_or_default();
        if let (Some(v), Some(n), Some(i), Some(m)) =
            (o.vol_sigma, o.omega_norm_sq, o.int_m_omega1, o.m_p1)
        {
            return Ok(Self::supplied(v, n, i, m));
        }
        if group != GroupKind::A {
            return Err(AleError::MissingConstants);
        }
        let mut c = Self::a_series(k, lambda)?;
        let apply = |slot: &mut TaggedConstant, v: Option<f64>| {
            if let Some(v) = v {
                *slot = TaggedConstant::supplied(v);
            }
        };
        apply(&mut c.vol_sigma, o.vol_sigma);
        apply(&mut c.omega_norm_sq, o.omega_norm_sq);
        apply(&mut c.int_m_omega1, o.int_m_omega1);
        apply(&mut c.m_p1, o.m_p1);
        Ok(c)
    }

    fn vol(&self) -> f64 {
        self.vol_sigma.value
    }

    fn norm(&self) -> f64 {
        self.omega_norm_sq.value
    }
}

/// `R₂₂R₃₃ − R₂₃²` in the 1-based labels of the frame.
pub fn minor(block: &CurvatureBlock) -> f64 {
    let r = &block.rplus;
    r[1][1] * r[2][2] - r[1][2] * r[1][2]
}

/// `⟨R₊(H)(I₁), I_i⟩ = 2 R_1i` under `⟨ω_i, ω_j⟩ = 2δ_ij`.
pub fn first_row_pairing(block: &CurvatureBlock) -> [f64; 3] {
    block.rplus[0].map(|x| 2.0 * x)
}

fn require_first_row_zero(block: &CurvatureBlock) -> Result<()> {
    let norm = first_row_norm(block);
    if norm > FIRST_ROW_TOL {
        return Err(AleError::FirstObstructionNonzero { norm });
    }
    Ok(())
}

/// `λ_i = π VolΣ / ‖Ω‖² · ⟨R₊(H)(I₁), I_i⟩`.
pub fn lambda_obstruction(block: &CurvatureBlock, c: &InstantonConstants) -> [f64; 3] {
    let scale = PI * c.vol() / c.norm();
    first_row_pairing(block).map(|x| scale * x)
}

/// `μ₁ = 4π / ‖Ω‖² · (R₂₂R₃₃ − R₂₃²) · ∫_Σ m ω₁`.
pub fn mu1_generic(block: &CurvatureBlock, c: &InstantonConstants) -> Result<f64> {
    require_first_row_zero(block)?;
    Ok(4.0 * PI / c.norm() * minor(block) * c.int_m_omega1.value)
}

/// `μ₁ = VolΣ² / ‖Ω‖² · ((k+1)(R₂₂R₃₃ − R₂₃²) − (k−1) D / 16)` on A_k.
pub fn mu1_ak(block: &CurvatureBlock, d: f64, k: u32, c: &InstantonConstants) -> Result<f64> {
    require_first_row_zero(block)?;
    let k = k as f64;
    Ok(c.vol().powi(2) / c.norm() * ((k + 1.0) * minor(block) - (k - 1.0) * d / 16.0))
}

/// `A = VolΣ/2π · (−(k−1)(R₂₂R₃₃ − R₂₃²) + (k+1) D / 16)` on A_k.
pub fn a_coefficient(
    block: &CurvatureBlock,
    d: f64,
    k: u32,
    c: &InstantonConstants,
) -> Result<f64> {
    require_first_row_zero(block)?;
    let k = k as f64;
    Ok(c.vol() / TAU * (-(k - 1.0) * minor(block) + (k + 1.0) * d / 16.0))
}

/// The same coefficient before the moment-map values are eliminated:
/// `2 minor (m(p₁) − ∫_Σ m ω₁ / VolΣ) + (k+1)/16 · VolΣ/2π · D`.
pub fn a_coefficient_moment_form(
    block: &CurvatureBlock,
    d: f64,
    k: u32,
    c: &InstantonConstants,
) -> Result<f64> {
    require_first_row_zero(block)?;
    let k = k as f64;
    let mean = c.int_m_omega1.value / c.vol();
    Ok(2.0 * minor(block) * (c.m_p1.value - mean) + (k + 1.0) / 16.0 * c.vol() / TAU * d)
}

/// `det R₊(g_t)(p₁)` to leading order, `minor · A · t⁴`.
pub fn det_leading(minor: f64, a: f64, t_values: &[f64]) -> Vec<f64> {
    t_values.iter().map(|t| minor * a * t.powi(4)).collect()
}

/// Leading form of `R₊(g_t)(p₁)`: `A t²` in the corner and `t R_ij` in the 2×2 block.
pub fn leading_block(block: &CurvatureBlock, a: f64, t: f64) -> Matrix3<f64> {
    let r = &block.rplus;
    Matrix3::new(
        a * t * t,
        0.0,
        0.0,
        0.0,
        t * r[1][1],
        t * r[1][2],
        0.0,
        t * r[2][1],
        t * r[2][2],
    )
}

/// `det 𝐑₊ = −det R₊` for the 3×3 block, since `𝐑 = −R`.
pub fn bold_det(block: &CurvatureBlock) -> f64 {
    -block.rplus_matrix().determinant()
}

/// Side of the wall `det 𝐑₊ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallSide {
    EinsteinSide,
    OnWall,
    EmptySide,
}

impl WallSide {
    pub fn name(self) -> &'static str {
        match self {
            WallSide::EinsteinSide => "einstein_side",
            WallSide::OnWall => "on_wall",
            WallSide::EmptySide => "empty_side",
        }
    }
}

/// Classifies `det 𝐑₊` against `±tol`.
pub fn wall_side(det_bold: f64, tol: f64) -> WallSide {
    if det_bold > tol {
        WallSide::EinsteinSide
    } else if det_bold < -tol {
        WallSide::EmptySide
    } else {
        WallSide::OnWall
    }
}
