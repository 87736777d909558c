use crate::error::{AleError, Result};
use serde::{Deserialize, Serialize};

/// A monopole center of the harmonic potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub position: [f64; 3],
    pub multiplicity: u32,
}

/// Which 2-forms are declared self-dual. Only one convention is supported:
/// the hyperkähler triple is self-dual and the L² harmonic form anti-self-dual.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    TripleSelfDual,
}

pub const DEFAULT_EPS_CENTER: f64 = 1e-6;
pub const DEFAULT_EPS_STRING: f64 = 1e-6;

/// Gibbons-Hawking configuration.
///
/// The canonical A_k layout has one center of multiplicity 1 at `(−kλ, 0, 0)`
/// and one of multiplicity `k` at `(λ, 0, 0)`; the exceptional curve lies over
/// the segment between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GHConfig {
    pub k: u32,
    pub lambda: f64,
    pub centers: Vec<Center>,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default = "default_eps_center")]
    pub eps_center: f64,
    #[serde(default = "default_eps_string")]
    pub eps_string: f64,
}

fn default_eps_center() -> f64 {
    DEFAULT_EPS_CENTER
}

fn default_eps_string() -> f64 {
    DEFAULT_EPS_STRING
}

#[derive(Deserialize)]
struct ConfigInput {
    k: i64,
    lambda: f64,
    #[serde(default)]
    centers: Option<Vec<Center>>,
    #[serde(default)]
    eps_center: Option<f64>,
    #[serde(default)]
    eps_string: Option<f64>,
}

impl GHConfig {
    /// Canonical two-cluster A_k configuration.
    pub fn a_series(k: u32, lambda: f64) -> Result<Self> {
        let cfg = GHConfig {
            k,
            lambda,
            centers: vec![
                Center {
                    position: [-(k as f64) * lambda, 0.0, 0.0],
                    multiplicity: 1,
                },
                Center {
                    position: [lambda, 0.0, 0.0],
                    multiplicity: k,
                },
            ],
            orientation: Orientation::default(),
            eps_center: DEFAULT_EPS_CENTER,
            eps_string: DEFAULT_EPS_STRING,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// One center of multiplicity `n` at the origin; `n = 1` is flat R⁴.
    pub fn single_center(multiplicity: u32) -> Self {
        GHConfig {
            k: multiplicity.saturating_sub(1),
            lambda: 0.0,
            centers: vec![Center {
                position: [0.0; 3],
                multiplicity,
            }],
            orientation: Orientation::default(),
            eps_center: DEFAULT_EPS_CENTER,
            eps_string: DEFAULT_EPS_STRING,
        }
    }

    /// Parses `{"k": int, "lambda": float, "centers": optional list}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let input: ConfigInput = serde_json::from_str(text).map_err(|e| AleError::SchemaError {
            path: "$".into(),
            message: e.to_string(),
        })?;
        if input.k < 1 {
            return Err(AleError::InvalidConfig(format!(
                "k must be a positive integer, got {}",
                input.k
            )));
        }
        let k = input.k as u32;
        let mut cfg = GHConfig::a_series(k, input.lambda)?;
        if let Some(c) = input.centers {
            cfg.centers = c;
        }
        if let Some(e) = input.eps_center {
            cfg.eps_center = e;
        }
        if let Some(e) = input.eps_string {
            cfg.eps_string = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.centers.iter().map(|c| c.multiplicity).sum()
    }

    /// True for the canonical two-cluster layout, which carries the curve Σ.
    pub fn is_two_cluster(&self) -> bool {
        let k = self.k as f64;
        self.k >= 1
            && self.lambda > 0.0
            && self.centers.len() == 2
            && self.centers[0].multiplicity == 1
            && self.centers[1].multiplicity == self.k
            && self.centers[0].position == [-k * self.lambda, 0.0, 0.0]
            && self.centers[1].position == [self.lambda, 0.0, 0.0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(AleError::InvalidConfig("no centers".into()));
        }
        if self
            .centers
            .iter()
            .any(|c| c.multiplicity == 0 || c.position.iter().any(|x| !x.is_finite()))
        {
            return Err(AleError::InvalidConfig(
                "centers need positive multiplicity and finite position".into(),
            ));
        }
        if !(self.eps_center > 0.0 && self.eps_string > 0.0) {
            return Err(AleError::InvalidConfig(
                "exclusion radii must be positive".into(),
            ));
        }
        if self.centers.len() > 1 {
            if self.k < 1 || !(self.lambda > 0.0) || !self.lambda.is_finite() {
                return Err(AleError::InvalidConfig(format!(
                    "need k >= 1 and lambda > 0, got k = {}, lambda = {}",
                    self.k, self.lambda
                )));
            }
            if self.total_multiplicity() != self.k + 1 {
                return Err(AleError::InvalidConfig(
                    "total multiplicity must be k + 1".into(),
                ));
            }
            let mut centroid = [0.0; 3];
            for c in &self.centers {
                for (s, x) in centroid.iter_mut().zip(c.position) {
                    *s += c.multiplicity as f64 * x;
                }
            }
            let scale = self.lambda * (self.k as f64 + 1.0);
            if centroid.iter().any(|x| x.abs() > 1e-12 * scale.max(1.0)) {
                return Err(AleError::InvalidConfig(
                    "weighted center sum must vanish".into(),
                ));
            }
        }
        Ok(())
    }

    /// End points of the segment under Σ.
    pub fn sigma_segment(&self) -> Result<(f64, f64)> {
        if !self.is_two_cluster() {
            return Err(AleError::InvalidConfig(
                "Σ exists only for the canonical two-cluster layout".into(),
            ));
        }
        Ok((-(self.k as f64) * self.lambda, self.lambda))
    }

    /// Far-field model: all multiplicity at the origin.
    pub fn asymptotic_model(&self) -> GHConfig {
        GHConfig {
            eps_center: self.eps_center,
            eps_string: self.eps_string,
            ..GHConfig::single_center(self.total_multiplicity())
        }
    }
}
