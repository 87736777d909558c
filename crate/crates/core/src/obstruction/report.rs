//! Jet input schema and the assembled obstruction report.
//!
//! Indices in files are 0-based: index `i` is the coordinate `x^{i+1}`.

use super::coefficients::{
    a_coefficient, a_coefficient_moment_form, bold_det, det_leading, first_row_pairing,
    lambda_obstruction, leading_block, minor, mu1_ak, mu1_generic, wall_side, ConstantsOverride,
    GroupKind, InstantonConstants, WallSide, WALL_TOL,
};
use super::curvature::{curvature_from_jet2, d2_invariant, first_row_norm, FIRST_ROW_TOL};
use super::gauge::{bianchi_residual, gauge_projection};
use super::jets::{Jet2, Jet4};
use crate::error::{AleError, Result};
use crate::exterior_calculus::CurvatureBlock;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Default `t` samples of the leading determinant.
pub const DEFAULT_T_VALUES: [f64; 3] = [0.1, 0.05, 0.025];

/// Parsed jet input.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionInput {
    pub group: GroupKind,
    pub k: u32,
    pub lambda: f64,
    pub jet: Jet2,
    pub jet4: Option<Jet4>,
    pub constants_override: Option<ConstantsOverride>,
    pub gauge_project: bool,
    /// Fail instead of omitting `μ₁`, `D`, `A` when `R₊(H)(I₁) ≠ 0`.
    pub require_higher_order: bool,
    pub t_values: Vec<f64>,
    pub wall_tol: f64,
}

fn schema(path: &str, message: impl Into<String>) -> AleError {
    AleError::SchemaError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn dense(value: &Value, depth: usize, path: &str, out: &mut Vec<f64>) -> Result<()> {
    if depth == 0 {
        let x = value
            .as_f64()
            .ok_or_else(|| schema(path, "expected a number"))?;
        out.push(x);
        return Ok(());
    }
    let items = value
        .as_array()
        .ok_or_else(|| schema(path, "expected an array of length 4"))?;
    if items.len() != 4 {
        return Err(schema(
            path,
            format!("expected length 4, found {}", items.len()),
        ));
    }
    for (i, item) in items.iter().enumerate() {
        dense(item, depth - 1, &format!("{path}[{i}]"), out)?;
    }
    Ok(())
}

fn jet_field<const DEG: usize>(
    value: &Value,
    name: &str,
) -> Result<super::jets::HomogeneousJet<DEG>> {
    let mut values = Vec::new();
    dense(value, DEG + 2, name, &mut values)?;
    super::jets::HomogeneousJet::<DEG>::from_dense(&values, name)
}

fn nested(values: &[f64]) -> Value {
    if values.len() == 1 {
        return Value::from(values[0]);
    }
    Value::Array(values.chunks(values.len() / 4).map(nested).collect())
}

/// Dense nested-array form of a jet, as read by [`ObstructionInput::from_json`].
pub fn jet_to_json<const DEG: usize>(jet: &super::jets::HomogeneousJet<DEG>) -> Value {
    nested(jet.dense())
}

impl ObstructionInput {
    /// A-series input with default options.
    pub fn new(k: u32, lambda: f64, jet: Jet2) -> Self {
        ObstructionInput {
            group: GroupKind::A,
            k,
            lambda,
            jet,
            jet4: None,
            constants_override: None,
            gauge_project: false,
            require_higher_order: false,
            t_values: DEFAULT_T_VALUES.to_vec(),
            wall_tol: WALL_TOL,
        }
    }

    /// Input file text; [`Self::from_json`] reads it back unchanged.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        obj.insert(
            "group".into(),
            serde_json::to_value(self.group).expect("group serializes"),
        );
        obj.insert("k".into(), self.k.into());
        obj.insert("lambda".into(), self.lambda.into());
        obj.insert("H".into(), jet_to_json(&self.jet));
        if let Some(jet4) = &self.jet4 {
            obj.insert("H2".into(), jet_to_json(jet4));
        }
        if let Some(o) = &self.constants_override {
            obj.insert(
                "constants_override".into(),
                serde_json::to_value(o).expect("override serializes"),
            );
        }
        obj.insert("gauge_project".into(), self.gauge_project.into());
        obj.insert(
            "require_higher_order".into(),
            self.require_higher_order.into(),
        );
        obj.insert("t_values".into(), self.t_values.clone().into());
        obj.insert("wall_tol".into(), self.wall_tol.into());
        serde_json::to_string_pretty(&Value::Object(obj)).expect("input serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
        let obj = root
            .as_object()
            .ok_or_else(|| schema("$", "expected an object"))?;
        const KNOWN: [&str; 11] = [
            "schema_version",
            "group",
            "k",
            "lambda",
            "H",
            "H2",
            "constants_override",
            "gauge_project",
            "require_higher_order",
            "t_values",
            "wall_tol",
        ];
        if let Some(extra) = obj.keys().find(|key| !KNOWN.contains(&key.as_str())) {
            return Err(schema(extra, "unknown field"));
        }
        if let Some(v) = obj.get("schema_version") {
            if v.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(schema(
                    "schema_version",
                    format!("expected {SCHEMA_VERSION}"),
                ));
            }
        }
        let group = match obj.get("group") {
            None => GroupKind::A,
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|_| schema("group", "expected \"a\", \"d\" or \"e\""))?,
        };
        let k = obj
            .get("k")
            .ok_or_else(|| schema("k", "missing"))?
            .as_u64()
            .filter(|k| (1..=u32::MAX as u64).contains(k))
            .ok_or_else(|| schema("k", "expected a positive integer"))? as u32;
        let lambda = obj
            .get("lambda")
            .ok_or_else(|| schema("lambda", "missing"))?
            .as_f64()
            .filter(|l| *l > 0.0 && l.is_finite())
            .ok_or_else(|| schema("lambda", "expected a positive number"))?;
        let jet = jet_field::<2>(obj.get("H").ok_or_else(|| schema("H", "missing"))?, "H")?;
        let jet4 = match obj.get("H2") {
            None | Some(Value::Null) => None,
            Some(v) => Some(jet_field::<4>(v, "H2")?),
        };
        let constants_override = match obj.get("constants_override") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                serde_json::from_value::<ConstantsOverride>(v.clone())
                    .map_err(|e| schema("constants_override", e.to_string()))?,
            ),
        };
        let flag = |name: &str| -> Result<bool> {
            match obj.get(name) {
                None => Ok(false),
                Some(v) => v
                    .as_bool()
                    .ok_or_else(|| schema(name, "expected a boolean")),
            }
        };
        let t_values = match obj.get("t_values") {
            None => DEFAULT_T_VALUES.to_vec(),
            Some(v) => {
                let items = v
                    .as_array()
                    .ok_or_else(|| schema("t_values", "expected an array"))?;
                items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        x.as_f64()
                            .ok_or_else(|| schema(&format!("t_values[{i}]"), "expected a number"))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let wall_tol = match obj.get("wall_tol") {
            None => WALL_TOL,
            Some(v) => v
                .as_f64()
                .filter(|t| *t >= 0.0)
                .ok_or_else(|| schema("wall_tol", "expected a nonnegative number"))?,
        };
        Ok(ObstructionInput {
            group,
            k,
            lambda,
            jet,
            jet4,
            constants_override,
            gauge_project: flag("gauge_project")?,
            require_higher_order: flag("require_higher_order")?,
            t_values,
            wall_tol,
        })
    }
}

/// `minor · A · t⁴` at the sampled `t`, with the leading block at the first sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetLeading {
    pub coefficient_t4: f64,
    pub samples: Vec<[f64; 2]>,
    pub leading_block_first_sample: Option<[[f64; 3]; 3]>,
}

/// Direction in which the determinant crosses the wall.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSummary {
    /// `d/dt det R₊ = −a · minor²` with `a > 0`.
    pub transversal: String,
    /// Leading coefficient of the obstruction parameter, `z(t) ≈ −μ₁ t`.
    pub z_leading_coefficient: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub schema_version: u32,
    pub group: GroupKind,
    pub k: u32,
    pub lambda_scale: f64,
    pub conventions: String,
    pub gauge_projected: bool,
    pub bianchi_residual: f64,
    pub rplus_block: [[f64; 3]; 3],
    pub first_row_pairing: [f64; 3],
    pub first_row_norm: f64,
    pub lambda: [f64; 3],
    pub minor: f64,
    pub d: Option<f64>,
    pub mu1: Option<f64>,
    pub a: Option<f64>,
    pub a_moment_form: Option<f64>,
    pub det_leading: Option<DetLeading>,
    pub det_bold: f64,
    pub wall_side: WallSide,
    pub wall_tol: f64,
    pub constants: InstantonConstants,
    pub crossing: CrossingSummary,
    pub notes: Vec<String>,
}

impl ObstructionReport {
    /// One-line summary naming the wall side.
    pub fn summary(&self) -> String {
        let fmt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
        format!(
            "wall side: {} (det bold R+ = {:.6e}, tol {:.1e}); lambda = ({:.6e}, {:.6e}, {:.6e}); mu1 = {}; A = {}",
            self.wall_side.name(),
            self.det_bold,
            self.wall_tol,
            self.lambda[0],
            self.lambda[1],
            self.lambda[2],
            fmt(self.mu1),
            fmt(self.a),
        )
    }
}

/// Runs the pipeline on a parsed input.
pub fn obstruction_report(input: &ObstructionInput) -> Result<ObstructionReport> {
    let constants = InstantonConstants::resolve(
        input.group,
        input.k,
        input.lambda,
        input.constants_override.as_ref(),
    )?;
    let jet = if input.gauge_project {
        gauge_projection(&input.jet).jet
    } else {
        input.jet.clone()
    };
    let block = curvature_from_jet2(&jet);
    let norm = first_row_norm(&block);
    let mut notes = Vec::new();
    let higher = norm <= FIRST_ROW_TOL;
    if !higher {
        if input.require_higher_order {
            return Err(AleError::FirstObstructionNonzero { norm });
        }
        notes.push(format!(
            "R+(H)(I1) has norm {norm:.3e}; mu1, D and A are undefined"
        ));
    }
    let minor_value = minor(&block);
    let (d, mu1, a, a_moment) = if higher {
        match input.group {
            GroupKind::A => {
                let jet4 = input.jet4.clone().unwrap_or_else(Jet4::zero);
                let d = d2_invariant(&jet, &jet4)?;
                (
                    Some(d),
                    Some(mu1_ak(&block, d, input.k, &constants)?),
                    Some(a_coefficient(&block, d, input.k, &constants)?),
                    Some(a_coefficient_moment_form(&block, d, input.k, &constants)?),
                )
            }
            GroupKind::D | GroupKind::E => {
                notes.push("central-node gluing: A = 0".into());
                (
                    None,
                    Some(mu1_generic(&block, &constants)?),
                    Some(0.0),
                    None,
                )
            }
        }
    } else {
        (None, None, None, None)
    };
    let det_leading = a.map(|a| DetLeading {
        coefficient_t4: minor_value * a,
        samples: input
            .t_values
            .iter()
            .zip(det_leading(minor_value, a, &input.t_values))
            .map(|(t, v)| [*t, v])
            .collect(),
        leading_block_first_sample: input.t_values.first().map(|t| {
            let m = leading_block(&block, a, *t);
            std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
        }),
    });
    let det_bold = bold_det(&block);
    Ok(ObstructionReport {
        schema_version: SCHEMA_VERSION,
        group: input.group,
        k: input.k,
        lambda_scale: input.lambda,
        conventions: format!(
            "{}; indices 0-based (i -> x^(i+1))",
            CurvatureBlock::CONVENTION
        ),
        gauge_projected: input.gauge_project,
        bianchi_residual: bianchi_residual(&jet),
        rplus_block: block.rplus,
        first_row_pairing: first_row_pairing(&block),
        first_row_norm: norm,
        lambda: lambda_obstruction(&block, &constants),
        minor: minor_value,
        d,
        mu1,
        a,
        a_moment_form: a_moment,
        det_leading,
        det_bold,
        wall_side: wall_side(det_bold, input.wall_tol),
        wall_tol: input.wall_tol,
        constants,
        crossing: CrossingSummary {
            transversal: "d/dt det R+ = -a (R22 R33 - R23^2)^2 with a > 0".into(),
            z_leading_coefficient: mu1.map(|m| -m),
        },
        notes,
    })
}
