//! Far-field decay series as CSV.

use super::geometry::validate_family;
use crate::error::{AleError, Result};
use crate::fit::loglog_slope;
use crate::gh_space::{metric_deviation, moment_deviation, GHConfig};
use crate::l2_harmonic::{build_omega, c_gamma_estimate};
use crate::par;
use serde::Serialize;

pub const CSV_HEADER: &str =
    "r,metric_deviation,moment_deviation,c_gamma_estimate,metric_exponent,moment_exponent,flag";

/// One radius of the series. Exponents are fitted over all rows that
/// evaluated cleanly and repeated on each row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptRow {
    pub r: f64,
    pub metric_deviation: Option<f64>,
    pub moment_deviation: Option<f64>,
    pub c_gamma_estimate: Option<f64>,
    pub metric_exponent: Option<f64>,
    pub moment_exponent: Option<f64>,
    /// Empty, or a `;`-joined list of `fit_unstable` and `evaluation_error`.
    pub flag: String,
}

/// Rejects an empty list and radii that are not positive and finite.
pub fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(AleError::InvalidConfig(
            "at least one radius is required".into(),
        ));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(AleError::InvalidConfig(format!(
            "radii must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

fn exponent(radii: &[f64], values: &[Option<f64>]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(values)
        .filter_map(|(r, v)| v.map(|v| (*r, v)))
        .unzip();
    loglog_slope(&xs, &ys).ok().filter(|s| s.is_finite())
}

/// Series for `A_k` at scale `λ`. Only configuration errors abort; fit and
/// evaluation failures become flags.
pub fn asympt_rows(k: u32, lambda: f64, radii: &[f64]) -> Result<Vec<AsymptRow>> {
    validate_family(k, lambda)?;
    validate_radii(radii)?;
    let cfg = GHConfig::a_series(k, lambda)?;
    let bundle = build_omega(&cfg)?;
    let samples = par::map(radii.len(), |i| {
        let r = radii[i];
        let m = moment_deviation(&cfg, r);
        (
            metric_deviation(&cfg, r).ok(),
            m.is_finite().then_some(m),
            c_gamma_estimate(&bundle, r).ok(),
        )
    });
    let metric: Vec<Option<f64>> = samples.iter().map(|s| s.0).collect();
    let moment: Vec<Option<f64>> = samples.iter().map(|s| s.1).collect();
    let metric_exponent = exponent(radii, &metric);
    let moment_exponent = exponent(radii, &moment);
    Ok(radii
        .iter()
        .zip(samples)
        .map(|(&r, (g, m, c))| {
            let mut flags = Vec::new();
            if metric_exponent.is_none() || moment_exponent.is_none() {
                flags.push("fit_unstable");
            }
            if g.is_none() || m.is_none() || c.is_none() {
                flags.push("evaluation_error");
            }
            AsymptRow {
                r,
                metric_deviation: g,
                moment_deviation: m,
                c_gamma_estimate: c,
                metric_exponent,
                moment_exponent,
                flag: flags.join(";"),
            }
        })
        .collect())
}

pub fn asympt_csv(rows: &[AsymptRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:e}"));
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.r,
            cell(row.metric_deviation),
            cell(row.moment_deviation),
            cell(row.c_gamma_estimate),
            cell(row.metric_exponent),
            cell(row.moment_exponent),
            row.flag
        ));
    }
    out
}
