//! Small least-squares fits used by the decay and asymptotic checks.

use crate::error::{AleError, Result};
use nalgebra::{DMatrix, DVector};

/// Condition number above which a fit is rejected.
pub const MAX_CONDITION: f64 = 1e10;

/// Least-squares solution of `A c ≈ b` with the condition number of `A`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let s = &svd.singular_values;
    let (max, min) = s.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &v| {
        (hi.max(v), lo.min(v))
    });
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(AleError::FitUnstable { condition });
    }
    let c = svd
        .solve(b, 0.0)
        .map_err(|_| AleError::FitUnstable { condition })?;
    Ok((c, condition))
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 || ys.iter().any(|y| !(*y > 0.0)) {
        return Err(AleError::FitUnstable {
            condition: f64::INFINITY,
        });
    }
    let a = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i].ln() });
    let b = DVector::from_iterator(ys.len(), ys.iter().map(|y| y.ln()));
    Ok(least_squares(&a, &b)?.0[1])
}

/// Geometric sequence of `n ≥ 2` radii from `lo` to `hi`.
pub fn geometric_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_slope() {
        let xs = geometric_radii(2.0, 50.0, 7);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-4.0)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fit_rejected() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            least_squares(&a, &b),
            Err(AleError::FitUnstable { .. })
        ));
        assert!(loglog_slope(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }
}
