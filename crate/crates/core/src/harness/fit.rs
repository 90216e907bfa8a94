use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Ordinary least squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `(x, y)` points, typically `(n, log2 metric)`.
///
/// Needs at least three finite points with at least two distinct `x`.
/// A perfectly flat `y` gives `r² = 1`.
pub fn fit_loglinear(points: &[(f64, f64)]) -> Result<FitResult, HarnessError> {
    if points.len() < 3 {
        return Err(HarnessError::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(HarnessError::DegenerateFit("non-finite point".into()));
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(sxx, sxy), &(x, y)| {
        let dx = x - mean_x;
        (sxx + dx * dx, sxy + dx * (y - mean_y))
    });
    if sxx == 0.0 {
        return Err(HarnessError::DegenerateFit("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let (ss_res, ss_tot) = points.iter().fold((0.0, 0.0), |(res, tot), &(x, y)| {
        let e = y - (intercept + slope * x);
        let d = y - mean_y;
        (res + e * e, tot + d * d)
    });
    let r_squared = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(FitResult { slope, intercept, r_squared })
}
