//! Refinement studies: measured order of convergence from a log-log fit.

use serde::{Deserialize, Serialize};

/// Least-squares slope of `ln(error)` against `ln(step)`.
///
/// Returns NaN if fewer than two usable (positive, finite) pairs exist.
pub fn fit_order(steps: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .filter(|(h, e)| h.is_finite() && e.is_finite() && **h > 0.0 && **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    pub order: f64,
}

impl RefinementStudy {
    pub fn new(steps: Vec<f64>, residuals: Vec<f64>) -> Self {
        let order = fit_order(&steps, &residuals);
        RefinementStudy { steps, residuals, order }
    }

    /// Successive error ratios `e_i / e_{i+1}`.
    pub fn ratios(&self) -> Vec<f64> {
        self.residuals.windows(2).map(|w| w[0] / w[1]).collect()
    }

    pub fn order_within(&self, target: f64, band: f64) -> bool {
        (self.order - target).abs() <= band
    }

    pub fn finest(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_gives_its_exponent() {
        let steps = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = steps.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
        assert!((fit_order(&steps, &errs) - 2.0).abs() < 1e-12);
        let errs4: Vec<f64> = steps.iter().map(|h: &f64| 0.5 * h.powi(4)).collect();
        let s = RefinementStudy::new(steps.to_vec(), errs4);
        assert!(s.order_within(4.0, 1e-12));
        assert!(s.ratios().iter().all(|r| (r - 16.0).abs() < 1e-9));
    }

    #[test]
    fn degenerate_inputs_give_nan() {
        assert!(fit_order(&[0.1], &[1.0]).is_nan());
        assert!(fit_order(&[0.1, 0.05], &[0.0, 0.0]).is_nan());
    }
}
