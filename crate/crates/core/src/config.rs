use crate::error::{Error, Result};

/// Convergence thresholds and iteration caps for every iterative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative gap |x_n - y_n| / x_n at which the AGM iteration stops.
    pub agm_rel_tol: f64,
    /// Relative bracket width at which bisection stops.
    pub root_abs_tol: f64,
    /// Truncation threshold for the theta and hypergeometric series.
    pub series_eps: f64,
    /// Relative tolerance of the adaptive quadrature.
    pub quad_tol: f64,
    pub agm_max_iter: usize,
    pub root_max_iter: usize,
    pub series_max_terms: usize,
    pub quad_max_subdivisions: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            agm_rel_tol: 4.0 * f64::EPSILON,
            root_abs_tol: 1e-13,
            series_eps: 1e-16,
            quad_tol: 1e-12,
            agm_max_iter: 64,
            root_max_iter: 256,
            series_max_terms: 100_000_000,
            quad_max_subdivisions: 20_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.agm_rel_tol, self.root_abs_tol, self.series_eps, self.quad_tol];
        if tols.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidConfig("tolerances must be positive and finite"));
        }
        let caps = [
            self.agm_max_iter,
            self.root_max_iter,
            self.series_max_terms,
            self.quad_max_subdivisions,
        ];
        if caps.contains(&0) {
            return Err(Error::InvalidConfig("iteration caps must be at least 1"));
        }
        Ok(())
    }
}
