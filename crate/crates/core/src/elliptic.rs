//! The complete elliptic integral
//! `I(x, y) = ∫_0^{π/2} dφ / sqrt(x² cos²φ + y² sin²φ)`
//! and the series `F(1/2, 1/2; 1; z)`.
//!
//! `elliptic_i` uses Gauss' relation `I(x, y) = π / (2 agm(x, y))`; the
//! quadrature route is kept as an independent check on it.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::agm::agm;
use crate::config::ToleranceConfig;
use crate::error::{Error, Phase, Result};
use crate::quadrature;
use crate::types::PositiveReal;

/// Largest |z| accepted by [`hyp_f_half`].
pub const Z_MAX: f64 = 0.999_999;
/// Largest operand ratio accepted by [`elliptic_i_quadrature`].
pub const QUADRATURE_MAX_RATIO: f64 = 1e6;

/// Integrand parameters of the elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub x: PositiveReal,
    pub y: PositiveReal,
}

impl EllipticPair {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        Ok(Self { x: PositiveReal::named("x", x)?, y: PositiveReal::named("y", y)? })
    }
}

/// `π / (2 agm(x, y))`.
pub fn elliptic_i(p: EllipticPair, cfg: &ToleranceConfig) -> Result<f64> {
    Ok(FRAC_PI_2 / agm(p.x.get(), p.y.get(), cfg)?)
}

/// The elliptic integral by adaptive Gauss–Legendre quadrature.
pub fn elliptic_i_quadrature(p: EllipticPair, cfg: &ToleranceConfig) -> Result<f64> {
    let (x, y) = (p.x.get(), p.y.get());
    if x.max(y) / x.min(y) > QUADRATURE_MAX_RATIO {
        return Err(Error::DomainOverflow(format!(
            "quadrature needs max/min <= {QUADRATURE_MAX_RATIO:e}, got {x} and {y}"
        )));
    }
    let (x2, y2) = (x * x, y * y);
    quadrature::integrate(
        |phi| {
            let (s, c) = phi.sin_cos();
            1.0 / (x2 * c * c + y2 * s * s).sqrt()
        },
        0.0,
        FRAC_PI_2,
        cfg.quad_tol,
        cfg.quad_max_subdivisions,
    )
}

/// `F(1/2, 1/2; 1; z) = Σ ((1/2)_n / n!)² zⁿ`.
///
/// For `z >= 0` summation stops when the geometric bound on the remaining
/// tail, `t_n z / (1 - z)`, falls below `series_eps` of the partial sum.
pub fn hyp_f_half(z: f64, cfg: &ToleranceConfig) -> Result<f64> {
    if !(z.is_finite() && z.abs() <= Z_MAX) {
        return Err(Error::DomainOverflow(format!("|z| = {} exceeds {Z_MAX}", z.abs())));
    }
    let tail_factor = if z > 0.0 { z / (1.0 - z) } else { 1.0 };
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0;
    let mut n = 0usize;
    loop {
        let r = (n as f64 + 0.5) / (n as f64 + 1.0);
        term *= r * r * z;
        n += 1;
        // Neumaier summation: up to ~10^8 terms near z = 1.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if (term * tail_factor).abs() < cfg.series_eps * (sum + comp).abs() {
            return Ok(sum + comp);
        }
        if n >= cfg.series_max_terms {
            return Err(Error::MaxIterationsExceeded { phase: Phase::Series, limit: cfg.series_max_terms });
        }
    }
}

/// `(2/π) I(1, sqrt(1 - z))`, the integral form of [`hyp_f_half`].
pub fn hyp_f_half_by_quadrature(z: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let p = EllipticPair::new(1.0, (1.0 - z).sqrt())?;
    Ok(2.0 / PI * elliptic_i_quadrature(p, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn pair(x: f64, y: f64) -> EllipticPair {
        EllipticPair::new(x, y).unwrap()
    }

    #[test]
    fn constant_integrands() {
        assert_eq!(elliptic_i(pair(1.0, 1.0), &cfg()).unwrap(), FRAC_PI_2);
        assert!((elliptic_i(pair(3.0, 3.0), &cfg()).unwrap() - PI / 6.0).abs() < 1e-15);
        let q = elliptic_i_quadrature(pair(1.0, 1.0), &cfg()).unwrap();
        assert!((q - FRAC_PI_2).abs() <= cfg().quad_tol * FRAC_PI_2);
    }

    #[test]
    fn one_two() {
        let want = FRAC_PI_2 / 1.456_791_031_046_906_8;
        let by_agm = elliptic_i(pair(1.0, 2.0), &cfg()).unwrap();
        assert!((by_agm - want).abs() < 1e-15);
        let by_quad = elliptic_i_quadrature(pair(1.0, 2.0), &cfg()).unwrap();
        assert!((by_quad - by_agm).abs() < 1e-10);
    }

    #[test]
    fn quadrature_scaling() {
        let a = elliptic_i_quadrature(pair(2.0, 4.0), &cfg()).unwrap();
        let b = elliptic_i_quadrature(pair(1.0, 2.0), &cfg()).unwrap();
        assert!((a - b / 2.0).abs() <= 2.0 * cfg().quad_tol);
    }

    #[test]
    fn quadrature_ratio_guard() {
        assert!(matches!(elliptic_i_quadrature(pair(1.0, 1e7), &cfg()), Err(Error::DomainOverflow(_))));
    }

    #[test]
    fn symmetric() {
        let a = elliptic_i(pair(0.3, 7.0), &cfg()).unwrap();
        let b = elliptic_i(pair(7.0, 0.3), &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hyp_values() {
        assert_eq!(hyp_f_half(0.0, &cfg()).unwrap(), 1.0);
        // mpmath hyp2f1(1/2, 1/2, 1, 1/4) = 1.0731820071493643750528417079703497956695268186314
        let v = hyp_f_half(0.25, &cfg()).unwrap();
        assert!((v - 1.073_182_007_149_364_4).abs() < 4e-16);
        let q = hyp_f_half_by_quadrature(0.5, &cfg()).unwrap();
        assert!((hyp_f_half(0.5, &cfg()).unwrap() - q).abs() < 1e-10);
    }

    #[test]
    fn hyp_near_one_tail_bound() {
        // F(1/2,1/2;1;z) = (2/π) K(z) = 1 / agm(1, sqrt(1 - z)).
        for z in [0.9f64, 0.99, 0.9999, -0.9] {
            let want = 1.0 / agm(1.0, (1.0 - z).sqrt(), &cfg()).unwrap();
            let got = hyp_f_half(z, &cfg()).unwrap();
            assert!((got / want - 1.0).abs() < 1e-13, "z = {z}: {got} vs {want}");
        }
    }

    #[test]
    fn hyp_domain_and_budget() {
        assert!(matches!(hyp_f_half(0.9999995, &cfg()), Err(Error::DomainOverflow(_))));
        assert!(matches!(hyp_f_half(f64::NAN, &cfg()), Err(Error::DomainOverflow(_))));
        let tight = ToleranceConfig { series_max_terms: 10, ..cfg() };
        assert!(matches!(hyp_f_half(0.9, &tight), Err(Error::MaxIterationsExceeded { .. })));
    }

    #[test]
    fn hyp_partial_sums_increase() {
        let z = 0.7;
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..200 {
            let r = (n as f64 + 0.5) / (n as f64 + 1.0);
            term *= r * r * z;
            assert!(term >= 0.0);
            let next = sum + term;
            assert!(next >= sum);
            sum = next;
        }
    }
}
