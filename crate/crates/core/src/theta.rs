//! The theta series `θ(q) = 1 + 2 Σ_{n≥1} q^{n²}` on the real interval (-1, 1)
//! and the inversion of `v = θ²(q)`.
//!
//! For `q < -1/2` the alternating series cancels badly (the value at
//! `q = -0.9` is ~7e-10 while its terms are O(1)), so negative nomes are
//! reduced with the product identity `θ(-p) θ(p) = θ(-p²)²`, which only ever
//! sums positive-term series or mildly alternating ones.

use crate::config::ToleranceConfig;
use crate::error::{Error, Phase, Result};
use crate::roots::{Bisection, Midpoint};
use crate::types::{Nome, PositiveReal};

/// Largest |q| accepted by the series evaluation.
pub const Q_MAX: f64 = 0.999;
/// Largest |q| the theta backend of the star operation accepts.
pub const Q_SAFE: f64 = 0.9;
/// Below this nome the duplication identity replaces the direct sum.
const DIRECT_NEGATIVE_LIMIT: f64 = -0.5;

/// Smallest `N` with `|q|^(N²) < eps / 2`; the series is summed up to `n = N`.
pub fn truncation_terms(q: f64, eps: f64) -> usize {
    let a = q.abs();
    if a == 0.0 {
        return 1;
    }
    let target = (0.5 * eps).ln();
    let ln_a = a.ln();
    let below = |n: usize| (n * n) as f64 * ln_a < target;
    let mut n = if target >= 0.0 { 1 } else { (target / ln_a).sqrt().ceil().max(1.0) as usize };
    while n > 1 && below(n - 1) {
        n -= 1;
    }
    while !below(n) {
        n += 1;
    }
    n
}

fn check_nome(q: f64) -> Result<()> {
    if q.is_finite() && q.abs() <= Q_MAX {
        Ok(())
    } else {
        Err(Error::DomainOverflow(format!("nome {q} exceeds the supported |q| <= {Q_MAX}")))
    }
}

fn direct_series(q: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let n_terms = truncation_terms(q, cfg.series_eps);
    if n_terms > cfg.series_max_terms {
        return Err(Error::MaxIterationsExceeded { phase: Phase::Series, limit: cfg.series_max_terms });
    }
    Ok(partial_sum(q, n_terms))
}

/// `1 + 2 Σ_{n=1}^{n_terms} q^{n²}`, summed smallest term first.
fn partial_sum(q: f64, n_terms: usize) -> f64 {
    // q^{(n+1)²} = q^{n²} · q^{2n+1}
    let q2 = q * q;
    let mut term = q;
    let mut ratio = q * q2;
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        terms.push(term);
        term *= ratio;
        ratio *= q2;
    }
    let tail: f64 = terms.iter().rev().sum();
    1.0 + 2.0 * tail
}

/// `θ(q) = 1 + 2 Σ q^{n²}`.
pub fn theta(q: f64, cfg: &ToleranceConfig) -> Result<f64> {
    check_nome(q)?;
    theta_unchecked(q, cfg)
}

fn theta_unchecked(q: f64, cfg: &ToleranceConfig) -> Result<f64> {
    if q >= DIRECT_NEGATIVE_LIMIT {
        return direct_series(q, cfg);
    }
    let p = -q;
    let half = theta_unchecked(-(p * p), cfg)?;
    Ok(half * half / direct_series(p, cfg)?)
}

/// `θ²(q)`.
pub fn theta_sq(q: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let t = theta(q, cfg)?;
    Ok(t * t)
}

/// The nome `q` with `θ²(q) = v`, found by bisection.
///
/// The residual satisfies `|θ²(q) - v| <= root_abs_tol · v` wherever the
/// floating-point resolution of `q` allows it, which holds on `|q| <= Q_SAFE`.
pub fn inverse_theta_sq(v: f64, cfg: &ToleranceConfig) -> Result<Nome> {
    inverse_theta_sq_counted(v, cfg).map(|(q, _)| q)
}

/// [`inverse_theta_sq`] plus the number of bisection steps taken.
pub(crate) fn inverse_theta_sq_counted(v: f64, cfg: &ToleranceConfig) -> Result<(Nome, usize)> {
    let v = PositiveReal::named("v", v)?.get();
    if v == 1.0 {
        return Ok((Nome::new(0.0)?, 0));
    }
    let (lo_v, hi_v) = (theta_sq(-Q_MAX, cfg)?, theta_sq(Q_MAX, cfg)?);
    if v < lo_v || v > hi_v {
        return Err(Error::DomainOverflow(format!(
            "theta^2 value {v} is outside the reachable range [{lo_v:e}, {hi_v}]"
        )));
    }

    // Grow the bracket from 0 toward ±Q_MAX: q_k = ±Q_MAX (1 - 2^-k).
    let dir = if v > 1.0 { 1.0 } else { -1.0 };
    let mut inner = 0.0;
    let mut outer = None;
    let mut gap = 0.5;
    for _ in 0..64 {
        let cand = dir * Q_MAX * (1.0 - gap);
        let val = theta_sq(cand, cfg)?;
        if (val - v) * dir >= 0.0 {
            outer = Some(cand);
            break;
        }
        inner = cand;
        gap *= 0.5;
    }
    let outer = match outer {
        Some(o) => o,
        None if (theta_sq(dir * Q_MAX, cfg)? - v) * dir >= 0.0 => dir * Q_MAX,
        None => return Err(Error::BracketFailure { lo: inner, hi: dir * Q_MAX }),
    };
    let (lo, hi) = if dir > 0.0 { (inner, outer) } else { (outer, inner) };

    let bisection = Bisection {
        midpoint: Midpoint::Arithmetic,
        rel_tol: 0.0,
        abs_tol: 0.0,
        value_tol: cfg.root_abs_tol * v,
        max_iter: cfg.root_max_iter,
    };
    let root = bisection.solve(|q| Ok(theta_sq(q, cfg)? - v), lo, hi)?;
    Ok((Nome::new(root.value)?, root.iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn theta_at_zero() {
        assert_eq!(theta(0.0, &cfg()).unwrap(), 1.0);
        assert_eq!(theta_sq(0.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn theta_at_one_tenth() {
        // 1 + 0.2 + 2e-4 + 2e-9 + 2e-16
        let t = theta(0.1, &cfg()).unwrap();
        assert!((t - 1.200_200_002_000_000_3).abs() <= 2.0 * f64::EPSILON);
        // mpmath: 1.4404800448008005108363963801831125649448703108079
        let t2 = theta_sq(0.1, &cfg()).unwrap();
        assert!((t2 - 1.440_480_044_800_800_5).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn negative_nomes_against_reference() {
        // 400-digit mpmath references for θ(-q).
        let cases = [
            (0.6, 0.039_603_164_525_804_77),
            (0.9, 7.373_526_938_473_0e-10),
            (0.95, 2.010_807_637_455_688e-20),
            (0.99, 8.459_276_341_621_215e-106),
        ];
        for (q, want) in cases {
            let got = theta(-q, &cfg()).unwrap();
            assert!((got / want - 1.0).abs() < 1e-12, "q = -{q}: {got:e} vs {want:e}");
        }
    }

    #[test]
    fn domain_cap() {
        assert!(matches!(theta(0.9995, &cfg()), Err(Error::DomainOverflow(_))));
        assert!(matches!(theta(-1.0, &cfg()), Err(Error::DomainOverflow(_))));
        assert!(theta(Q_MAX, &cfg()).is_ok());
        assert!(theta(-Q_MAX, &cfg()).is_ok());
    }

    #[test]
    fn truncation_examples() {
        // 0.1^16 = 1e-16 is not below 5e-17; 0.1^25 is.
        assert_eq!(truncation_terms(0.1, 1e-16), 5);
        assert_eq!(truncation_terms(-0.1, 1e-16), 5);
        // ceil(sqrt(ln(5e-17) / ln 0.99)) = ceil(61.11)
        assert_eq!(truncation_terms(0.99, 1e-16), 62);
        assert_eq!(truncation_terms(0.1, 0.5), 1);
        assert_eq!(truncation_terms(0.0, 1e-16), 1);
        assert_eq!(truncation_terms(0.5, 3.0), 1);
    }

    #[test]
    fn truncation_is_minimal() {
        for &q in &[0.05, 0.3, 0.5, 0.77, 0.9, 0.999] {
            for &eps in &[1e-3, 1e-10, 1e-16, 1e-20] {
                let n = truncation_terms(q, eps);
                let ln = |k: usize| (k * k) as f64 * f64::ln(q);
                assert!(ln(n) < (eps / 2.0).ln());
                assert!(n == 1 || ln(n - 1) >= (eps / 2.0).ln());
            }
        }
    }

    #[test]
    fn doubling_terms_changes_little() {
        for &q in &[-0.5, -0.3, 0.2, 0.6, 0.9, 0.99] {
            let n = truncation_terms(q, cfg().series_eps);
            let base = partial_sum(q, n);
            let long = partial_sum(q, 2 * n);
            // Truncation error plus a few ulps of reassociation.
            let tol = (cfg().series_eps + 4.0 * f64::EPSILON) * base.max(1.0);
            assert!((base - long).abs() <= tol, "q = {q}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_theta_sq(1.0, &cfg()).unwrap().get(), 0.0);
        let q = inverse_theta_sq(1.440_480_044_800_800_5, &cfg()).unwrap().get();
        assert!((q - 0.1).abs() < 1e-13);
        let v = theta_sq(0.3, &cfg()).unwrap();
        let q = inverse_theta_sq(v, &cfg()).unwrap().get();
        assert!((q - 0.3).abs() < 1e-13);
    }

    #[test]
    fn inverse_out_of_range() {
        let too_big = theta_sq(Q_MAX, &cfg()).unwrap() * 1.01;
        assert!(matches!(inverse_theta_sq(too_big, &cfg()), Err(Error::DomainOverflow(_))));
        assert!(matches!(inverse_theta_sq(-1.0, &cfg()), Err(Error::NonPositiveInput { .. })));
    }

    #[test]
    fn inverse_residual_on_safe_range() {
        let cfg = cfg();
        for i in 0..=36 {
            let q = -Q_SAFE + i as f64 * 0.05;
            let v = theta_sq(q, &cfg).unwrap();
            let back = inverse_theta_sq(v, &cfg).unwrap().get();
            let resid = (theta_sq(back, &cfg).unwrap() - v).abs();
            assert!(resid <= cfg.root_abs_tol * v.max(1.0), "q = {q}: {resid:e}");
            assert!(resid <= cfg.root_abs_tol * v, "q = {q}: relative {resid:e}");
        }
    }
}
