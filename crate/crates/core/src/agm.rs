//! Gauss' arithmetic-geometric mean.
//!
//! The iteration `x_{n+1} = (x_n + y_n) / 2`, `y_{n+1} = sqrt(x_n y_n)` is run
//! until the relative gap drops below `agm_rel_tol`, then the midpoint of the
//! final pair is returned. Operands are sorted first, so `agm(x, y)` and
//! `agm(y, x)` are bit-identical.

use crate::config::ToleranceConfig;
use crate::error::{Error, Phase, Result};
use crate::types::PositiveReal;

/// Operand ratio above which the iteration is run on `(1, lo / hi)` instead.
pub const RESCALE_RATIO: f64 = 1e8;
const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;

/// Every iterate of one AGM evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct AgmTrace {
    /// `(x_n, y_n)` starting with the operands as given.
    pub pairs: Vec<(f64, f64)>,
    /// Number of refinement steps taken.
    pub iterations: usize,
    pub converged: bool,
}

impl AgmTrace {
    /// Midpoint of the final pair.
    pub fn mean(&self) -> f64 {
        let (a, b) = *self.pairs.last().expect("trace always holds the operands");
        0.5 * (a + b)
    }

    /// Relative gap `|x_N - y_N| / max(x_N, y_N)` of the final pair.
    pub fn final_gap(&self) -> f64 {
        let (a, b) = *self.pairs.last().expect("trace always holds the operands");
        (a - b).abs() / a.max(b)
    }
}

/// The arithmetic-geometric mean of two positive numbers.
pub fn agm(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<f64> {
    run(x, y, cfg, None)
}

/// Like [`agm`], returning the full iterate sequence.
pub fn agm_trace(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<AgmTrace> {
    let mut pairs = Vec::with_capacity(8);
    run(x, y, cfg, Some(&mut pairs))?;
    Ok(AgmTrace { iterations: pairs.len() - 1, pairs, converged: true })
}

/// Convenience for already-validated operands.
pub fn agm_pos(x: PositiveReal, y: PositiveReal, cfg: &ToleranceConfig) -> Result<PositiveReal> {
    agm(x.get(), y.get(), cfg).map(|m| PositiveReal::new(m).expect("agm of positives is positive"))
}

fn run(x: f64, y: f64, cfg: &ToleranceConfig, mut trace: Option<&mut Vec<(f64, f64)>>) -> Result<f64> {
    let x = PositiveReal::named("x", x)?.get();
    let y = PositiveReal::named("y", y)?.get();
    if let Some(t) = trace.as_deref_mut() {
        t.push((x, y));
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };

    let mut steps = 0usize;
    let (scale, mut a, mut b) = if hi / lo > RESCALE_RATIO || hi > RESCALE_HI || lo < RESCALE_LO {
        let ratio = lo / hi;
        if ratio >= f64::MIN_POSITIVE {
            (hi, 1.0, ratio)
        } else {
            // lo / hi underflows: take the first step with split square roots.
            let a1 = 0.5 * hi + 0.5 * lo;
            let b1 = hi.sqrt() * lo.sqrt();
            steps = 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push((a1, b1));
            }
            (a1, 1.0, b1 / a1)
        }
    } else {
        (1.0, hi, lo)
    };

    while (a - b).abs() > cfg.agm_rel_tol * a {
        if steps >= cfg.agm_max_iter {
            return Err(Error::MaxIterationsExceeded { phase: Phase::Agm, limit: cfg.agm_max_iter });
        }
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        steps += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push((scale * a, scale * b));
        }
    }
    Ok(scale * (0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(agm(1.0, 1.0, &cfg()).unwrap(), 1.0);
        assert_eq!(agm(7.0, 7.0, &cfg()).unwrap(), 7.0);
        assert_eq!(agm(1e300, 1e300, &cfg()).unwrap(), 1e300);
    }

    #[test]
    fn one_two() {
        // 50-digit reference: 1.4567910310469068691864323832650819749738639432213
        let m = agm(1.0, 2.0, &cfg()).unwrap();
        assert!((m - 1.456_791_031_046_906_8).abs() <= 2.0 * f64::EPSILON * m);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(agm(1.0, -2.0, &cfg()), Err(Error::NonPositiveInput { name: "y", .. })));
        assert!(matches!(agm(0.0, 2.0, &cfg()), Err(Error::NonPositiveInput { name: "x", .. })));
        assert!(agm(f64::NAN, 2.0, &cfg()).is_err());
        assert!(agm(1.0, f64::INFINITY, &cfg()).is_err());
    }

    #[test]
    fn exhausted_budget() {
        let cfg = ToleranceConfig { agm_max_iter: 2, ..cfg() };
        assert!(matches!(
            agm(1.0, 2.0, &cfg),
            Err(Error::MaxIterationsExceeded { phase: Phase::Agm, .. })
        ));
    }

    #[test]
    fn trace_of_equal_pair() {
        let t = agm_trace(1.0, 1.0, &cfg()).unwrap();
        assert_eq!(t.pairs, vec![(1.0, 1.0)]);
        assert_eq!(t.iterations, 0);
        assert!(t.converged);
    }

    #[test]
    fn trace_first_step() {
        let t = agm_trace(1.0, 2.0, &cfg()).unwrap();
        assert_eq!(t.pairs[0], (1.0, 2.0));
        assert_eq!(t.pairs[1].0, 1.5);
        assert!((t.pairs[1].1 - std::f64::consts::SQRT_2).abs() < 1e-15);
        let m = agm(1.0, 2.0, &cfg()).unwrap();
        assert!((t.mean() - m).abs() <= cfg().agm_rel_tol * m);
        assert!(t.iterations <= 6);
    }

    #[test]
    fn trace_homogeneity() {
        let t = agm_trace(4.0, 9.0, &cfg()).unwrap();
        let m = 2.0 * agm(2.0, 4.5, &cfg()).unwrap();
        assert!((t.mean() - m).abs() <= 4.0 * cfg().agm_rel_tol * m);
    }

    #[test]
    fn extreme_ratios() {
        // lo / hi underflows; agm(1, r) ~ pi / (2 ln(4 / r)) for tiny r.
        let m = agm(1e300, 1e-300, &cfg()).unwrap();
        let ln_4_over_r = 4f64.ln() + 600.0 * 10f64.ln();
        let approx = 1e300 * std::f64::consts::PI / (2.0 * ln_4_over_r);
        assert!((m / approx - 1.0).abs() < 1e-6, "{m} vs {approx}");
        let m = agm(f64::MAX, f64::MIN_POSITIVE / 1024.0, &cfg()).unwrap();
        assert!(m.is_finite() && m > 0.0);
        let m = agm(f64::MAX, f64::MAX, &cfg()).unwrap();
        assert_eq!(m, f64::MAX);
    }

    #[test]
    fn rescaled_path_matches_direct() {
        // Just across the rescale threshold the two paths must agree.
        let lo = 1.0;
        for hi in [0.99e8, 1.01e8] {
            let m = agm(hi, lo, &cfg()).unwrap();
            let direct = {
                let (mut a, mut b) = (hi, lo);
                for _ in 0..64 {
                    let n = 0.5 * (a + b);
                    b = (a * b).sqrt();
                    a = n;
                }
                a
            };
            assert!((m - direct).abs() <= 8.0 * f64::EPSILON * m);
        }
    }
}
