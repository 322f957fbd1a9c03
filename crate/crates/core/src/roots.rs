//! Bisection for monotone increasing functions.

use crate::error::{Error, Phase, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Midpoint {
    Arithmetic,
    /// `sqrt(lo * hi)`; requires `lo > 0`. Resolves roots spanning many decades.
    Geometric,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Bisection {
    pub midpoint: Midpoint,
    /// Stop once `hi - lo <= rel_tol * max(|lo|, |hi|)`.
    pub rel_tol: f64,
    /// Absolute width floor, for roots at or near zero.
    pub abs_tol: f64,
    /// Stop as soon as `|f(mid)| <= value_tol`.
    pub value_tol: f64,
    pub max_iter: usize,
}

impl Bisection {
    /// Find the sign change of an increasing `f` inside `[lo, hi]`.
    ///
    /// The caller guarantees `f(lo) <= 0 <= f(hi)`.
    pub fn solve(&self, mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<Root> {
        debug_assert!(lo <= hi);
        debug_assert!(self.midpoint == Midpoint::Arithmetic || lo > 0.0);
        let mut iterations = 0;
        loop {
            let width = hi - lo;
            if width <= self.rel_tol * lo.abs().max(hi.abs()) || width <= self.abs_tol {
                return Ok(Root { value: self.mid(lo, hi), iterations });
            }
            if iterations >= self.max_iter {
                return Err(Error::MaxIterationsExceeded { phase: Phase::RootFinding, limit: self.max_iter });
            }
            let mid = self.mid(lo, hi);
            if mid <= lo || mid >= hi {
                // Bracket collapsed to adjacent floats.
                return Ok(Root { value: mid.clamp(lo, hi), iterations });
            }
            iterations += 1;
            let v = f(mid)?;
            if v.abs() <= self.value_tol {
                return Ok(Root { value: mid, iterations });
            } else if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    fn mid(&self, lo: f64, hi: f64) -> f64 {
        match self.midpoint {
            Midpoint::Arithmetic => lo + 0.5 * (hi - lo),
            Midpoint::Geometric => lo.sqrt() * hi.sqrt(),
        }
    }
}
