//! Adaptive Gauss–Legendre quadrature on a finite interval.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 10;

/// Nodes and weights of the `ORDER`-point rule on [-1, 1].
fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER).try_into().expect("ORDER nodes"))
}

/// Gauss–Legendre nodes and weights by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Integrate `f` over `[a, b]`, halving panels until the one-panel and
/// two-panel estimates agree to `rel_tol` (relative to the whole integral,
/// apportioned by panel width).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, max_subdivisions: usize) -> Result<f64> {
    let total_width = b - a;
    let whole = panel(&f, a, b);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    let mut stack = vec![(a, b, whole)];
    let mut result = 0.0;
    let mut subdivisions = 0;
    while let Some((lo, hi, coarse)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let fine = left + right;
        if (fine - coarse).abs() <= rel_tol * scale * (hi - lo) / total_width {
            result += fine;
            continue;
        }
        subdivisions += 1;
        if subdivisions > max_subdivisions {
            return Err(Error::QuadratureNotConverged { subdivisions: max_subdivisions });
        }
        stack.push((mid, hi, right));
        stack.push((lo, mid, left));
    }
    Ok(result)
}
