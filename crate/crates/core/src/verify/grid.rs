use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::agm::agm;
use crate::config::ToleranceConfig;

/// Smallest operand or mean admitted to the extended grid; below ~0.0023
/// the value of `x ⋆ y` underflows binary64.
pub const MEAN_FLOOR: f64 = 0.01;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridGenerator {
    LogGrid,
    RandomSeeded,
    /// Log grid plus seeded random pairs (the default).
    Mixed,
    File,
}

/// Operand pairs the identity suite is evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    /// Pairs inside the theta backend's comfortable range.
    pub points: Vec<(f64, f64)>,
    /// Wider-range pairs that exercise the agm-inverse fallback.
    pub extended: Vec<(f64, f64)>,
    /// Pairs with both operands in (0, 1), where all three backends apply.
    pub unit_square: Vec<(f64, f64)>,
    /// Sorted operand values scanned for a non-associative triple.
    pub axis: Vec<f64>,
    pub generator: GridGenerator,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("grid line {line}: {message}")]
pub struct GridParseError {
    pub line: usize,
    pub message: String,
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (step * i as f64).exp() })
        .collect()
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn cartesian(axis: &[f64]) -> Vec<(f64, f64)> {
    axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect()
}

fn log_uniform_pairs(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (lo.ln(), hi.ln());
    let mut draw = move || (a + (b - a) * rng.random::<f64>()).exp();
    (0..count).map(|_| (draw(), draw())).collect()
}

impl SampleGrid {
    /// 7×7 log grid on [0.05, 20], 64 seeded log-uniform pairs on the same
    /// range, a 7×7 log grid on [1e-3, 1e3] restricted to `agm >= MEAN_FLOOR`,
    /// and an 8×8 log grid on [0.25, 0.95].
    pub fn default_with_seed(seed: u64) -> Self {
        let axis = log_space(0.05, 20.0, 7);
        let mut points = cartesian(&axis);
        points.extend(log_uniform_pairs(seed, 64, 0.05, 20.0));

        let cfg = ToleranceConfig::default();
        let extended = cartesian(&log_space(1e-3, 1e3, 7))
            .into_iter()
            .filter(|&(x, y)| agm(x, y, &cfg).is_ok_and(|m| m >= MEAN_FLOOR))
            .collect();
        let unit_square = cartesian(&log_space(0.25, 0.95, 8));

        Self { points, extended, unit_square, axis, generator: GridGenerator::Mixed, seed }
    }

    pub fn log_grid(lo: f64, hi: f64, n: usize) -> Self {
        let axis = log_space(lo, hi, n);
        Self::from_parts(cartesian(&axis), axis, GridGenerator::LogGrid, 0)
    }

    pub fn random(seed: u64, count: usize, lo: f64, hi: f64) -> Self {
        let points = log_uniform_pairs(seed, count, lo, hi);
        let axis = distinct_coordinates(&points);
        Self::from_parts(points, axis, GridGenerator::RandomSeeded, seed)
    }

    /// A grid made of exactly the given pairs.
    pub fn from_pairs(points: Vec<(f64, f64)>) -> Self {
        let axis = distinct_coordinates(&points);
        Self::from_parts(points, axis, GridGenerator::File, 0)
    }

    fn from_parts(points: Vec<(f64, f64)>, axis: Vec<f64>, generator: GridGenerator, seed: u64) -> Self {
        let unit_square = points.iter().copied().filter(|&(x, y)| x < 1.0 && y < 1.0).collect();
        Self { points, extended: Vec::new(), unit_square, axis, generator, seed }
    }

    /// Parse `x,y` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, GridParseError> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| GridParseError { line: i + 1, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(err(format!("expected `x,y`, got {} fields", fields.len())));
            }
            let mut pair = [0.0; 2];
            for (slot, f) in pair.iter_mut().zip(&fields) {
                let v: f64 = f.parse().map_err(|_| err(format!("`{f}` is not a number")))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(err(format!("operand {v} is not positive and finite")));
                }
                *slot = v;
            }
            points.push((pair[0], pair[1]));
        }
        if points.is_empty() {
            return Err(GridParseError { line: 0, message: "grid has no points".into() });
        }
        Ok(Self::from_pairs(points))
    }

    /// Every pair the pair-wise identities run on.
    pub fn all_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().chain(&self.extended).copied()
    }

    /// Sorted distinct operand values of all pairs, at or above `MEAN_FLOOR`.
    pub fn singles(&self) -> Vec<f64> {
        let pairs: Vec<_> = self.all_pairs().collect();
        distinct_coordinates(&pairs).into_iter().filter(|&v| v >= MEAN_FLOOR).collect()
    }

    /// Sorted distinct operand values of `points` only.
    pub fn point_singles(&self) -> Vec<f64> {
        distinct_coordinates(&self.points)
    }
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self::default_with_seed(DEFAULT_SEED)
    }
}

/// Sorted operand values, merging values within 1e-12 relative of each other
/// (log grids built over different ranges meet at 0.9999999999999998 and 1).
fn distinct_coordinates(points: &[(f64, f64)]) -> Vec<f64> {
    let mut v: Vec<f64> = points.iter().flat_map(|&(x, y)| [x, y]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|next, kept| *next <= *kept * (1.0 + 1e-12));
    v
}
