//! Benchmark fixtures shared by the criterion targets.

use agmstar::verify::log_space;

/// Log-spaced operand pairs covering the well-conditioned range.
pub fn operand_pairs(n: usize) -> Vec<(f64, f64)> {
    let axis = log_space(0.1, 20.0, n);
    axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect()
}
