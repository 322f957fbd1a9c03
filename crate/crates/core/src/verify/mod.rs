//! Numerical verification of the algebraic laws of ⋆.
//!
//! [`run_suite`] evaluates every [`IdentityId`] over a [`SampleGrid`] and
//! returns one [`IdentityReport`] per identity, in [`IdentityId::ALL`] order.
//! A computation error inside one identity marks that identity failed (with
//! the offending operands as witness) and never aborts the others.

mod grid;
mod report;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agm::agm;
use crate::config::ToleranceConfig;
use crate::elliptic::{elliptic_i_quadrature, hyp_f_half, hyp_f_half_by_quadrature, EllipticPair};
use crate::error::{Error, Result};
use crate::star::{solve_right, star_inverse, star_value, star_with, Backend};
use crate::theta::{theta_sq, Q_SAFE};

pub use self::grid::{lin_space, log_space, GridGenerator, GridParseError, SampleGrid, DEFAULT_SEED, MEAN_FLOOR};
pub use self::report::{
    format_f64, parse as parse_reports, parse_f64, serialize as serialize_reports, IdentityReport, ReportFormat,
    ReportParseError, CSV_HEADER,
};

/// Fixed factors cycled through for the distributive law.
pub const DISTRIB_FACTORS: [f64; 4] = [0.3, 0.5, 2.0, 5.0];
/// Smallest operand for which `cross_backend` also runs the hypergeometric
/// backend. Below it `x ⋆ y` is tiny, `1 - s²` approaches 1 and the series
/// needs millions of terms per evaluation.
pub const HYPERGEOM_FLOOR: f64 = 0.25;
/// Left operands for the monotone-in-second-argument (cancellation) check.
pub const CANCEL_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    /// `1 ⋆ x = x`.
    #[serde(rename = "unit_A")]
    UnitA,
    /// `x ↦ x ⋆ x` strictly increasing.
    #[serde(rename = "diagonal_B")]
    DiagonalB,
    /// `x ⋆ y = μ ⋆ μ` with `μ = agm(x, y)`.
    #[serde(rename = "mean_C")]
    MeanC,
    /// `x ↦ a ⋆ x` strictly increasing.
    #[serde(rename = "cancel_D")]
    CancelD,
    /// `(ax) ⋆ (ay) = a ⋆ (a (x ⋆ y))`.
    #[serde(rename = "distrib_E")]
    DistribE,
    /// Inverse elements and `solve_right`.
    #[serde(rename = "inverse_F")]
    InverseF,
    /// `agm(θ²(q), θ²(-q)) = 1`.
    #[serde(rename = "gauss_eq4")]
    GaussEq4,
    /// `agm(1, x ⋆ y) = agm(x, y)`.
    #[serde(rename = "defining_eq6")]
    DefiningEq6,
    /// `x ⋆ y = ((x + y) / 2) ⋆ sqrt(xy)` and `x = ((x + 1) / 2) ⋆ sqrt(x)`.
    #[serde(rename = "meanstep_eq7")]
    MeanstepEq7,
    /// `(2n + 1) ⋆ (2n² + 2n + 1) = (2n + 1)²`.
    #[serde(rename = "integer_family")]
    IntegerFamily,
    /// Some triple with `(x ⋆ y) ⋆ z ≠ x ⋆ (y ⋆ z)`.
    #[serde(rename = "nonassoc_witness")]
    NonassocWitness,
    /// All applicable backends agree.
    #[serde(rename = "cross_backend")]
    CrossBackend,
    /// Quadrature of the elliptic integral equals `π / (2 agm)`.
    #[serde(rename = "elliptic_gauss")]
    EllipticGauss,
    /// `F(1/2, 1/2; 1; z) = (2/π) ∫ dφ / sqrt(1 - z sin²φ)`.
    #[serde(rename = "hyp_series_integral")]
    HypSeriesIntegral,
}

impl IdentityId {
    pub const ALL: [IdentityId; 14] = [
        IdentityId::UnitA,
        IdentityId::DiagonalB,
        IdentityId::MeanC,
        IdentityId::CancelD,
        IdentityId::DistribE,
        IdentityId::InverseF,
        IdentityId::GaussEq4,
        IdentityId::DefiningEq6,
        IdentityId::MeanstepEq7,
        IdentityId::IntegerFamily,
        IdentityId::NonassocWitness,
        IdentityId::CrossBackend,
        IdentityId::EllipticGauss,
        IdentityId::HypSeriesIntegral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::UnitA => "unit_A",
            IdentityId::DiagonalB => "diagonal_B",
            IdentityId::MeanC => "mean_C",
            IdentityId::CancelD => "cancel_D",
            IdentityId::DistribE => "distrib_E",
            IdentityId::InverseF => "inverse_F",
            IdentityId::GaussEq4 => "gauss_eq4",
            IdentityId::DefiningEq6 => "defining_eq6",
            IdentityId::MeanstepEq7 => "meanstep_eq7",
            IdentityId::IntegerFamily => "integer_family",
            IdentityId::NonassocWitness => "nonassoc_witness",
            IdentityId::CrossBackend => "cross_backend",
            IdentityId::EllipticGauss => "elliptic_gauss",
            IdentityId::HypSeriesIntegral => "hyp_series_integral",
        }
    }

    /// Acceptance tolerance. For `diagonal_B`/`cancel_D` the residual is a
    /// count of non-increasing steps; for `nonassoc_witness` it is the
    /// relative defect a witness must exceed.
    pub fn default_tolerance(self) -> f64 {
        match self {
            IdentityId::UnitA => 1e-10,
            IdentityId::DiagonalB | IdentityId::CancelD => 0.0,
            IdentityId::MeanC => 1e-9,
            IdentityId::DistribE => 1e-8,
            IdentityId::InverseF => 1e-8,
            IdentityId::GaussEq4 => 1e-12,
            IdentityId::DefiningEq6 => 1e-10,
            IdentityId::MeanstepEq7 => 1e-9,
            IdentityId::IntegerFamily => 1e-7,
            IdentityId::NonassocWitness => 1e-3,
            IdentityId::CrossBackend => 1e-8,
            IdentityId::EllipticGauss => 1e-9,
            IdentityId::HypSeriesIntegral => 1e-9,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown identity `{s}`"))
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Residual of one sample, recomputed from its operand tuple.
///
/// This is what the suite records per sample, so a reported witness can be
/// re-checked standalone. Tuple layouts:
///
/// | identity | tuple |
/// |---|---|
/// | `unit_A` | `[x]` |
/// | `diagonal_B` | `[x_prev, x_next]` (1 if not increasing, else 0) |
/// | `mean_C`, `defining_eq6`, `cross_backend`, `elliptic_gauss` | `[x, y]` |
/// | `cancel_D` | `[a, x_prev, x_next]` |
/// | `distrib_E` | `[a, x, y]` |
/// | `inverse_F` | `[x]` inverse, `[x, y]` solve round trip, `[x, z, y]` solve |
/// | `gauss_eq4` | `[q]` |
/// | `meanstep_eq7` | `[x, y]` mean step, `[x]` half step |
/// | `integer_family` | `[n]` |
/// | `nonassoc_witness` | `[x, y, z]` (relative defect) |
/// | `hyp_series_integral` | `[z]` |
pub fn residual(id: IdentityId, t: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    let s = |x: f64, y: f64| star_value(x, y, cfg);
    let bad_tuple = || Error::DomainOverflow(format!("tuple {t:?} does not fit identity {id}"));
    Ok(match (id, t) {
        (IdentityId::UnitA, &[x]) => rel(s(1.0, x)?, x),
        (IdentityId::DiagonalB, &[x0, x1]) => inversion(s(x0, x0)?, s(x1, x1)?),
        (IdentityId::MeanC, &[x, y]) => {
            let mu = agm(x, y, cfg)?;
            let v = independent_star(x, y, cfg)?;
            rel(s(mu, mu)?, v)
        }
        (IdentityId::CancelD, &[a, x0, x1]) => inversion(s(a, x0)?, s(a, x1)?),
        (IdentityId::DistribE, &[a, x, y]) => {
            let lhs = s(a * x, a * y)?;
            rel(s(a, a * s(x, y)?)?, lhs)
        }
        (IdentityId::InverseF, &[x]) => (s(x, star_inverse(x, cfg)?)? - 1.0).abs(),
        (IdentityId::InverseF, &[x, y]) => rel(solve_right(x, s(x, y)?, cfg)?, y),
        (IdentityId::InverseF, &[x, z, y]) => rel(solve_right(x, z, cfg)?, y),
        (IdentityId::GaussEq4, &[q]) => (agm(theta_sq(q, cfg)?, theta_sq(-q, cfg)?, cfg)? - 1.0).abs(),
        (IdentityId::DefiningEq6, &[x, y]) => {
            let mu = agm(x, y, cfg)?;
            rel(agm(1.0, s(x, y)?, cfg)?, mu)
        }
        (IdentityId::MeanstepEq7, &[x, y]) => {
            let v = independent_star(x, y, cfg)?;
            rel(independent_star(0.5 * (x + y), (x * y).sqrt(), cfg)?, v)
        }
        (IdentityId::MeanstepEq7, &[x]) => rel(s(0.5 * (x + 1.0), x.sqrt())?, x),
        (IdentityId::IntegerFamily, &[n]) => {
            let odd = 2.0 * n + 1.0;
            rel(s(odd, 2.0 * n * n + 2.0 * n + 1.0)?, odd * odd)
        }
        (IdentityId::NonassocWitness, &[x, y, z]) => {
            let left = s(s(x, y)?, z)?;
            let right = s(x, s(y, z)?)?;
            (left - right).abs() / left.max(right)
        }
        (IdentityId::CrossBackend, &[x, y]) => cross_backend(x, y, cfg)?.ok_or_else(|| {
            Error::DomainOverflow(format!("({x}, {y}) is outside the theta backend's range"))
        })?,
        (IdentityId::EllipticGauss, &[x, y]) => {
            let quad = elliptic_i_quadrature(EllipticPair::new(x, y)?, cfg)?;
            (quad - FRAC_PI_2 / agm(x, y, cfg)?).abs()
        }
        (IdentityId::HypSeriesIntegral, &[z]) => (hyp_f_half(z, cfg)? - hyp_f_half_by_quadrature(z, cfg)?).abs(),
        _ => return Err(bad_tuple()),
    })
}

fn hypergeom_applies(x: f64, y: f64) -> bool {
    x.max(y) < 1.0 && x.min(y) >= HYPERGEOM_FLOOR
}

/// `x ⋆ y` by the hypergeometric backend where it applies, since it never
/// forms `agm(x, y)`; identities phrased through the mean are otherwise
/// satisfied by construction.
fn independent_star(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<f64> {
    if hypergeom_applies(x, y) {
        star_with(Backend::Hypergeometric, x, y, cfg).map(|c| c.get())
    } else {
        star_value(x, y, cfg)
    }
}

fn inversion(prev: f64, next: f64) -> f64 {
    if next > prev {
        0.0
    } else {
        1.0
    }
}

/// Largest relative disagreement among the backends that apply to `(x, y)`;
/// `None` when the theta backend refuses the pair.
fn cross_backend(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<Option<f64>> {
    let theta = match star_with(Backend::Theta, x, y, cfg) {
        Ok(c) => c.get(),
        Err(Error::DomainOverflow(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut values = vec![theta, star_with(Backend::AgmInverse, x, y, cfg)?.get()];
    if hypergeom_applies(x, y) {
        match star_with(Backend::Hypergeometric, x, y, cfg) {
            Ok(c) => values.push(c.get()),
            Err(Error::DomainOverflow(_) | Error::HypergeomDomain { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    Ok(Some((hi - lo) / lo))
}

#[derive(Clone, Copy, PartialEq)]
enum Combine {
    Max,
    /// Residuals are 0/1 flags; report their count.
    Count,
}

struct Accumulator {
    id: IdentityId,
    tolerance: f64,
    combine: Combine,
    samples: usize,
    max_residual: f64,
    worst: Option<Vec<f64>>,
    failed_by_error: bool,
}

impl Accumulator {
    fn new(id: IdentityId, tolerance: f64, combine: Combine) -> Self {
        Self { id, tolerance, combine, samples: 0, max_residual: 0.0, worst: None, failed_by_error: false }
    }

    fn eval(&mut self, tuple: Vec<f64>, cfg: &ToleranceConfig) {
        let r = residual(self.id, &tuple, cfg);
        self.record(tuple, r);
    }

    fn record(&mut self, tuple: Vec<f64>, r: Result<f64>) {
        self.samples += 1;
        match r {
            Ok(v) if !v.is_nan() => match self.combine {
                Combine::Max => {
                    if v > self.max_residual || self.worst.is_none() {
                        self.max_residual = self.max_residual.max(v);
                        if !self.failed_by_error {
                            self.worst = Some(tuple);
                        }
                    }
                }
                Combine::Count => {
                    if v > 0.0 {
                        self.max_residual += v;
                        if self.worst.is_none() || self.max_residual == v {
                            self.worst = Some(tuple);
                        }
                    }
                }
            },
            _ => {
                if !self.failed_by_error {
                    self.failed_by_error = true;
                    self.worst = Some(tuple);
                }
                self.max_residual = f64::INFINITY;
            }
        }
    }

    fn finish(self) -> IdentityReport {
        let passed = !self.failed_by_error && self.samples > 0 && self.max_residual <= self.tolerance;
        IdentityReport {
            identity_id: self.id,
            samples: self.samples,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
            passed,
            witness: if passed { None } else { self.worst },
        }
    }
}

/// Run every identity with its default tolerance.
pub fn run_suite(grid: &SampleGrid, cfg: &ToleranceConfig) -> Vec<IdentityReport> {
    run_suite_with_tolerance(grid, cfg, None)
}

/// Run every identity; `tolerance` replaces every per-identity tolerance.
pub fn run_suite_with_tolerance(
    grid: &SampleGrid,
    cfg: &ToleranceConfig,
    tolerance: Option<f64>,
) -> Vec<IdentityReport> {
    IdentityId::ALL
        .par_iter()
        .map(|&id| run_identity(id, grid, cfg, tolerance.unwrap_or(id.default_tolerance())))
        .collect()
}

/// Evaluate a single identity over the grid.
pub fn run_identity(id: IdentityId, grid: &SampleGrid, cfg: &ToleranceConfig, tolerance: f64) -> IdentityReport {
    if id == IdentityId::NonassocWitness {
        return nonassoc_search(&grid.axis, cfg, tolerance);
    }
    let combine = match id {
        IdentityId::DiagonalB | IdentityId::CancelD => Combine::Count,
        _ => Combine::Max,
    };
    let mut acc = Accumulator::new(id, tolerance, combine);
    let pairs: Vec<(f64, f64)> = grid.all_pairs().collect();
    let singles = grid.singles();
    match id {
        IdentityId::UnitA => singles.iter().for_each(|&x| acc.eval(vec![x], cfg)),
        IdentityId::DiagonalB => singles.windows(2).for_each(|w| acc.eval(w.to_vec(), cfg)),
        IdentityId::MeanC => {
            pairs.iter().chain(&grid.unit_square).for_each(|&(x, y)| acc.eval(vec![x, y], cfg));
        }
        IdentityId::DefiningEq6 => pairs.iter().for_each(|&(x, y)| acc.eval(vec![x, y], cfg)),
        IdentityId::CancelD => {
            for a in CANCEL_FACTORS {
                singles.windows(2).for_each(|w| acc.eval(vec![a, w[0], w[1]], cfg));
            }
        }
        IdentityId::DistribE => {
            for (i, &(x, y)) in grid.points.iter().enumerate() {
                acc.eval(vec![DISTRIB_FACTORS[i % DISTRIB_FACTORS.len()], x, y], cfg);
            }
        }
        IdentityId::InverseF => {
            acc.eval(vec![3.0, 9.0, 5.0], cfg);
            acc.eval(vec![5.0, 25.0, 13.0], cfg);
            grid.point_singles().iter().for_each(|&x| acc.eval(vec![x], cfg));
            grid.points.iter().for_each(|&(x, y)| acc.eval(vec![x, y], cfg));
        }
        IdentityId::GaussEq4 => lin_space(-Q_SAFE, Q_SAFE, 25).into_iter().for_each(|q| acc.eval(vec![q], cfg)),
        IdentityId::MeanstepEq7 => {
            pairs.iter().chain(&grid.unit_square).for_each(|&(x, y)| acc.eval(vec![x, y], cfg));
            singles.iter().for_each(|&x| acc.eval(vec![x], cfg));
        }
        IdentityId::IntegerFamily => (1..=10).for_each(|n| acc.eval(vec![n as f64], cfg)),
        IdentityId::CrossBackend => {
            for (x, y) in pairs.iter().chain(&grid.unit_square).copied() {
                match cross_backend(x, y, cfg) {
                    Ok(Some(r)) => acc.record(vec![x, y], Ok(r)),
                    Ok(None) => {}
                    Err(e) => acc.record(vec![x, y], Err(e)),
                }
            }
        }
        IdentityId::EllipticGauss => {
            let axis = log_space(0.1, 100.0, 7);
            for &x in &axis {
                for &y in &axis {
                    acc.eval(vec![x, y], cfg);
                }
            }
        }
        IdentityId::HypSeriesIntegral => lin_space(0.0, 0.9, 19).into_iter().for_each(|z| acc.eval(vec![z], cfg)),
        IdentityId::NonassocWitness => unreachable!(),
    }
    acc.finish()
}

/// Scan `axis³` for the first triple whose associativity defect exceeds
/// `threshold`. Operands closest to 1 (in log scale) are visited first so the
/// witness comes from the well-conditioned range. Triples that fail to
/// evaluate are skipped.
fn nonassoc_search(axis: &[f64], cfg: &ToleranceConfig, threshold: f64) -> IdentityReport {
    let mut order = axis.to_vec();
    order.sort_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()).then(a.total_cmp(b)));
    let mut samples = 0;
    let mut best = (0.0, None);
    for &x in &order {
        for &y in &order {
            for &z in &order {
                let Ok(defect) = residual(IdentityId::NonassocWitness, &[x, y, z], cfg) else {
                    continue;
                };
                samples += 1;
                if defect > best.0 || best.1.is_none() {
                    best = (defect, Some(vec![x, y, z]));
                }
                if defect > threshold {
                    return IdentityReport {
                        identity_id: IdentityId::NonassocWitness,
                        samples,
                        max_residual: defect,
                        tolerance: threshold,
                        passed: true,
                        witness: Some(vec![x, y, z]),
                    };
                }
            }
        }
    }
    IdentityReport {
        identity_id: IdentityId::NonassocWitness,
        samples,
        max_residual: best.0,
        tolerance: threshold,
        passed: false,
        witness: best.1,
    }
}
