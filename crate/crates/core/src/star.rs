//! The binary operation `x ⋆ y`, characterised by `agm(1, x ⋆ y) = agm(x, y)`.
//!
//! Three independent backends compute it:
//!
//! * **theta**: find `q` with `θ²(q) = 1 / agm(x, y)` and return
//!   `θ²(-q) / θ²(q)`;
//! * **agm-inverse**: with `A = 1 / agm(x, y)`, bisect for `B` such that
//!   `agm(A, B) = 1` and return `B / A`;
//! * **hypergeometric**: for `0 < y <= x < 1`, solve
//!   `F(1/2, 1/2; 1; 1 - s²) = F(1/2, 1/2; 1; 1 - y²/x²) / x` for `s`.
//!
//! Every entry point sorts its operands first, so `x ⋆ y` and `y ⋆ x` are
//! bit-identical.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agm::agm;
use crate::config::ToleranceConfig;
use crate::elliptic::{hyp_f_half, Z_MAX};
use crate::error::{Error, Result};
use crate::roots::{Bisection, Midpoint};
use crate::theta::{inverse_theta_sq_counted, theta_sq, Q_SAFE};
use crate::types::{Nome, PositiveReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Theta,
    AgmInverse,
    Hypergeometric,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Theta, Backend::AgmInverse, Backend::Hypergeometric];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Theta => "theta",
            Backend::AgmInverse => "agm-inverse",
            Backend::Hypergeometric => "hypergeometric",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Backend selector; `Auto` tries theta and falls back to agm-inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendChoice {
    #[default]
    Auto,
    Forced(Backend),
}

impl FromStr for BackendChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(BackendChoice::Auto),
            "theta" => Ok(BackendChoice::Forced(Backend::Theta)),
            "agm-inverse" => Ok(BackendChoice::Forced(Backend::AgmInverse)),
            "hypergeom" | "hypergeometric" => Ok(BackendChoice::Forced(Backend::Hypergeometric)),
            other => Err(format!("unknown method `{other}` (expected auto, theta, agm-inverse, hypergeom)")),
        }
    }
}

/// One evaluation of `x ⋆ y` with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarComputation {
    pub value: PositiveReal,
    /// `agm(x, y)`.
    pub mean: PositiveReal,
    /// The nome with `θ²(q) = 1 / mean`; only the theta backend recovers it.
    pub nome: Option<Nome>,
    pub backend: Backend,
    /// Root-finding steps taken by the backend.
    pub iterations: usize,
    /// Relative mismatch in the backend's own defining equation.
    pub residual: f64,
}

impl StarComputation {
    #[inline]
    pub fn get(&self) -> f64 {
        self.value.get()
    }
}

fn sorted(x: f64, y: f64) -> Result<(f64, f64)> {
    let x = PositiveReal::named("x", x)?.get();
    let y = PositiveReal::named("y", y)?.get();
    Ok(if x >= y { (x, y) } else { (y, x) })
}

fn positive_result(value: f64, what: &str) -> Result<PositiveReal> {
    if value.is_finite() && value >= f64::MIN_POSITIVE {
        Ok(PositiveReal::new(value)?)
    } else {
        Err(Error::DomainOverflow(format!("{what} = {value:e} is not a normal binary64 value")))
    }
}

fn mean_of(hi: f64, lo: f64, cfg: &ToleranceConfig) -> Result<PositiveReal> {
    positive_result(agm(hi, lo, cfg)?, "agm(x, y)")
}

/// Theta backend: `θ²(-q) / θ²(q)` with `θ²(q) = 1 / agm(x, y)`.
///
/// Refuses with [`Error::DomainOverflow`] when the nome would leave
/// `[-Q_SAFE, Q_SAFE]`.
pub fn star_theta(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<StarComputation> {
    let (hi, lo) = sorted(x, y)?;
    let mean = mean_of(hi, lo, cfg)?;
    let target = 1.0 / mean.get();
    let (lo_v, hi_v) = (theta_sq(-Q_SAFE, cfg)?, theta_sq(Q_SAFE, cfg)?);
    if !(lo_v..=hi_v).contains(&target) {
        return Err(Error::DomainOverflow(format!(
            "agm(x, y) = {} needs a nome beyond |q| <= {Q_SAFE}",
            mean.get()
        )));
    }
    let (nome, iterations) = inverse_theta_sq_counted(target, cfg)?;
    let q = nome.get();
    let value = positive_result(theta_sq(-q, cfg)? / theta_sq(q, cfg)?, "x ⋆ y")?;
    let residual = (agm(1.0, value.get(), cfg)? - mean.get()).abs() / mean.get();
    Ok(StarComputation { value, mean, nome: Some(nome), backend: Backend::Theta, iterations, residual })
}

/// AGM-inversion backend: `B / A` where `A = 1 / agm(x, y)` and `agm(A, B) = 1`.
///
/// `B` is bracketed by `[max(tiny, 2 - A), 1 / A]`, which follows from
/// `sqrt(AB) <= agm(A, B) <= (A + B) / 2`.
pub fn star_agm_inverse(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<StarComputation> {
    let (hi, lo) = sorted(x, y)?;
    let mean = mean_of(hi, lo, cfg)?;
    let a = 1.0 / mean.get();
    if !(a.is_finite() && a >= f64::MIN_POSITIVE) {
        return Err(Error::DomainOverflow(format!("1 / agm(x, y) = {a:e} is not representable")));
    }
    let f = |b: f64| -> Result<f64> { Ok(agm(a, b, cfg)? - 1.0) };

    let upper = 1.0 / a;
    let lower = (2.0 - a).max(f64::MIN_POSITIVE);
    let (b, iterations) = if lower >= upper {
        (upper, 0)
    } else {
        if f(lower)? > 0.0 {
            return if lower == f64::MIN_POSITIVE {
                Err(Error::DomainOverflow(format!(
                    "x ⋆ y underflows binary64 for agm(x, y) = {}",
                    mean.get()
                )))
            } else {
                Err(Error::BracketFailure { lo: lower, hi: upper })
            };
        }
        if f(upper)? < -4.0 * f64::EPSILON {
            return Err(Error::BracketFailure { lo: lower, hi: upper });
        }
        let bisection = Bisection {
            midpoint: Midpoint::Geometric,
            rel_tol: cfg.root_abs_tol,
            abs_tol: 0.0,
            value_tol: 0.0,
            max_iter: cfg.root_max_iter,
        };
        let root = bisection.solve(f, lower, upper)?;
        (root.value, root.iterations)
    };
    let value = positive_result(b / a, "x ⋆ y")?;
    let residual = f(b)?.abs();
    Ok(StarComputation { value, mean, nome: None, backend: Backend::AgmInverse, iterations, residual })
}

/// `1 - t²` without cancellation for `t` near 1.
fn one_minus_sq(t: f64) -> f64 {
    (1.0 - t) * (1.0 + t)
}

/// Hypergeometric backend, defined for `0 < y <= x < 1` (in either order).
pub fn star_hypergeom(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<StarComputation> {
    let (hi, lo) = sorted(x, y)?;
    if hi >= 1.0 {
        return Err(Error::HypergeomDomain { x, y });
    }
    let mean = mean_of(hi, lo, cfg)?;
    let rhs = hyp_f_half(one_minus_sq(lo / hi), cfg)? / hi;
    let lhs = |s: f64| hyp_f_half(one_minus_sq(s), cfg);

    // F(1 - s²) is decreasing in s and F(0) = 1 < rhs, so s = 1 is an upper
    // bracket; halve downward until the left side exceeds rhs.
    let s_min = (1.0 - Z_MAX).sqrt();
    let mut upper = 1.0;
    let mut lower = 0.5;
    loop {
        if lhs(lower)? >= rhs {
            break;
        }
        if lower == s_min {
            return Err(Error::DomainOverflow(format!(
                "x ⋆ y < {s_min:e} is below the hypergeometric series range"
            )));
        }
        upper = lower;
        lower = (0.5 * lower).max(s_min);
    }
    let bisection = Bisection {
        midpoint: Midpoint::Arithmetic,
        rel_tol: cfg.root_abs_tol,
        abs_tol: 0.0,
        value_tol: 0.0,
        max_iter: cfg.root_max_iter,
    };
    let root = bisection.solve(|s| Ok(rhs - lhs(s)?), lower, upper)?;
    let value = positive_result(root.value, "x ⋆ y")?;
    let residual = (lhs(root.value)? - rhs).abs() / rhs;
    Ok(StarComputation {
        value,
        mean,
        nome: None,
        backend: Backend::Hypergeometric,
        iterations: root.iterations,
        residual,
    })
}

/// `x ⋆ y` through the chosen backend.
pub fn star(x: f64, y: f64, choice: BackendChoice, cfg: &ToleranceConfig) -> Result<StarComputation> {
    let (hi, lo) = sorted(x, y)?;
    match choice {
        BackendChoice::Auto => match star_theta(hi, lo, cfg) {
            Err(Error::DomainOverflow(_)) => star_agm_inverse(hi, lo, cfg),
            other => other,
        },
        BackendChoice::Forced(backend) => star_with(backend, hi, lo, cfg),
    }
}

pub fn star_with(backend: Backend, x: f64, y: f64, cfg: &ToleranceConfig) -> Result<StarComputation> {
    match backend {
        Backend::Theta => star_theta(x, y, cfg),
        Backend::AgmInverse => star_agm_inverse(x, y, cfg),
        Backend::Hypergeometric => star_hypergeom(x, y, cfg),
    }
}

/// Shorthand for the value of `star(x, y, Auto, cfg)`.
pub fn star_value(x: f64, y: f64, cfg: &ToleranceConfig) -> Result<f64> {
    star(x, y, BackendChoice::Auto, cfg).map(|c| c.get())
}

/// The inverse of `x` under ⋆: `x · ((1/x) ⋆ (1/x))`.
pub fn star_inverse(x: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let x = PositiveReal::named("x", x)?.get();
    let r = 1.0 / x;
    Ok(positive_result(x * star_value(r, r, cfg)?, "inverse")?.get())
}

/// The `y` solving `x ⋆ y = z`: `y = x · ((1/x) ⋆ (z/x))`.
pub fn solve_right(x: f64, z: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let x = PositiveReal::named("x", x)?.get();
    let z = PositiveReal::named("z", z)?.get();
    Ok(positive_result(x * star_value(1.0 / x, z / x, cfg)?, "y")?.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn theta_backend_examples() {
        let c = star_theta(3.0, 5.0, &cfg()).unwrap();
        assert!(rel(c.get(), 9.0) < 1e-9, "{}", c.get());
        assert_eq!(c.backend, Backend::Theta);
        assert!(c.nome.is_some());
        assert!(rel(star_theta(1.0, 2.5, &cfg()).unwrap().get(), 2.5) < 1e-10);
        // agm(1, v) = 4 solved at 50 digits: v = 9.201437983381468937704495218554509584409533384092
        let d = star_theta(4.0, 4.0, &cfg()).unwrap();
        assert!(rel(d.get(), 9.201_437_983_381_469) < 1e-11, "{}", d.get());
    }

    #[test]
    fn agm_inverse_examples() {
        assert!(rel(star_agm_inverse(5.0, 13.0, &cfg()).unwrap().get(), 25.0) < 1e-9);
        let unit = star_agm_inverse(1.0, 1.0, &cfg()).unwrap();
        assert_eq!(unit.get(), 1.0);
        let a = star_agm_inverse(2.0, 2.0, &cfg()).unwrap().get();
        let b = star_theta(2.0, 2.0, &cfg()).unwrap().get();
        assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn hypergeom_examples() {
        let h = star_hypergeom(0.5, 0.5, &cfg()).unwrap();
        let a = star_agm_inverse(0.5, 0.5, &cfg()).unwrap();
        assert!(rel(h.get(), a.get()) < 1e-8);
        assert!((agm(1.0, h.get(), &cfg()).unwrap() - 0.5).abs() < 1e-10);
        let h = star_hypergeom(0.9, 0.9, &cfg()).unwrap().get();
        let t = star_theta(0.9, 0.9, &cfg()).unwrap().get();
        assert!(rel(h, t) < 1e-8);
        let r = star_hypergeom(0.7, 0.7, &cfg()).unwrap();
        assert!(r.residual <= cfg().root_abs_tol, "{:e}", r.residual);
    }

    #[test]
    fn hypergeom_domain() {
        assert!(matches!(star_hypergeom(1.0, 0.5, &cfg()), Err(Error::HypergeomDomain { .. })));
        assert!(matches!(star_hypergeom(0.5, 2.0, &cfg()), Err(Error::HypergeomDomain { .. })));
        // Both operands in range, but x ⋆ y ~ 1e-13 is far below the series range.
        assert!(matches!(star_hypergeom(0.05, 0.05, &cfg()), Err(Error::DomainOverflow(_))));
        // Order does not matter.
        let a = star_hypergeom(0.9, 0.5, &cfg()).unwrap();
        let b = star_hypergeom(0.5, 0.9, &cfg()).unwrap();
        assert_eq!(a.get(), b.get());
    }

    #[test]
    fn theta_refuses_outside_safe_nome() {
        assert!(matches!(star_theta(1e-3, 1e-3, &cfg()), Err(Error::DomainOverflow(_))));
        let c = star(0.02, 0.02, BackendChoice::Auto, &cfg()).unwrap();
        assert_eq!(c.backend, Backend::AgmInverse);
    }

    #[test]
    fn agm_inverse_underflow_is_domain_error() {
        assert!(matches!(star_agm_inverse(1e-3, 1e-3, &cfg()), Err(Error::DomainOverflow(_))));
        assert!(star(1e-3, 1e-3, BackendChoice::Auto, &cfg()).is_err());
    }

    #[test]
    fn dispatcher() {
        assert!(rel(star_value(3.0, 5.0, &cfg()).unwrap(), 9.0) < 1e-9);
        let a = star(2.0, 11.0, BackendChoice::Auto, &cfg()).unwrap();
        let b = star(11.0, 2.0, BackendChoice::Auto, &cfg()).unwrap();
        assert_eq!(a, b);
        assert!(rel(star_value(7.0, 25.0, &cfg()).unwrap(), 49.0) < 1e-9);
        assert!(star(-1.0, 2.0, BackendChoice::Auto, &cfg()).is_err());
    }

    #[test]
    fn backend_choice_parsing() {
        assert_eq!("auto".parse::<BackendChoice>().unwrap(), BackendChoice::Auto);
        assert_eq!(
            "hypergeom".parse::<BackendChoice>().unwrap(),
            BackendChoice::Forced(Backend::Hypergeometric)
        );
        assert!("newton".parse::<BackendChoice>().is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!(rel(star_inverse(1.0, &cfg()).unwrap(), 1.0) < 1e-14);
        let inv = star_inverse(3.0, &cfg()).unwrap();
        assert!((star_value(3.0, inv, &cfg()).unwrap() - 1.0).abs() < 1e-9);
        let x = theta_sq(0.3, &cfg()).unwrap();
        let want = theta_sq(-0.3, &cfg()).unwrap();
        assert!(rel(star_inverse(x, &cfg()).unwrap(), want) < 1e-10);
    }

    #[test]
    fn solve_right_examples() {
        assert!((solve_right(3.0, 9.0, &cfg()).unwrap() - 5.0).abs() < 1e-8);
        assert!((solve_right(5.0, 25.0, &cfg()).unwrap() - 13.0).abs() < 1e-8);
        assert!(rel(solve_right(1.0, 4.0, &cfg()).unwrap(), 4.0) < 1e-12);
    }

    #[test]
    fn defining_property_holds_for_each_backend() {
        for (x, y) in [(0.3f64, 0.8f64), (2.0, 9.0), (0.5, 0.5)] {
            for backend in Backend::ALL {
                if backend == Backend::Hypergeometric && x.max(y) >= 1.0 {
                    continue;
                }
                let c = star_with(backend, x, y, &cfg()).unwrap();
                let m = agm(1.0, c.get(), &cfg()).unwrap();
                assert!(rel(m, c.mean.get()) < 1e-11, "{backend} at ({x}, {y})");
            }
        }
    }
}
