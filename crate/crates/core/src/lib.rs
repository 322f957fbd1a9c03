//! A binary operation on the positive reals whose mean is Gauss'
//! arithmetic-geometric mean: `x ⋆ y` is the unique positive number with
//! `agm(1, x ⋆ y) = agm(x, y)`.
//!
//! ```
//! use agmstar::{star, BackendChoice, ToleranceConfig};
//!
//! let cfg = ToleranceConfig::default();
//! let nine = star(3.0, 5.0, BackendChoice::Auto, &cfg).unwrap();
//! assert!((nine.get() - 9.0).abs() < 1e-9);
//! ```
//!
//! The operation is commutative with unit 1, cancellative and distributive in
//! the sense `(ax) ⋆ (ay) = a ⋆ (a (x ⋆ y))`, but not associative. The
//! [`verify`] module checks all of these numerically.

pub mod agm;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod quadrature;
mod roots;
pub mod star;
pub mod theta;
pub mod types;
pub mod verify;

pub use crate::agm::{agm, agm_trace, AgmTrace};
pub use crate::config::ToleranceConfig;
pub use crate::elliptic::{elliptic_i, elliptic_i_quadrature, hyp_f_half, EllipticPair};
pub use crate::error::{Error, Phase, Result};
pub use crate::star::{
    solve_right, star, star_agm_inverse, star_hypergeom, star_inverse, star_theta, star_value, star_with,
    Backend, BackendChoice, StarComputation,
};
pub use crate::theta::{inverse_theta_sq, theta, theta_sq, truncation_terms};
pub use crate::types::{Nome, PositiveReal};
