//! Spectral toolkit for the semicircular law.
//!
//! The crate computes, at desk scale, the objects around the fluctuation
//! variance of one-matrix ensembles: Chebyshev series arithmetic on the
//! reference interval (-2, 2), quadrature rules for the semicircular and
//! arcsine measures and the bivariate fluctuation kernel, a sparse tensor
//! calculus for the divided-difference derivative, diagonal spectral
//! operators with the alternating variance expansion, equilibrium measures
//! of convex potentials with a Galerkin resolvent solver, verification
//! reports for the associated functional inequalities, and a GUE Monte-Carlo
//! cross-check of the variance limit.
//!
//! # Quick start
//!
//! ```
//! use semicircle::{ChebSeries, Interval};
//! use semicircle::ops::{omega_variance, derivative_psi};
//!
//! // project a smooth function onto the first-kind basis
//! let phi = ChebSeries::project(f64::exp, 24, Interval::REFERENCE).unwrap();
//!
//! // the fluctuation variance never exceeds the derivative's
//! // semicircular norm, with equality exactly for linear functions
//! let d = derivative_psi(&phi);
//! let energy = d.inner_alpha(&d).unwrap();
//! assert!(omega_variance(&phi) <= energy);
//!
//! let linear = ChebSeries::first_kind(vec![0.0, 2.0]); // phi(x) = x
//! assert!((omega_variance(&linear) - 1.0).abs() < 1e-15);
//! ```
//!
//! The equilibrium side: solve for the support of a convex potential,
//! build the density, and evaluate the weighted bound.
//!
//! ```
//! use semicircle::equilibrium::{solve_support, equilibrium_density, Potential};
//!
//! let quartic = Potential::quartic(); // x^4 / 4
//! let support = solve_support(&quartic, 1e-12).unwrap();
//! assert!((support.1 - 2.0 * 3f64.powf(-0.25)).abs() < 1e-8);
//! let measure = equilibrium_density(&quartic, support).unwrap();
//! assert!((measure.quadrature(64).total_mass() - 1.0).abs() < 1e-12);
//! ```

pub mod equilibrium;
pub mod error;
pub mod interval;
pub mod omega;
pub mod ops;
pub mod quad;
pub mod report;
pub mod rmt;
pub mod series;
pub mod tensor;
pub mod util;

pub use error::{Error, Result};
pub use interval::Interval;
pub use series::{Basis, ChebSeries};
