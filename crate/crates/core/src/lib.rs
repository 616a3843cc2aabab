//! Cheney–Sharma operators on the unit interval and on the two dimensional
//! simplex `S = {x1, x2 >= 0, x1 + x2 <= 1}`.
//!
//! The crate evaluates the univariate operator `Q` and its non-tensor
//! bivariate extension `G` for any nonnegative parameter `beta`, and ships
//! the machinery used to check the surrounding identities numerically:
//! Abel–Jensen residuals, partition of unity, the `beta = 0` Bernstein
//! degeneration, the ordered-pair difference expansion, and randomized
//! scanners for Lipschitz and modulus-of-continuity preservation.
//!
//! ```
//! use cheney_sharma::{eval_g, FunctionDescriptor, OperatorParams, SimplexPoint};
//!
//! let params = OperatorParams::new(7, 1.0).unwrap();
//! let f: FunctionDescriptor = "const:2".parse().unwrap();
//! let x = SimplexPoint::new(0.2, 0.2).unwrap();
//! assert!((eval_g(&f, params, x).unwrap() - 2.0).abs() < 1e-12);
//! ```

pub mod abel;
pub mod cli;
mod error;
pub mod factorial;
pub mod format;
pub mod model;
pub mod operators;
pub mod oracles;
pub mod properties;
pub mod summation;

pub use abel::{
    abel_factor, bivariate_weights, bivariate_weights_with, log_abel_factor, univariate_weights,
    univariate_weights_with, BivariateWeights, UnivariateWeights, WeightMethod,
};
pub use error::{Error, Result};
pub use model::{
    componentwise_leq, simplex_lattice, Axis, FunctionDescriptor, LipschitzSpec, MultiIndex,
    OperatorParams, SimplexPoint,
};
pub use operators::{
    difference_expansion, eval_g, eval_g_marginal, eval_q, DifferenceKernel, LatticeSamples,
};
pub use properties::VerificationReport;
