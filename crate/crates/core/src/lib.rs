//! Nested simple random walks converging to Brownian motion and its local
//! time, built by the twist-and-shrink construction, with exact laws,
//! sup-distance statistics and Monte Carlo checks of the convergence bounds.
//!
//! Walk-level routines are exact integer computations. Scaled quantities
//! are generic over [`Scalar`], implemented for `f32`, `f64` and
//! [`num_rational::BigRational`].

pub mod analytics;
pub mod error;
pub mod local_time;
pub mod oracle;
pub mod scalar;
pub mod skorohod;
pub mod twist;
pub mod walk;

pub use analytics::BoundParams;
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use twist::{
    build_family, build_family_with, check_refinement, DyadicTime, EvenVisitTimes, FamilyConfig,
    NestedWalkFamily, ScaledPath,
};
pub use walk::{partial_sums, sample_steps, SeedSpec, StepSequence, WalkPath};

pub type Real = f64;
pub type Exact = num_rational::BigRational;
pub type Bounds = BoundParams<f64>;
