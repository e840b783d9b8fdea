//! Nonlocal-diffusion epidemic model with one free boundary.
//!
//! The host density `u` and infective density `v` live on `[0, h(t)]` and
//! disperse through kernels `J1`, `J2`; the front `h(t)` advances with the
//! outward flux of both populations.

pub mod conv;
pub mod criteria;
pub mod eigen;
pub mod error;
pub mod field;
pub mod freeboundary;
pub mod kernel;
pub mod model;
pub mod nonlinearity;
pub mod semiwave;
pub mod steady;

pub use criteria::{
    decision_tree, find_d_thresholds, find_ell_star, find_mu_star, nu1, RegimeReport,
    ThresholdResult,
};
pub use eigen::{lambda1, lambda2, principal_eigenpair, Eigenpair, OperatorSpec};
pub use error::{Error, Result};
pub use freeboundary::{classify, simulate, Outcome, SimulationTrace, Verdict};
pub use kernel::{FirstMoment, Kernel, KernelFamily};
pub use model::{derived_constants, DerivedConstants, InitialProfile, ModelParams};
pub use nonlinearity::Nonlinearity;
pub use semiwave::{predicted_speed, solve_semiwave, PredictedSpeed, SemiWaveProfile};
pub use steady::{solve_steady, SteadyOutcome, SteadyState};
