//! Nonlinear state estimation with single-propagation unscented filters.
//!
//! The crate provides four filters behind one predict/update contract:
//!
//! * [`FilterKind::Ekf`]: extended Kalman filter, covariance propagated through
//!   the matrix exponential of the frozen Jacobian.
//! * [`FilterKind::Ukf`]: augmented-state unscented filter, every sigma point
//!   integrated through the full dynamics.
//! * [`FilterKind::Spukf`]: only the central sigma point is integrated, the rest
//!   are mapped with `exp(J dt)`.
//! * [`FilterKind::Espukf`]: as SPUKF, plus a Richardson step that re-evaluates
//!   the Jacobian half-way along each sigma offset.
//!
//! Two scenarios exercise them: a planar ballistic re-entry tracked by a
//! range/elevation radar ([`reentry`]) and a LEO satellite tracked with
//! synthetic GPS + Galileo ranges ([`leonav`]).

pub mod error;
pub mod estimators;
pub mod leonav;
pub mod numkit;
pub mod reentry;
pub mod rng;

pub use error::{Error, Result};
pub use estimators::{
    filter_step, DynamicsModel, FilterKind, FilterSettings, MeasurementModel, SigmaPointSet, StateEstimate,
    StepOutcome, UTParams,
};
pub use nalgebra::{DMatrix, DVector};
