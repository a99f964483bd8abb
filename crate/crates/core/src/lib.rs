//! Locally exact discrete gradient integration for one-dimensional
//! Newtonian systems `ẋ = p`, `ṗ = −V′(x)`.
//!
//! - [`potentials`]: the built-in potentials and their discrete gradients.
//! - [`steppers`]: leap-frog, discrete gradient (constant or locally exact
//!   step), and the explicit locally exact predictor.
//! - [`reference`]: exact periods, the separatrix solution, and an adaptive
//!   Runge–Kutta reference integrator.
//! - [`analysis`]: period estimation, energy drift, observed order, δ profiles.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod potentials;
pub mod reference;
pub mod steppers;

mod error;

pub use error::{Error, Result};
pub use potentials::{PotentialSpec, PotentialValues};
pub use steppers::{SchemeId, SchemeKind, State, StepDiagnostics, StepParams};
