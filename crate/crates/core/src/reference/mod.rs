//! Ground truth for the experiments: exact pendulum periods, the separatrix
//! solution, leap-frog's discrete dispersion, and an adaptive reference
//! integrator.

mod elliptic;
mod pendulum;
mod rk;

pub use elliptic::{agm_elliptic_k, elliptic_k_complementary};
pub use pendulum::{exact_pendulum_period, leapfrog_harmonic_period, separatrix_solution, EnergyRecord, Regime};
pub use rk::{reference_state, reference_trajectory, ReferenceTolerance, LOCAL_SAFETY};
