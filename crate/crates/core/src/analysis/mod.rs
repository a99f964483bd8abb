//! Measurement instruments: period estimation, energy drift, observed order
//! of convergence, and the δ(x)/ε profile.

mod metrics;
mod period;

pub use metrics::{delta_profile, energy_drift, observed_order, SweepRecord};
pub use period::{
    estimate_period, estimate_period_from_samples, measure_period, EventLevels, EventLocator, PeriodEstimate,
    PeriodMeasurement, DEFAULT_N_CYCLES, DEFAULT_STEP_BUDGET,
};
