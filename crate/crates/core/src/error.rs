use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `ε·√V″` reached the pole of the tangent branch (less the safety margin).
    #[error("time step too large: eps*omega = {eps_omega} >= limit {limit}")]
    StepTooLarge { eps_omega: f64, limit: f64 },

    #[error("corrector did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("V''({x_eq}) = {d2v} is not positive; not a stable equilibrium")]
    NotAStableEquilibrium { x_eq: f64, d2v: f64 },

    #[error("elliptic modulus {0} outside [0, 1)")]
    ModulusOutOfRange(f64),

    #[error("the separatrix (p0 = 2) has infinite period")]
    SeparatrixPeriodInfinite,

    #[error("initial momentum must be positive, got {0}")]
    InvalidMomentum(f64),

    #[error("leap-frog is unstable for eps*omega = {0} >= 2")]
    Unstable(f64),

    #[error("reference integrator step size underflow at t = {t}")]
    ToleranceNotMet { t: f64 },

    #[error("only {found} of {needed} period events within {steps} steps")]
    NoCycleDetected { found: usize, needed: usize, steps: u64 },

    #[error("cannot fit a slope: {0}")]
    DegenerateFit(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips any [`Error::AtStep`] annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// Stable snake_case identifier of the root cause, used in output files.
    pub fn code(&self) -> &'static str {
        match self.root() {
            Error::StepTooLarge { .. } => "step_too_large",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NotAStableEquilibrium { .. } => "not_a_stable_equilibrium",
            Error::ModulusOutOfRange(_) => "modulus_out_of_range",
            Error::SeparatrixPeriodInfinite => "separatrix_period_infinite",
            Error::InvalidMomentum(_) => "invalid_momentum",
            Error::Unstable(_) => "unstable",
            Error::ToleranceNotMet { .. } => "tolerance_not_met",
            Error::NoCycleDetected { .. } => "no_cycle_detected",
            Error::DegenerateFit(_) => "degenerate_fit",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::AtStep { .. } => unreachable!("root() strips step annotations"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_see_through_step_annotations() {
        let e = Error::AtStep { step: 3, source: Box::new(Error::StepTooLarge { eps_omega: 3.1, limit: 3.04 }) };
        assert_eq!(e.code(), "step_too_large");
        assert_eq!(e.to_string(), "step 3: time step too large: eps*omega = 3.1 >= limit 3.04");
    }
}
