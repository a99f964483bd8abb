use crate::potentials::PotentialSpec;
use crate::steppers::{delta_of, SchemeKind, State, StepParams};
use crate::{Error, Result};

/// `max |Eₙ − E₀|` with `Eₙ = pₙ²/2 + V(xₙ)`.
pub fn energy_drift(trajectory: &[State], spec: &PotentialSpec) -> f64 {
    let Some(first) = trajectory.first() else {
        return 0.0;
    };
    let e0 = spec.energy(first.x, first.p);
    trajectory
        .iter()
        .map(|s| (spec.energy(s.x, s.p) - e0).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `log(error)` against `log(eps)`.
pub fn observed_order(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points"));
    }
    if points.iter().any(|&(eps, err)| !(eps > 0.0 && err > 0.0)) {
        return Err(Error::InvalidParameter("step sizes and errors must be positive".into()));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(e, r)| (e.ln(), r.ln())).collect();
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / n;
    let my = logs.iter().map(|l| l.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
    if sxx <= f64::EPSILON * logs.iter().map(|l| l.0 * l.0).sum::<f64>() {
        return Err(Error::DegenerateFit("all step sizes are equal"));
    }
    Ok(sxy / sxx)
}

/// `(x, δ(x)/ε)` over `x_grid`, with `δ` the locally exact effective step.
pub fn delta_profile(spec: &PotentialSpec, eps: f64, x_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let params = StepParams::new(eps);
    x_grid
        .iter()
        .map(|&x| Ok((x, delta_of(eps, spec.stiffness(x), &params)? / eps)))
        .collect()
}

/// One cell of a period-error sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scheme: SchemeKind,
    pub p0: f64,
    pub eps: f64,
    /// `|T_measured − T_exact| / T_exact`; `None` when the cell failed.
    pub rel_period_error: Option<f64>,
    pub energy_drift: Option<f64>,
    pub wall_time: f64,
    /// `None` on success, otherwise the failure reason.
    pub failure: Option<String>,
}

impl SweepRecord {
    pub fn status(&self) -> String {
        match &self.failure {
            None => "ok".to_string(),
            Some(reason) => format!("failed:{reason}"),
        }
    }
}
