//! One-step schemes and the trajectory driver.
//!
//! | scheme              | update                                         | order |
//! |---------------------|------------------------------------------------|-------|
//! | leap-frog           | velocity Verlet                                | 2     |
//! | DG                  | discrete gradient, δ = ε                       | 2     |
//! | DG with constant δ₀ | discrete gradient, δ = (2/ω₀) tan(ω₀ε/2)       | 2     |
//! | LEDG                | discrete gradient, δₙ from V″(xₙ)              | 3     |
//! | LEDG predictor      | exact flow of the system linearized at xₙ      | 3     |
//!
//! All discrete gradient variants conserve `p²/2 + V(x)` exactly (up to the
//! corrector tolerance) for any δ.

mod corrector;
mod local;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use corrector::{step_dg, step_ledg};
pub use local::{delta0_of, delta_of, omega_of, predictor_step, LinearizedState};

use crate::potentials::{evaluate, PotentialSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub p: f64,
}

impl State {
    pub fn new(t: f64, x: f64, p: f64) -> Self {
        State { t, x, p }
    }

    /// `(t, x, p) = (0, 0, p0)`.
    pub fn at_origin(p0: f64) -> Self {
        State { t: 0.0, x: 0.0, p: p0 }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.p.is_finite()
    }
}

/// Time step and corrector controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub eps: f64,
    #[serde(default = "defaults::solver_tol")]
    pub solver_tol: f64,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    /// Below this value of `(εω/2)²` the effective step uses its series.
    #[serde(default = "defaults::series_threshold")]
    pub series_threshold: f64,
    /// `ε√V″` must stay below `π − delta_cap_margin`.
    #[serde(default = "defaults::delta_cap_margin")]
    pub delta_cap_margin: f64,
}

mod defaults {
    pub fn solver_tol() -> f64 {
        1e-14
    }
    pub fn max_iter() -> usize {
        50
    }
    pub fn series_threshold() -> f64 {
        1e-8
    }
    pub fn delta_cap_margin() -> f64 {
        0.1
    }
}

impl StepParams {
    pub fn new(eps: f64) -> Self {
        StepParams {
            eps,
            solver_tol: defaults::solver_tol(),
            max_iter: defaults::max_iter(),
            series_threshold: defaults::series_threshold(),
            delta_cap_margin: defaults::delta_cap_margin(),
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol <= 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "solver_tol must lie in (0, 1e-6], got {}",
                self.solver_tol
            )));
        }
        if self.max_iter < 8 {
            return Err(Error::InvalidParameter(format!("max_iter must be at least 8, got {}", self.max_iter)));
        }
        if !(self.series_threshold >= 0.0) || !(self.delta_cap_margin >= 0.0 && self.delta_cap_margin < std::f64::consts::PI) {
            return Err(Error::InvalidParameter("series_threshold and delta_cap_margin out of range".into()));
        }
        Ok(())
    }
}

/// Per-step information reported alongside the new state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub omega_n: f64,
    pub delta_n: f64,
    pub corrector_iters: usize,
    pub predictor_used: bool,
}

impl StepDiagnostics {
    fn explicit(eps: f64) -> Self {
        StepDiagnostics { omega_n: 0.0, delta_n: eps, corrector_iters: 0, predictor_used: false }
    }
}

/// Scheme names as they appear in configs and output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    #[serde(rename = "leapfrog")]
    LeapFrog,
    Dg,
    #[serde(rename = "dg_delta0")]
    DgDelta0,
    Ledg,
    #[serde(rename = "ledg_predictor")]
    LedgPredictorOnly,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::LeapFrog,
        SchemeKind::Dg,
        SchemeKind::DgDelta0,
        SchemeKind::Ledg,
        SchemeKind::LedgPredictorOnly,
    ];

    /// The four schemes compared in the accuracy experiments.
    pub const COMPARED: [SchemeKind; 4] = [SchemeKind::LeapFrog, SchemeKind::Dg, SchemeKind::DgDelta0, SchemeKind::Ledg];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::LeapFrog => "leapfrog",
            SchemeKind::Dg => "dg",
            SchemeKind::DgDelta0 => "dg_delta0",
            SchemeKind::Ledg => "ledg",
            SchemeKind::LedgPredictorOnly => "ledg_predictor",
        }
    }

    pub fn from_name(name: &str) -> Option<SchemeKind> {
        SchemeKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Discrete gradient family (exactly energy conserving).
    pub fn conserves_energy(self) -> bool {
        matches!(self, SchemeKind::Dg | SchemeKind::DgDelta0 | SchemeKind::Ledg)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully configured scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeId {
    LeapFrog,
    Dg,
    /// Discrete gradient with a constant effective step `delta0`.
    DgDelta0 { delta0: f64 },
    Ledg,
    LedgPredictorOnly,
}

impl SchemeId {
    /// Resolves a scheme name for a given potential and step; `DgDelta0`
    /// takes its δ₀ from the stable equilibrium at `x = 0`.
    pub fn resolve(kind: SchemeKind, spec: &PotentialSpec, eps: f64) -> Result<SchemeId> {
        Ok(match kind {
            SchemeKind::LeapFrog => SchemeId::LeapFrog,
            SchemeKind::Dg => SchemeId::Dg,
            SchemeKind::DgDelta0 => SchemeId::DgDelta0 { delta0: delta0_of(eps, spec, 0.0)? },
            SchemeKind::Ledg => SchemeId::Ledg,
            SchemeKind::LedgPredictorOnly => SchemeId::LedgPredictorOnly,
        })
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeId::LeapFrog => SchemeKind::LeapFrog,
            SchemeId::Dg => SchemeKind::Dg,
            SchemeId::DgDelta0 { .. } => SchemeKind::DgDelta0,
            SchemeId::Ledg => SchemeKind::Ledg,
            SchemeId::LedgPredictorOnly => SchemeKind::LedgPredictorOnly,
        }
    }

    /// Advances one step of size `params.eps`.
    pub fn step(&self, spec: &PotentialSpec, s: &State, params: &StepParams) -> Result<(State, StepDiagnostics)> {
        match *self {
            SchemeId::LeapFrog => Ok((step_leapfrog(spec, s, params.eps), StepDiagnostics::explicit(params.eps))),
            SchemeId::Dg => step_dg(spec, s, params.eps, params),
            SchemeId::DgDelta0 { delta0 } => step_dg(spec, s, delta0, params),
            SchemeId::Ledg => step_ledg(spec, s, params),
            SchemeId::LedgPredictorOnly => predictor_only(spec, s, params),
        }
    }
}

fn predictor_only(spec: &PotentialSpec, s: &State, params: &StepParams) -> Result<(State, StepDiagnostics)> {
    let d2v = evaluate(spec, s.x).d2v;
    let next = predictor_step(spec, s, params.eps);
    let delta = delta_of(params.eps, d2v, params).unwrap_or(f64::NAN);
    let diag = StepDiagnostics { omega_n: omega_of(d2v), delta_n: delta, corrector_iters: 0, predictor_used: true };
    Ok((next, diag))
}

/// Velocity Verlet:
/// `p½ = p − (ε/2)V′(x)`, `x′ = x + ε p½`, `p′ = p½ − (ε/2)V′(x′)`.
pub fn step_leapfrog(spec: &PotentialSpec, s: &State, eps: f64) -> State {
    leapfrog_with_force(spec, s, eps, spec.force(s.x)).0
}

// Takes V′(x) from the previous step; returns V′(x′) for the next one.
fn leapfrog_with_force(spec: &PotentialSpec, s: &State, eps: f64, force: f64) -> (State, f64) {
    let half = s.p - 0.5 * eps * force;
    let x = s.x + eps * half;
    let force_new = spec.force(x);
    let p = half - 0.5 * eps * force_new;
    (State { t: s.t + eps, x, p }, force_new)
}

/// Neumaier-compensated running sum for the time axis.
#[derive(Debug, Clone, Copy)]
struct Clock {
    sum: f64,
    carry: f64,
}

impl Clock {
    fn new(t0: f64) -> Self {
        Clock { sum: t0, carry: 0.0 }
    }

    fn advance(&mut self, dt: f64) -> f64 {
        let t = self.sum + dt;
        if self.sum.abs() >= dt.abs() {
            self.carry += (self.sum - t) + dt;
        } else {
            self.carry += (dt - t) + self.sum;
        }
        self.sum = t;
        self.sum + self.carry
    }
}

/// Streaming trajectory: yields `(state, diagnostics)` after each step.
pub struct Trajectory<'a> {
    scheme: SchemeId,
    spec: &'a PotentialSpec,
    params: StepParams,
    state: State,
    clock: Clock,
    cached_force: Option<f64>,
    steps: u64,
    failed: bool,
}

impl<'a> Trajectory<'a> {
    pub fn new(scheme: SchemeId, spec: &'a PotentialSpec, s0: State, params: StepParams) -> Self {
        Trajectory {
            scheme,
            spec,
            params,
            state: s0,
            clock: Clock::new(s0.t),
            cached_force: None,
            steps: 0,
            failed: false,
        }
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn advance(&mut self) -> Result<(State, StepDiagnostics)> {
        let (mut next, diag) = match self.scheme {
            SchemeId::LeapFrog => {
                let force = self.cached_force.unwrap_or_else(|| self.spec.force(self.state.x));
                let (next, force_new) = leapfrog_with_force(self.spec, &self.state, self.params.eps, force);
                self.cached_force = Some(force_new);
                (next, StepDiagnostics::explicit(self.params.eps))
            }
            scheme => scheme.step(self.spec, &self.state, &self.params)?,
        };
        next.t = self.clock.advance(self.params.eps);
        if !next.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite state {next:?}")));
        }
        Ok((next, diag))
    }
}

impl Iterator for Trajectory<'_> {
    type Item = Result<(State, StepDiagnostics)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.advance() {
            Ok((next, diag)) => {
                self.state = next;
                self.steps += 1;
                Some(Ok((next, diag)))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(Error::AtStep { step: self.steps + 1, source: Box::new(e) }))
            }
        }
    }
}

/// Applies `scheme` `n_steps` times from `s0`, passing every new state to
/// `observer`. Errors carry the 1-based index of the failing step.
pub fn integrate<F>(
    scheme: SchemeId,
    spec: &PotentialSpec,
    s0: State,
    params: &StepParams,
    n_steps: u64,
    mut observer: F,
) -> Result<State>
where
    F: FnMut(&State, &StepDiagnostics),
{
    let mut traj = Trajectory::new(scheme, spec, s0, *params);
    for _ in 0..n_steps {
        let (s, d) = traj.next().expect("trajectory ended without error")?;
        observer(&s, &d);
    }
    Ok(*traj.state())
}
