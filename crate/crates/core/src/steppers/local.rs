//! Local frequency, effective step δ, and the explicit locally exact predictor.

use std::f64::consts::PI;

use super::{State, StepParams};
use crate::potentials::{evaluate, PotentialSpec};
use crate::{Error, Result};

/// `ω = √|V″|`.
pub fn omega_of(d2v: f64) -> f64 {
    d2v.abs().sqrt()
}

/// Effective step replacing `ε` in the discrete gradient scheme:
/// `(2/ω) tan(εω/2)` for `V″ > 0`, `ε` for `V″ = 0`, `(2/ω) tanh(εω/2)` for `V″ < 0`.
///
/// For `(εω/2)² < series_threshold` the expansion `ε(1 ± (εω)²/12)` is used.
pub fn delta_of(eps: f64, d2v: f64, params: &StepParams) -> Result<f64> {
    if d2v == 0.0 {
        return Ok(eps);
    }
    let omega = omega_of(d2v);
    let eps_omega = eps * omega;
    if d2v > 0.0 {
        let limit = PI - params.delta_cap_margin;
        if eps_omega >= limit {
            return Err(Error::StepTooLarge { eps_omega, limit });
        }
    }
    let half = 0.5 * eps_omega;
    let half2 = half * half;
    if half2 < params.series_threshold {
        let s = d2v.signum();
        return Ok(eps * (1.0 + s * half2 / 3.0));
    }
    let ratio = if d2v > 0.0 { half.tan() / half } else { half.tanh() / half };
    Ok(eps * ratio)
}

/// The constant step `(2/ω₀) tan(ω₀ε/2)`, `ω₀ = √V″(x_eq)`, of the modified
/// discrete gradient scheme tuned to small oscillations about `x_eq`.
pub fn delta0_of(eps: f64, spec: &PotentialSpec, x_eq: f64) -> Result<f64> {
    let d2v = evaluate(spec, x_eq).d2v;
    if !(d2v > 0.0) {
        return Err(Error::NotAStableEquilibrium { x_eq, d2v });
    }
    delta_of(eps, d2v, &StepParams::new(eps))
}

/// Position relative to a frozen expansion point, for the linearized system
/// `dξ/dt = p`, `dp/dt = −V′(x_ref) − V″(x_ref) ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedState {
    pub x_ref: f64,
    pub xi: f64,
    pub p: f64,
}

impl LinearizedState {
    pub fn at(x_ref: f64, p: f64) -> Self {
        LinearizedState { x_ref, xi: 0.0, p }
    }

    pub fn position(&self) -> f64 {
        self.x_ref + self.xi
    }

    /// Exact time-`t` flow of the linearized system with force `−dv − d2v·ξ`.
    pub fn advance(&self, dv: f64, d2v: f64, t: f64) -> LinearizedState {
        let (c, s, g) = flow_kernels(d2v, t);
        let f0 = -dv - d2v * self.xi;
        LinearizedState {
            x_ref: self.x_ref,
            xi: self.xi + self.p * s + f0 * g,
            p: self.p * c + f0 * s,
        }
    }
}

// (C, S, G) with C = cos ωt, S = sin(ωt)/ω, G = (1 − cos ωt)/ω² for V″ = ω² > 0,
// the hyperbolic analogues with G = (cosh ωt − 1)/ω² for V″ = −ω² < 0, and
// (1, t, t²/2) for V″ = 0. Written with half-angle forms so they stay accurate as ω → 0.
fn flow_kernels(d2v: f64, t: f64) -> (f64, f64, f64) {
    if d2v == 0.0 {
        return (1.0, t, 0.5 * t * t);
    }
    let omega = omega_of(d2v);
    let wt = omega * t;
    let half = 0.5 * wt;
    if d2v > 0.0 {
        let sh = half.sin();
        let s = if wt.abs() < 1e-8 { t } else { wt.sin() / omega };
        let g = if half.abs() < 1e-8 { 0.5 * t * t } else { 2.0 * (sh / omega) * (sh / omega) };
        (wt.cos(), s, g)
    } else {
        let sh = half.sinh();
        let s = if wt.abs() < 1e-8 { t } else { wt.sinh() / omega };
        let g = if half.abs() < 1e-8 { 0.5 * t * t } else { 2.0 * (sh / omega) * (sh / omega) };
        (wt.cosh(), s, g)
    }
}

/// Explicit locally exact step: the exact flow over `ε` of the system
/// linearized at `xₙ`.
///
/// Position: `xₙ + S·pₙ − G·V′(xₙ)`; momentum: `C·pₙ − S·V′(xₙ)`.
pub fn predictor_step(spec: &PotentialSpec, s: &State, eps: f64) -> State {
    let pv = evaluate(spec, s.x);
    let lin = LinearizedState::at(s.x, s.p).advance(pv.dv, pv.d2v, eps);
    State { t: s.t + eps, x: lin.position(), p: lin.p }
}
