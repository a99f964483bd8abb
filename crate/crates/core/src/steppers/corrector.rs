//! The implicit discrete gradient step with a general effective step δ.
//!
//! The two lines
//!
//! ```text
//! (x' − x)/δ = (p' + p)/2
//! (p' − p)/δ = −(V(x') − V(x))/(x' − x)
//! ```
//!
//! reduce to one scalar equation in the increment `h = x' − x`:
//!
//! ```text
//! F(h) = h − δp + (δ²/2)·DG(x, x + h) = 0
//! ```
//!
//! solved by Newton's method inside a maintained bracket with bisection
//! fallback.

use super::local::{delta_of, omega_of, predictor_step};
use super::{State, StepDiagnostics, StepParams};
use crate::potentials::{discrete_gradient, evaluate, PotentialSpec};
use crate::{Error, Result};

const BRACKET_EXPANSIONS: usize = 8;

/// One discrete gradient step with effective step `delta`; physical time
/// advances by `params.eps`.
pub fn step_dg(
    spec: &PotentialSpec,
    s: &State,
    delta: f64,
    params: &StepParams,
) -> Result<(State, StepDiagnostics)> {
    // Taylor seed: x + δp − δ²V′(x)/2.
    let seed = delta * s.p - 0.5 * delta * delta * spec.force(s.x);
    let d2v = spec.stiffness(s.x);
    let (next, iters) = corrector(spec, s, delta, seed, params)?;
    let diag = StepDiagnostics {
        omega_n: omega_of(d2v),
        delta_n: delta,
        corrector_iters: iters,
        predictor_used: false,
    };
    Ok((next, diag))
}

/// Locally exact discrete gradient step: `δₙ` from `V″(xₙ)`, corrector
/// seeded by [`predictor_step`].
pub fn step_ledg(spec: &PotentialSpec, s: &State, params: &StepParams) -> Result<(State, StepDiagnostics)> {
    let d2v = evaluate(spec, s.x).d2v;
    let delta = delta_of(params.eps, d2v, params)?;
    let pred = predictor_step(spec, s, params.eps);
    let (next, iters) = corrector(spec, s, delta, pred.x - s.x, params)?;
    let diag = StepDiagnostics {
        omega_n: omega_of(d2v),
        delta_n: delta,
        corrector_iters: iters,
        predictor_used: true,
    };
    Ok((next, diag))
}

fn corrector(
    spec: &PotentialSpec,
    s: &State,
    delta: f64,
    seed: f64,
    params: &StepParams,
) -> Result<(State, usize)> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("effective step must be positive, got {delta}")));
    }
    let (h, iters) = solve_increment(spec, s.x, s.p, delta, seed, params)?;
    let x_new = s.x + h;
    let p_new = recover_momentum(spec, s.x, s.p, x_new, delta);
    Ok((State { t: s.t + params.eps, x: x_new, p: p_new }, iters))
}

// p' from the momentum line, then one Newton correction on the energy
// balance p'²/2 − p²/2 + V(x') − V(x) = 0 for the rounded x'. The correction
// is of rounding size; it is skipped near turning points where dividing by
// p' would amplify it.
fn recover_momentum(spec: &PotentialSpec, x: f64, p: f64, x_new: f64, delta: f64) -> f64 {
    let dg = discrete_gradient(spec, x, x_new);
    let p_new = p - delta * dg;
    let residual = 0.5 * (p_new - p) * (p_new + p) + potential_increment(spec, x, x_new, dg);
    if residual != 0.0 && residual.abs() <= 1e-3 * p_new * p_new {
        p_new - residual / p_new
    } else {
        p_new
    }
}

// V(b) − V(a) by whichever form rounds less: DG·h is free of cancellation
// but inherits the absolute rounding of the midpoint argument, which grows
// with |x|; the direct difference telescopes along a trajectory but cancels
// when the increment is small against V itself.
fn potential_increment(spec: &PotentialSpec, a: f64, b: f64, dg: f64) -> f64 {
    let h = b - a;
    let (va, vb) = (spec.value(a), spec.value(b));
    let dg_rounding = a.abs().max(b.abs()) * (h * spec.stiffness(0.5 * (a + b))).abs();
    if dg_rounding > va.abs() + vb.abs() {
        vb - va
    } else {
        dg * h
    }
}

fn residual(spec: &PotentialSpec, x: f64, p: f64, delta: f64, h: f64) -> (f64, f64) {
    let dp = delta * p;
    let pull = 0.5 * delta * delta * discrete_gradient(spec, x, x + h);
    let noise = 4.0 * f64::EPSILON * (h.abs() + dp.abs() + pull.abs() + (x + h).abs());
    (h - dp + pull, noise)
}

// dF/dh = 1 + (δ²/2)·∂DG(x, x+h)/∂h.
fn residual_slope(spec: &PotentialSpec, x: f64, delta: f64, h: f64) -> f64 {
    let y = x + h;
    let ddg = if h.abs() > 1e-3 * (1.0 + x.abs()) {
        (spec.force(y) - discrete_gradient(spec, x, y)) / h
    } else {
        0.5 * spec.stiffness(x + 2.0 * h / 3.0)
    };
    1.0 + 0.5 * delta * delta * ddg
}

fn solve_increment(
    spec: &PotentialSpec,
    x: f64,
    p: f64,
    delta: f64,
    seed: f64,
    params: &StepParams,
) -> Result<(f64, usize)> {
    let f = |h: f64| residual(spec, x, p, delta, h).0;
    let noise = |h: f64| residual(spec, x, p, delta, h).1;

    let f_seed = f(seed);
    if f_seed == 0.0 {
        return Ok((seed, 0));
    }

    // Bracket around the seed, expanded geometrically.
    let mut width = 2.0 * (delta * p).abs().max(delta);
    let mut lo = seed - width;
    let mut hi = seed + width;
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() {
        if expansions == BRACKET_EXPANSIONS {
            return Err(Error::NoConvergence { iterations: 0, residual: f_seed.abs() });
        }
        width *= 2.0;
        lo = seed - width;
        hi = seed + width;
        f_lo = f(lo);
        f_hi = f(hi);
        expansions += 1;
    }
    if f_lo == 0.0 {
        return Ok((lo, 0));
    }
    if f_hi == 0.0 {
        return Ok((hi, 0));
    }
    // Orient so that f(lo) < 0 < f(hi).
    if f_lo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }

    let mut h = if (seed - lo) * (seed - hi) < 0.0 { seed } else { 0.5 * (lo + hi) };
    let mut dh_old = (hi - lo).abs();
    let mut dh = dh_old;
    let mut fh = f(h);
    for iter in 1..=params.max_iter {
        if fh == 0.0 || fh.abs() <= noise(h) * 1e-2 {
            return Ok((h, iter - 1));
        }
        if fh < 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        let slope = residual_slope(spec, x, delta, h);
        let newton = h - fh / slope;
        // A Newton correction below the tolerance or the spacing of floats
        // ends the iteration before it can collide with a bracket end.
        let resolution = 2.0 * f64::EPSILON * (x.abs() + h.abs()) + 1e-300;
        if slope.is_finite() && slope != 0.0 && (newton - h).abs() <= (params.solver_tol * h.abs()).max(resolution) {
            return Ok((newton, iter));
        }
        let in_bracket = (newton - lo) * (newton - hi) < 0.0;
        let step = if slope.is_finite() && slope != 0.0 && in_bracket && (2.0 * fh).abs() <= (dh_old * slope).abs() {
            dh_old = dh;
            newton - h
        } else {
            dh_old = dh;
            0.5 * (lo + hi) - h
        };
        dh = step;
        h += step;
        if step.abs() <= params.solver_tol * h.abs() || step.abs() <= resolution || lo == hi {
            return Ok((h, iter));
        }
        fh = f(h);
    }
    // Stalled at the rounding floor: accept if the residual is pure noise.
    if fh.abs() <= noise(h) {
        return Ok((h, params.max_iter));
    }
    Err(Error::NoConvergence { iterations: params.max_iter, residual: fh.abs() })
}
