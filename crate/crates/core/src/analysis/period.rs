//! Period measurement by event location.
//!
//! An event is an upward crossing of a level: `x = 0` for libration, `x = 2πk`
//! for a rotating pendulum (positions are never wrapped, so rotation shows up
//! as successive multiples of 2π). Each crossing is located on a degree-5
//! polynomial through the six samples around the bracketing step; the same
//! root on a cubic through the inner four samples gives the error estimate.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use crate::potentials::PotentialSpec;
use crate::steppers::{SchemeId, State, StepParams, Trajectory};
use crate::{Error, Result};

/// Default cap on the number of steps a single measurement may take.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;

/// Default number of cycles averaged per measurement.
pub const DEFAULT_N_CYCLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    pub period: f64,
    pub n_cycles: usize,
    pub t_first: f64,
    pub t_last: f64,
    /// Estimated absolute error of `period`.
    pub uncertainty: f64,
}

/// Which positions count as events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventLevels {
    /// Upward crossings of `x = 0`.
    Zero,
    /// Upward crossings of any integer multiple of the spacing.
    Multiples(f64),
}

impl EventLevels {
    /// `Multiples(2π)` for the pendulum, `Zero` otherwise.
    pub fn for_potential(spec: &PotentialSpec) -> Self {
        match spec {
            PotentialSpec::Pendulum => EventLevels::Multiples(TAU),
            _ => EventLevels::Zero,
        }
    }

    // Levels L with a < L <= b (upward crossing from a to b).
    fn crossed(&self, a: f64, b: f64) -> Vec<f64> {
        if !(b > a) {
            return Vec::new();
        }
        match *self {
            EventLevels::Zero => {
                if a < 0.0 && b >= 0.0 {
                    vec![0.0]
                } else {
                    Vec::new()
                }
            }
            EventLevels::Multiples(spacing) => {
                let lo = (a / spacing).floor() as i64;
                let hi = (b / spacing).floor() as i64;
                // Widened by one on each side: the quotients may round across a level.
                (lo..=hi + 1)
                    .map(|k| k as f64 * spacing)
                    .filter(|&level| a < level && level <= b)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    index: u64,
    level: f64,
}

/// Streaming event locator. Feed samples in time order with [`push`], then
/// call [`finish`] to resolve crossings near the end of the stream.
///
/// [`push`]: EventLocator::push
/// [`finish`]: EventLocator::finish
#[derive(Debug)]
pub struct EventLocator {
    levels: EventLevels,
    window: VecDeque<(f64, f64)>,
    // Global index of window[0].
    base: u64,
    pending: VecDeque<Pending>,
    events: Vec<Event>,
}

const STENCIL: usize = 6;
const WINDOW: usize = 10;

impl EventLocator {
    pub fn new(levels: EventLevels) -> Self {
        EventLocator {
            levels,
            window: VecDeque::with_capacity(WINDOW),
            base: 0,
            pending: VecDeque::new(),
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, x: f64) {
        if let Some(&(_, x_prev)) = self.window.back() {
            let index = self.base + self.window.len() as u64 - 1;
            for level in self.levels.crossed(x_prev, x) {
                self.pending.push_back(Pending { index, level });
            }
        }
        self.window.push_back((t, x));
        self.resolve(false);
        // Keep enough history for a centred stencil of the oldest pending crossing.
        while self.window.len() > WINDOW {
            self.window.pop_front();
            self.base += 1;
        }
    }

    pub fn finish(&mut self) {
        self.resolve(true);
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn event_times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    fn resolve(&mut self, flush: bool) {
        let last = self.base + self.window.len() as u64 - 1;
        while let Some(&pending) = self.pending.front() {
            // Centred stencil i−2..=i+3 needs two samples past the bracket.
            if !flush && pending.index + 3 > last {
                break;
            }
            self.pending.pop_front();
            if let Some(event) = self.locate(pending) {
                self.events.push(event);
            }
        }
    }

    fn locate(&self, pending: Pending) -> Option<Event> {
        let n = self.window.len();
        let i = (pending.index - self.base) as usize;
        if i + 1 >= n {
            return None;
        }
        let (t0, x0) = self.window[i];
        let (t1, x1) = self.window[i + 1];
        let stencil = |len: usize| -> Vec<(f64, f64)> {
            let len = len.min(n);
            let start = i.saturating_sub(len / 2 - 1).min(n - len);
            self.window.range(start..start + len).map(|&(t, x)| (t - t0, x - pending.level)).collect()
        };
        let fine = NewtonPoly::fit(&stencil(STENCIL));
        let coarse = NewtonPoly::fit(&stencil(4));
        let h = t1 - t0;
        let guess = h * (pending.level - x0) / (x1 - x0);
        let s_fine = fine.root_in(0.0, h, guess);
        let s_coarse = coarse.root_in(0.0, h, guess);
        Some(Event { time: t0 + s_fine, error: (s_fine - s_coarse).abs() })
    }

    /// Period from the first `n_cycles + 1` events.
    pub fn estimate(&self, n_cycles: usize) -> Result<PeriodEstimate> {
        let needed = n_cycles + 1;
        if n_cycles == 0 || self.events.len() < needed {
            return Err(Error::NoCycleDetected { found: self.events.len(), needed, steps: 0 });
        }
        let first = self.events[0];
        let last = self.events[n_cycles];
        let span = last.time - first.time;
        let rounding = 4.0 * f64::EPSILON * last.time.abs();
        Ok(PeriodEstimate {
            period: span / n_cycles as f64,
            n_cycles,
            t_first: first.time,
            t_last: last.time,
            uncertainty: (first.error + last.error + rounding) / n_cycles as f64,
        })
    }
}

// Interpolating polynomial in Newton form.
struct NewtonPoly {
    nodes: Vec<f64>,
    coeffs: Vec<f64>,
}

impl NewtonPoly {
    fn fit(points: &[(f64, f64)]) -> Self {
        let nodes: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut coeffs: Vec<f64> = points.iter().map(|p| p.1).collect();
        for level in 1..nodes.len() {
            for j in (level..nodes.len()).rev() {
                coeffs[j] = (coeffs[j] - coeffs[j - 1]) / (nodes[j] - nodes[j - level]);
            }
        }
        NewtonPoly { nodes, coeffs }
    }

    fn eval(&self, s: f64) -> (f64, f64) {
        let m = self.coeffs.len();
        let mut v = self.coeffs[m - 1];
        let mut d = 0.0;
        for j in (0..m - 1).rev() {
            d = d * (s - self.nodes[j]) + v;
            v = v * (s - self.nodes[j]) + self.coeffs[j];
        }
        (v, d)
    }

    // Safeguarded Newton on [a, b], where the polynomial changes sign upward.
    fn root_in(&self, a: f64, b: f64, guess: f64) -> f64 {
        let (mut lo, mut hi) = (a, b);
        let mut s = guess.clamp(a, b);
        for _ in 0..60 {
            let (v, d) = self.eval(s);
            if v == 0.0 {
                return s;
            }
            if v < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = s - v / d;
            let next = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - s).abs() <= 2.0 * f64::EPSILON * (b - a) {
                return next;
            }
            s = next;
        }
        s
    }
}

/// Result of running a scheme until enough period events occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMeasurement {
    pub estimate: PeriodEstimate,
    /// `max |Eₙ − E₀|` over the run.
    pub energy_drift: f64,
    pub steps: u64,
}

/// Runs `scheme` from `(0, 0, p0)` and measures the period over `n_cycles` cycles.
pub fn estimate_period(
    scheme: SchemeId,
    spec: &PotentialSpec,
    p0: f64,
    params: &StepParams,
    n_cycles: usize,
) -> Result<PeriodEstimate> {
    measure_period(scheme, spec, p0, params, n_cycles, DEFAULT_STEP_BUDGET).map(|m| m.estimate)
}

/// [`estimate_period`] with an explicit step budget, also reporting the energy drift.
pub fn measure_period(
    scheme: SchemeId,
    spec: &PotentialSpec,
    p0: f64,
    params: &StepParams,
    n_cycles: usize,
    step_budget: u64,
) -> Result<PeriodMeasurement> {
    if n_cycles < 10 {
        return Err(Error::InvalidParameter(format!("need at least 10 cycles, got {n_cycles}")));
    }
    params.validate()?;
    let s0 = State::at_origin(p0);
    let e0 = spec.energy(s0.x, s0.p);
    let mut locator = EventLocator::new(EventLevels::for_potential(spec));
    locator.push(s0.t, s0.x);
    let mut drift: f64 = 0.0;
    let needed = n_cycles + 1;
    let mut traj = Trajectory::new(scheme, spec, s0, *params);
    // Two samples past the last bracketing step complete its stencil.
    let mut tail: Option<u32> = None;
    while traj.steps() < step_budget {
        let (s, _) = traj.next().expect("trajectory ended without error")?;
        locator.push(s.t, s.x);
        drift = drift.max((spec.energy(s.x, s.p) - e0).abs());
        if let Some(k) = tail.as_mut() {
            *k -= 1;
            if *k == 0 {
                break;
            }
        } else if locator.event_count() + locator.pending.len() >= needed {
            tail = Some(2);
        }
    }
    locator.finish();
    let steps = traj.steps();
    let estimate = locator.estimate(n_cycles).map_err(|e| match e {
        Error::NoCycleDetected { found, needed, .. } => Error::NoCycleDetected { found, needed, steps },
        other => other,
    })?;
    Ok(PeriodMeasurement { estimate, energy_drift: drift, steps })
}

/// Period from externally supplied samples `(t, x)`.
pub fn estimate_period_from_samples<I>(samples: I, levels: EventLevels, n_cycles: usize) -> Result<PeriodEstimate>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut locator = EventLocator::new(levels);
    for (t, x) in samples {
        locator.push(t, x);
    }
    locator.finish();
    locator.estimate(n_cycles)
}
