//! Closed-form oracles for `V(x) = −cos x` started at `x₀ = 0`, and for
//! leap-frog on the harmonic oscillator.

use std::f64::consts::PI;

use super::elliptic::elliptic_k_complementary;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Libration,
    Separatrix,
    Rotation,
}

/// Energy bookkeeping for a pendulum started at `x₀ = 0` with momentum `p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub e: f64,
    pub p0: f64,
    pub regime: Regime,
}

impl EnergyRecord {
    pub fn pendulum(p0: f64) -> Self {
        let regime = if p0.abs() < 2.0 {
            Regime::Libration
        } else if p0.abs() == 2.0 {
            Regime::Separatrix
        } else {
            Regime::Rotation
        };
        EnergyRecord { e: 0.5 * p0 * p0 - 1.0, p0, regime }
    }
}

/// Exact period of the pendulum from `(x, p) = (0, p0)`.
///
/// Libration: `4K(k)`, `k = p0/2`. Rotation: time for `x` to advance by 2π,
/// `(2/k)K(1/k)`.
pub fn exact_pendulum_period(p0: f64) -> Result<f64> {
    if !(p0 > 0.0) || !p0.is_finite() {
        return Err(Error::InvalidMomentum(p0));
    }
    match EnergyRecord::pendulum(p0).regime {
        Regime::Separatrix => Err(Error::SeparatrixPeriodInfinite),
        Regime::Libration => {
            // k' = √(1 − p0²/4)
            let kc = ((2.0 - p0) * (2.0 + p0)).sqrt() / 2.0;
            Ok(4.0 * elliptic_k_complementary(kc))
        }
        Regime::Rotation => {
            // modulus 2/p0, k' = √(1 − 4/p0²)
            let kc = ((p0 - 2.0) * (p0 + 2.0)).sqrt() / p0;
            Ok(4.0 / p0 * elliptic_k_complementary(kc))
        }
    }
}

/// The `E = 1` solution through `(0, 0, 2)`: `x = 4·arctan(eᵗ) − π`,
/// `p = 2/cosh t`. Returns `(x, p)`.
pub fn separatrix_solution(t: f64) -> (f64, f64) {
    // 4·arctan(eᵗ) − π = 4·arctan(tanh(t/2))
    let x = 4.0 * (0.5 * t).tanh().atan();
    (x, 2.0 / t.cosh())
}

/// Period of the leap-frog map on `V = ω²x²/2`: `2πε / arccos(1 − ε²ω²/2)`.
pub fn leapfrog_harmonic_period(eps: f64, omega: f64) -> Result<f64> {
    let eps_omega = eps * omega;
    if !(eps_omega < 2.0) {
        return Err(Error::Unstable(eps_omega));
    }
    if !(eps > 0.0 && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("eps and omega must be positive, got {eps}, {omega}")));
    }
    // arccos(1 − 2s²) = 2·arcsin(s), s = εω/2
    let angle = 2.0 * (0.5 * eps_omega).asin();
    Ok(2.0 * PI * eps / angle)
}
