//! Potentials `V(x)` for one-dimensional Newtonian systems `ẋ = p`, `ṗ = −V′(x)`.
//!
//! The family is closed so that every potential can be evaluated exactly,
//! serialized into experiment configs, and given a cancellation-free
//! increment `V(b) − V(a)`.

use serde::{Deserialize, Serialize};

/// A built-in potential.
///
/// JSON form: `{"kind":"pendulum"}`, `{"kind":"harmonic","omega":1.0}`,
/// `{"kind":"linear_force","slope":0.3}`, `{"kind":"inverted_harmonic","omega":1.0}`,
/// `{"kind":"polynomial","coeffs":[c0,c1,...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `V(x) = −cos x`
    Pendulum,
    /// `V(x) = ω²x²/2`
    Harmonic { omega: f64 },
    /// `V(x) = b·x`
    LinearForce { slope: f64 },
    /// `V(x) = −ω²x²/2`
    InvertedHarmonic { omega: f64 },
    /// `V(x) = Σ cₖ xᵏ`, ascending degree.
    Polynomial { coeffs: Vec<f64> },
}

/// `(V, V′, V″)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValues {
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
}

impl PotentialSpec {
    pub fn harmonic(omega: f64) -> Self {
        PotentialSpec::Harmonic { omega }
    }

    pub fn inverted_harmonic(omega: f64) -> Self {
        PotentialSpec::InvertedHarmonic { omega }
    }

    pub fn linear_force(slope: f64) -> Self {
        PotentialSpec::LinearForce { slope }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        PotentialSpec::Polynomial { coeffs }
    }

    /// Checks the parameter invariants (positive finite frequencies, nonempty
    /// finite coefficient lists).
    pub fn validate(&self) -> Result<(), String> {
        match self {
            PotentialSpec::Pendulum => Ok(()),
            PotentialSpec::Harmonic { omega } | PotentialSpec::InvertedHarmonic { omega } => {
                if omega.is_finite() && *omega > 0.0 {
                    Ok(())
                } else {
                    Err(format!("omega must be positive and finite, got {omega}"))
                }
            }
            PotentialSpec::LinearForce { slope } => {
                if slope.is_finite() {
                    Ok(())
                } else {
                    Err(format!("slope must be finite, got {slope}"))
                }
            }
            PotentialSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    Err("polynomial needs at least one coefficient".into())
                } else if coeffs.iter().any(|c| !c.is_finite()) {
                    Err("polynomial coefficients must be finite".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        evaluate(self, x).v
    }

    pub fn force(&self, x: f64) -> f64 {
        evaluate(self, x).dv
    }

    pub fn stiffness(&self, x: f64) -> f64 {
        evaluate(self, x).d2v
    }

    /// Total energy `p²/2 + V(x)`.
    pub fn energy(&self, x: f64, p: f64) -> f64 {
        0.5 * p * p + self.value(x)
    }

    /// `V(b) − V(a)` without subtracting two nearly equal values.
    pub fn increment(&self, a: f64, b: f64) -> f64 {
        divided_difference(self, a, b) * (b - a)
    }
}

/// Returns `(V(x), V′(x), V″(x))`.
pub fn evaluate(spec: &PotentialSpec, x: f64) -> PotentialValues {
    match spec {
        PotentialSpec::Pendulum => {
            let (s, c) = x.sin_cos();
            PotentialValues { v: -c, dv: s, d2v: c }
        }
        PotentialSpec::Harmonic { omega } => {
            let w2 = omega * omega;
            PotentialValues { v: 0.5 * w2 * x * x, dv: w2 * x, d2v: w2 }
        }
        PotentialSpec::InvertedHarmonic { omega } => {
            let w2 = omega * omega;
            PotentialValues { v: -0.5 * w2 * x * x, dv: -w2 * x, d2v: -w2 }
        }
        PotentialSpec::LinearForce { slope } => PotentialValues { v: slope * x, dv: *slope, d2v: 0.0 },
        PotentialSpec::Polynomial { coeffs } => horner3(coeffs, x),
    }
}

// Value, first and second derivative in one Horner sweep.
fn horner3(coeffs: &[f64], x: f64) -> PotentialValues {
    let mut v = 0.0;
    let mut dv = 0.0;
    let mut d2v = 0.0;
    for &c in coeffs.iter().rev() {
        d2v = d2v * x + 2.0 * dv;
        dv = dv * x + v;
        v = v * x + c;
    }
    PotentialValues { v, dv, d2v }
}

/// Width below which the difference quotient is replaced by `V′` at the
/// midpoint: `√u · (1 + max(|a|, |b|))`.
pub fn singularity_threshold(a: f64, b: f64) -> f64 {
    (f64::EPSILON / 2.0).sqrt() * (1.0 + a.abs().max(b.abs()))
}

/// The discrete gradient `(V(b) − V(a)) / (b − a)`, or `V′((a+b)/2)` when
/// `|b − a|` is within [`singularity_threshold`]. Symmetric in `(a, b)`.
pub fn discrete_gradient(spec: &PotentialSpec, a: f64, b: f64) -> f64 {
    if (b - a).abs() <= singularity_threshold(a, b) {
        spec.force(0.5 * (a + b))
    } else {
        divided_difference(spec, a, b)
    }
}

// Closed-form divided differences. Each is the exact quotient rearranged so
// that no two nearly equal potential values are subtracted.
fn divided_difference(spec: &PotentialSpec, a: f64, b: f64) -> f64 {
    match spec {
        PotentialSpec::Pendulum => {
            // cos a − cos b = 2 sin((a+b)/2) sin((b−a)/2)
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            mid.sin() * sinc(half)
        }
        PotentialSpec::Harmonic { omega } => omega * omega * 0.5 * (a + b),
        PotentialSpec::InvertedHarmonic { omega } => -omega * omega * 0.5 * (a + b),
        PotentialSpec::LinearForce { slope } => *slope,
        PotentialSpec::Polynomial { coeffs } => {
            // P_k = c_k + x P_{k+1};  D_k = P_{k+1}(b) + a D_{k+1}, D_n = 0.
            // Evaluated from both ends and averaged so the result is exactly symmetric.
            0.5 * (poly_divided_difference(coeffs, a, b) + poly_divided_difference(coeffs, b, a))
        }
    }
}

fn poly_divided_difference(coeffs: &[f64], a: f64, b: f64) -> f64 {
    let mut pb = 0.0;
    let mut d = 0.0;
    for &c in coeffs.iter().rev() {
        d = pb + a * d;
        pb = c + b * pb;
    }
    d
}

fn sinc(h: f64) -> f64 {
    if h.abs() < 1e-4 {
        let h2 = h * h;
        1.0 - h2 / 6.0 * (1.0 - h2 / 20.0)
    } else {
        h.sin() / h
    }
}
