use ledg_core::potentials::{discrete_gradient, singularity_threshold};
use ledg_core::steppers::{delta_of, predictor_step, step_dg, step_ledg};
use ledg_core::{PotentialSpec, State, StepParams};
use proptest::prelude::*;

// Exact time-t flow of x'' = −c·x − b.
fn quadratic_flow(c: f64, b: f64, x: f64, p: f64, t: f64) -> (f64, f64) {
    if c == 0.0 {
        return (x + p * t - 0.5 * b * t * t, p - b * t);
    }
    let x_eq = -b / c;
    let w = c.abs().sqrt();
    let xi = x - x_eq;
    if c > 0.0 {
        let (s, co) = (w * t).sin_cos();
        (x_eq + xi * co + p * s / w, p * co - xi * w * s)
    } else {
        let (s, co) = ((w * t).sinh(), (w * t).cosh());
        (x_eq + xi * co + p * s / w, p * co + xi * w * s)
    }
}

fn quadratic(c: f64, b: f64) -> PotentialSpec {
    PotentialSpec::polynomial(vec![0.0, b, 0.5 * c])
}

fn any_potential() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        Just(PotentialSpec::Pendulum),
        (0.2f64..3.0).prop_map(PotentialSpec::harmonic),
        (0.2f64..2.0).prop_map(PotentialSpec::inverted_harmonic),
        (-2.0f64..2.0).prop_map(PotentialSpec::linear_force),
        prop::collection::vec(-1.0f64..1.0, 1..6).prop_map(PotentialSpec::polynomial),
    ]
}

proptest! {
    #[test]
    fn discrete_gradient_is_symmetric(spec in any_potential(), a in -4.0f64..4.0, b in -4.0f64..4.0) {
        prop_assert_eq!(discrete_gradient(&spec, a, b), discrete_gradient(&spec, b, a));
    }

    #[test]
    fn discrete_gradient_matches_increment(spec in any_potential(), a in -4.0f64..4.0, d in 0.01f64..2.0) {
        let b = a + d;
        let dv = spec.value(b) - spec.value(a);
        let scale = 1.0 + spec.value(a).abs() + spec.value(b).abs();
        prop_assert!((discrete_gradient(&spec, a, b) * (b - a) - dv).abs() <= 1e-13 * scale);
    }

    #[test]
    fn discrete_gradient_is_continuous_at_threshold(spec in any_potential(), a in -4.0f64..4.0) {
        let th = singularity_threshold(a, a);
        let below = discrete_gradient(&spec, a, a + 0.99 * th);
        let above = discrete_gradient(&spec, a, a + 1.01 * th);
        let scale = 1.0 + spec.force(a).abs() + spec.stiffness(a).abs();
        prop_assert!((below - above).abs() <= 1e-7 * scale);
        prop_assert!((discrete_gradient(&spec, a, a) - spec.force(a)).abs() <= 1e-14 * scale);
    }

    #[test]
    fn ledg_is_exact_on_quadratics(
        c in prop_oneof![-2.0f64..-0.1, Just(0.0), 0.1f64..2.0],
        b in -1.0f64..1.0,
        x in -2.0f64..2.0,
        p in -2.0f64..2.0,
        eps in 0.01f64..0.5,
    ) {
        let spec = quadratic(c, b);
        let s = State { t: 0.0, x, p };
        let (x1, p1) = quadratic_flow(c, b, x, p, eps);
        let (next, _) = step_ledg(&spec, &s, &StepParams::new(eps)).unwrap();
        let scale = 1.0 + x.abs() + p.abs();
        prop_assert!((next.x - x1).abs() <= 1e-12 * scale, "x {} vs {}", next.x, x1);
        prop_assert!((next.p - p1).abs() <= 1e-12 * scale, "p {} vs {}", next.p, p1);
        let pred = predictor_step(&spec, &s, eps);
        prop_assert!((pred.x - x1).abs() <= 1e-14 * scale);
        prop_assert!((pred.p - p1).abs() <= 1e-14 * scale);
    }

    #[test]
    fn dg_step_conserves_energy(spec in any_potential(), x in -2.0f64..2.0, p in -2.0f64..2.0, eps in 0.01f64..0.3) {
        let s = State { t: 0.0, x, p };
        let (next, _) = step_dg(&spec, &s, eps, &StepParams::new(eps)).unwrap();
        let e0 = spec.energy(x, p);
        prop_assert!((spec.energy(next.x, next.p) - e0).abs() <= 1e-13 * (1.0 + e0.abs()));
    }

    #[test]
    fn dg_is_reversible(x in -3.0f64..3.0, p in -2.5f64..2.5, eps in 0.01f64..0.5) {
        let spec = PotentialSpec::Pendulum;
        let params = StepParams::new(eps);
        let (fwd, _) = step_dg(&spec, &State { t: 0.0, x, p }, eps, &params).unwrap();
        let (back, _) = step_dg(&spec, &State { t: 0.0, x: fwd.x, p: -fwd.p }, eps, &params).unwrap();
        prop_assert!((back.x - x).abs() <= 1e-13 && (back.p + p).abs() <= 1e-13);
    }

    #[test]
    fn delta_ratio_is_bounded(d2v in -1.0f64..1.0, eps in 1e-4f64..0.5) {
        let params = StepParams::new(eps);
        let r = delta_of(eps, d2v, &params).unwrap() / eps;
        let lo = delta_of(eps, -1.0, &params).unwrap() / eps;
        let hi = delta_of(eps, 1.0, &params).unwrap() / eps;
        prop_assert!(lo <= r && r <= hi);
        prop_assert!((r >= 1.0) == (d2v >= 0.0) || (r - 1.0).abs() < 1e-15);
    }
}
