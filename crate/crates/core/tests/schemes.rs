use ledg_core::analysis::{estimate_period, measure_period, observed_order};
use ledg_core::reference::{exact_pendulum_period, reference_state, reference_trajectory, separatrix_solution};
use ledg_core::steppers::{integrate, predictor_step, step_ledg, Trajectory};
use ledg_core::{Error, PotentialSpec, SchemeId, SchemeKind, State, StepParams};

#[test]
fn energy_is_conserved_over_long_runs() {
    let spec = PotentialSpec::Pendulum;
    for kind in [SchemeKind::Dg, SchemeKind::DgDelta0, SchemeKind::Ledg] {
        for p0 in [0.5, 1.9, 2.5] {
            let eps = 0.1;
            let id = SchemeId::resolve(kind, &spec, eps).unwrap();
            let e0 = spec.energy(0.0, p0);
            let mut drift: f64 = 0.0;
            integrate(id, &spec, State::at_origin(p0), &StepParams::new(eps), 20_000, |s, _| {
                drift = drift.max((spec.energy(s.x, s.p) - e0).abs());
            })
            .unwrap();
            assert!(drift <= 1e-13 * (1.0 + e0.abs()), "{kind} p0={p0}: {drift:e}");
        }
    }
}

#[test]
fn ledg_tracks_harmonic_flow_for_many_steps() {
    let spec = PotentialSpec::harmonic(1.0);
    let eps = 0.1;
    let s = integrate(SchemeId::Ledg, &spec, State::at_origin(1.0), &StepParams::new(eps), 10_000, |_, _| {}).unwrap();
    assert!((s.t - 1000.0).abs() < 1e-10);
    assert!((s.x - s.t.sin()).abs() <= 1e-9, "{}", s.x - s.t.sin());
    assert!((s.p - s.t.cos()).abs() <= 1e-9);
}

#[test]
fn predictor_corrector_difference_is_high_order() {
    let spec = PotentialSpec::Pendulum;
    let s = State { t: 0.0, x: 0.7, p: 1.1 };
    let points: Vec<(f64, f64)> = [0.2, 0.1, 0.05, 0.025, 0.0125]
        .iter()
        .map(|&eps| {
            let (c, _) = step_ledg(&spec, &s, &StepParams::new(eps)).unwrap();
            let p = predictor_step(&spec, &s, eps);
            // The predictor's momentum is the linearized flow, one order lower;
            // the corrector only consumes its position.
            (eps, (c.x - p.x).abs())
        })
        .collect();
    let slope = observed_order(&points).unwrap();
    assert!(slope >= 3.5, "slope {slope}");
}

#[test]
fn symmetric_schemes_are_reversible() {
    let spec = PotentialSpec::Pendulum;
    let eps = 0.1;
    let params = StepParams::new(eps);
    for id in [SchemeId::LeapFrog, SchemeId::Dg] {
        let s0 = State::new(0.0, 0.3, 1.2);
        let fwd = integrate(id, &spec, s0, &params, 100, |_, _| {}).unwrap();
        let back = integrate(id, &spec, State::new(0.0, fwd.x, -fwd.p), &params, 100, |_, _| {}).unwrap();
        assert!((back.x - s0.x).abs() <= 1e-12 && (back.p + s0.p).abs() <= 1e-12, "{:?}", id.kind());
    }
}

#[test]
fn convergence_orders_at_unit_time() {
    let spec = PotentialSpec::Pendulum;
    let s0 = State::at_origin(1.0);
    let exact = reference_state(&spec, &s0, 1.0, Default::default()).unwrap();
    for kind in SchemeKind::COMPARED {
        let points: Vec<(f64, f64)> = [10u64, 20, 40, 80, 160]
            .iter()
            .map(|&n| {
                let eps = 1.0 / n as f64;
                let id = SchemeId::resolve(kind, &spec, eps).unwrap();
                let s = integrate(id, &spec, s0, &StepParams::new(eps), n, |_, _| {}).unwrap();
                (eps, ((s.x - exact.x).powi(2) + (s.p - exact.p).powi(2)).sqrt())
            })
            .collect();
        let slope = observed_order(&points).unwrap();
        if kind == SchemeKind::Ledg {
            assert!(slope >= 2.7, "{kind}: {slope}");
        } else {
            assert!((slope - 2.0).abs() <= 0.3, "{kind}: {slope}");
        }
    }
}

#[test]
fn ledg_is_most_accurate_for_small_oscillations() {
    let spec = PotentialSpec::Pendulum;
    let params = StepParams::new(0.02);
    let exact = exact_pendulum_period(0.02).unwrap();
    let err = |kind| {
        let id = SchemeId::resolve(kind, &spec, 0.02).unwrap();
        let est = estimate_period(id, &spec, 0.02, &params, 100).unwrap();
        ((est.period - exact) / exact).abs()
    };
    let ledg = err(SchemeKind::Ledg);
    assert!(ledg <= 1e-4 * err(SchemeKind::DgDelta0), "{ledg:e} vs {:e}", err(SchemeKind::DgDelta0));
    assert!(ledg <= 1e-8 * err(SchemeKind::LeapFrog));
    assert!(ledg <= 1e-8 * err(SchemeKind::Dg));
}

#[test]
fn measured_drift_surfaces_with_period() {
    let spec = PotentialSpec::Pendulum;
    let m = measure_period(SchemeId::Dg, &spec, 1.0, &StepParams::new(0.05), 10, 1_000_000).unwrap();
    assert!(m.energy_drift <= 1e-13);
    assert!(m.steps > 10 * 130);
}

#[test]
fn reference_oracle_agrees_with_closed_forms() {
    let spec = PotentialSpec::Pendulum;
    let grid: Vec<f64> = (1..=8).map(|i| i as f64 * 0.5).collect();
    let traj = reference_trajectory(&spec, &State::at_origin(2.0), &grid, Default::default()).unwrap();
    for s in traj {
        let (x, p) = separatrix_solution(s.t);
        assert!((s.x - x).abs() < 1e-10 && (s.p - p).abs() < 1e-10, "t={}", s.t);
    }
}

#[test]
fn ledg_follows_separatrix_neighbourhood() {
    let spec = PotentialSpec::Pendulum;
    for (p0, eps) in [(1.9999999999, 0.9), (2.0000000001, 0.7)] {
        let s0 = State::at_origin(p0);
        let grid: Vec<f64> = (1..=40).map(|i| i as f64 * eps).collect();
        let reference = reference_trajectory(&spec, &s0, &grid, Default::default()).unwrap();
        let traj: Vec<State> = Trajectory::new(SchemeId::Ledg, &spec, s0, StepParams::new(eps))
            .take(40)
            .map(|r| r.unwrap().0)
            .collect();
        let dev = traj.iter().zip(&reference).map(|(a, b)| (a.x - b.x).abs()).fold(0.0, f64::max);
        assert!(dev <= 0.05, "p0={p0}: {dev}");
    }
}

#[test]
fn step_too_large_is_reported_with_step_index() {
    let spec = PotentialSpec::harmonic(10.0);
    let err = integrate(SchemeId::Ledg, &spec, State::at_origin(1.0), &StepParams::new(0.31), 3, |_, _| {})
        .unwrap_err();
    match err {
        Error::AtStep { step, source } => {
            assert_eq!(step, 1);
            assert!(matches!(*source, Error::StepTooLarge { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn zero_steps_is_identity() {
    let s0 = State::new(0.5, 0.1, 0.2);
    let s = integrate(SchemeId::Dg, &PotentialSpec::Pendulum, s0, &StepParams::new(0.1), 0, |_, _| panic!()).unwrap();
    assert_eq!(s, s0);
}
