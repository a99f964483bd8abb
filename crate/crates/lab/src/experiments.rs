//! Experiment runners. Each turns a resolved config into rendered output;
//! cells run on a pool of `workers` threads and are reassembled in config
//! order, so the bytes do not depend on the pool size.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use ledg_core::analysis::{measure_period, observed_order, SweepRecord, DEFAULT_STEP_BUDGET};
use ledg_core::reference::{exact_pendulum_period, reference_state, reference_trajectory};
use ledg_core::steppers::{delta_of, integrate};
use ledg_core::{Error, PotentialSpec, SchemeId, SchemeKind, State, StepDiagnostics};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, PROFILE_POINTS};
use crate::output::{num, Artifacts, Table};
use crate::LabError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Adds a `wall_time` column to sweep output. Timings vary between runs.
    pub timing: bool,
}

/// Resolves `config`, runs it and writes the output files.
pub fn run(config: &ExperimentConfig, options: RunOptions) -> Result<Artifacts, LabError> {
    let config = config.resolved()?;
    if config.output_path.as_os_str().is_empty() {
        return Err(LabError::Config("output_path is not set".into()));
    }
    let artifacts = compute(&config, options)?;
    crate::output::write_artifacts(&config.output_path, &artifacts)?;
    Ok(artifacts)
}

/// Runs a resolved config without touching the file system.
pub fn compute(config: &ExperimentConfig, options: RunOptions) -> Result<Artifacts, LabError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| LabError::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    pool.install(|| match config.experiment {
        Experiment::Simulate | Experiment::Separatrix => simulate(config).map(csv_only),
        Experiment::SweepP0 | Experiment::SweepEps => Ok(csv_only(sweep_table(&sweep(config), options))),
        Experiment::DeltaProfile => Ok(csv_only(delta_profile(config))),
        Experiment::OrderStudy => order_study(config),
    })
}

fn csv_only(table: Table) -> Artifacts {
    Artifacts { csv: table.to_csv(), summary: None }
}

fn integration(e: Error) -> LabError {
    LabError::Integration(e.to_string())
}

/// Trajectories of every scheme from `(0, 0, p0)` next to the reference
/// solution at the same times.
pub fn simulate(config: &ExperimentConfig) -> Result<Table, LabError> {
    let (p0, eps) = (config.p0_grid[0], config.eps_grid[0]);
    let n = config.n_steps.unwrap_or(0);
    let spec = &config.potential;
    let params = config.solver.with_eps(eps);
    let s0 = State::at_origin(p0);
    let mut table = Table::new(vec!["step", "t", "x", "p", "energy", "delta_n", "scheme", "x_ref", "p_ref"]);
    if n == 0 {
        return Ok(table);
    }
    let grid: Vec<f64> = (1..=n).map(|k| k as f64 * eps).collect();
    let reference = reference_trajectory(spec, &s0, &grid, Default::default()).map_err(integration)?;

    let runs: Vec<Result<Vec<(State, StepDiagnostics)>, LabError>> = config
        .schemes
        .par_iter()
        .map(|&kind| {
            let fail = |e: Error| LabError::Integration(format!("scheme {kind}: {e}"));
            let id = SchemeId::resolve(kind, spec, eps).map_err(fail)?;
            let mut states = Vec::with_capacity(n as usize);
            integrate(id, spec, s0, &params, n, |s, d| states.push((*s, *d))).map_err(fail)?;
            Ok(states)
        })
        .collect();

    for (kind, run) in config.schemes.iter().zip(runs) {
        for (k, ((s, d), r)) in run?.iter().zip(&reference).enumerate() {
            table.rows.push(vec![
                (k + 1).to_string(),
                num(s.t),
                num(s.x),
                num(s.p),
                num(spec.energy(s.x, s.p)),
                num(d.delta_n),
                kind.to_string(),
                num(r.x),
                num(r.p),
            ]);
        }
    }
    Ok(table)
}

/// Exact period for `(x, p) = (0, p0)`: elliptic for the pendulum, `2π/ω`
/// for the harmonic oscillator.
pub fn exact_period(spec: &PotentialSpec, p0: f64) -> Result<f64, Error> {
    match spec {
        PotentialSpec::Pendulum => exact_pendulum_period(p0),
        PotentialSpec::Harmonic { omega } => Ok(TAU / omega),
        other => Err(Error::InvalidParameter(format!("no exact period for {other:?}"))),
    }
}

/// One record per `(scheme, p0, eps)`, scheme-major, then `p0`, then `eps`.
pub fn sweep(config: &ExperimentConfig) -> Vec<SweepRecord> {
    let cells: Vec<(SchemeKind, f64, f64)> = config
        .schemes
        .iter()
        .flat_map(|&s| config.p0_grid.iter().flat_map(move |&p0| config.eps_grid.iter().map(move |&eps| (s, p0, eps))))
        .collect();
    cells.par_iter().map(|&(scheme, p0, eps)| sweep_cell(config, scheme, p0, eps)).collect()
}

fn sweep_cell(config: &ExperimentConfig, scheme: SchemeKind, p0: f64, eps: f64) -> SweepRecord {
    let start = Instant::now();
    let spec = &config.potential;
    let outcome = (|| {
        let exact = exact_period(spec, p0)?;
        let id = SchemeId::resolve(scheme, spec, eps)?;
        let m = measure_period(id, spec, p0, &config.solver.with_eps(eps), config.n_cycles, DEFAULT_STEP_BUDGET)?;
        Ok::<_, Error>((((m.estimate.period - exact) / exact).abs(), m.energy_drift))
    })();
    let wall_time = start.elapsed().as_secs_f64();
    match outcome {
        Ok((err, drift)) => SweepRecord {
            scheme,
            p0,
            eps,
            rel_period_error: Some(err),
            energy_drift: Some(drift),
            wall_time,
            failure: None,
        },
        Err(e) => SweepRecord {
            scheme,
            p0,
            eps,
            rel_period_error: None,
            energy_drift: None,
            wall_time,
            failure: Some(e.code().to_string()),
        },
    }
}

pub fn sweep_table(records: &[SweepRecord], options: RunOptions) -> Table {
    let mut header = vec!["scheme", "p0", "eps", "rel_period_error", "energy_drift", "status"];
    if options.timing {
        header.push("wall_time");
    }
    let mut table = Table::new(header);
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for r in records {
        let mut row = vec![
            r.scheme.to_string(),
            num(r.p0),
            num(r.eps),
            opt(r.rel_period_error),
            opt(r.energy_drift),
            r.status(),
        ];
        if options.timing {
            row.push(num(r.wall_time));
        }
        table.rows.push(row);
    }
    table
}

/// `[−π, π]` in `PROFILE_POINTS` equal steps, endpoints exact.
pub fn profile_grid() -> Vec<f64> {
    let last = PROFILE_POINTS - 1;
    (0..PROFILE_POINTS)
        .map(|i| if i == last { PI } else { -PI + TAU * i as f64 / last as f64 })
        .collect()
}

/// `δ(x)/ε` for each ε; points where δ is undefined carry `failed:<reason>`.
pub fn delta_profile(config: &ExperimentConfig) -> Table {
    let spec = &config.potential;
    let grid = profile_grid();
    let mut table = Table::new(vec!["x", "ratio", "eps"]);
    for &eps in &config.eps_grid {
        let params = config.solver.with_eps(eps);
        for &x in &grid {
            let ratio = match delta_of(eps, spec.stiffness(x), &params) {
                Ok(d) => num(d / eps),
                Err(e) => format!("failed:{}", e.code()),
            };
            table.rows.push(vec![num(x), ratio, num(eps)]);
        }
    }
    table
}

/// Global error at `t = 1` for each scheme and step `1/N`, `N = round(1/ε)`,
/// plus the fitted slope per scheme.
pub fn order_study(config: &ExperimentConfig) -> Result<Artifacts, LabError> {
    let spec = &config.potential;
    let s0 = State::at_origin(config.p0_grid[0]);
    let exact = reference_state(spec, &s0, 1.0, Default::default()).map_err(integration)?;
    let steps: Vec<u64> = config.eps_grid.iter().map(|&e| (1.0 / e).round().max(1.0) as u64).collect();
    let cells: Vec<(SchemeKind, u64)> =
        config.schemes.iter().flat_map(|&s| steps.iter().map(move |&n| (s, n))).collect();
    let errors: Vec<Result<f64, Error>> = cells
        .par_iter()
        .map(|&(kind, n)| {
            let eps = 1.0 / n as f64;
            let id = SchemeId::resolve(kind, spec, eps)?;
            let s = integrate(id, spec, s0, &config.solver.with_eps(eps), n, |_, _| {})?;
            Ok((s.x - exact.x).hypot(s.p - exact.p))
        })
        .collect();

    let mut table = Table::new(vec!["scheme", "eps", "n_steps", "error"]);
    let mut points: BTreeMap<SchemeKind, Vec<(f64, f64)>> = BTreeMap::new();
    for (&(kind, n), err) in cells.iter().zip(&errors) {
        let eps = 1.0 / n as f64;
        let field = match err {
            Ok(e) => {
                points.entry(kind).or_default().push((eps, *e));
                num(*e)
            }
            Err(e) => format!("failed:{}", e.code()),
        };
        table.rows.push(vec![kind.to_string(), num(eps), n.to_string(), field]);
    }
    let summary: BTreeMap<String, Option<f64>> = config
        .schemes
        .iter()
        .map(|k| {
            let slope = points.get(k).and_then(|p| observed_order(p).ok());
            (k.to_string(), slope)
        })
        .collect();
    let mut json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    json.push(b'\n');
    Ok(Artifacts { csv: table.to_csv(), summary: Some(json) })
}
