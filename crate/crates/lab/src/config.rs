//! Experiment configuration: one JSON document per run.
//!
//! Grids and counts left out of the file are filled with per-experiment
//! defaults by [`ExperimentConfig::resolved`]; the file itself round-trips
//! unchanged through [`ExperimentConfig::from_json`] and [`ExperimentConfig::to_json`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ledg_core::analysis::DEFAULT_N_CYCLES;
use ledg_core::{PotentialSpec, SchemeKind, StepParams};
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "simulate")]
    Simulate,
    #[serde(rename = "sweep-p0", alias = "sweep_p0")]
    SweepP0,
    #[serde(rename = "sweep-eps", alias = "sweep_eps")]
    SweepEps,
    #[serde(rename = "separatrix")]
    Separatrix,
    #[serde(rename = "delta-profile", alias = "delta_profile")]
    DeltaProfile,
    #[serde(rename = "order-study", alias = "order_study")]
    OrderStudy,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Simulate,
        Experiment::SweepP0,
        Experiment::SweepEps,
        Experiment::Separatrix,
        Experiment::DeltaProfile,
        Experiment::OrderStudy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::SweepP0 => "sweep-p0",
            Experiment::SweepEps => "sweep-eps",
            Experiment::Separatrix => "separatrix",
            Experiment::DeltaProfile => "delta-profile",
            Experiment::OrderStudy => "order-study",
        }
    }

    fn is_sweep(self) -> bool {
        matches!(self, Experiment::SweepP0 | Experiment::SweepEps)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        let s = s.replace('_', "-");
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<SchemeKind>,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub p0_grid: Vec<f64>,
    /// Time steps; when empty, `solver.eps` or the experiment default.
    #[serde(default)]
    pub eps_grid: Vec<f64>,
    #[serde(default = "default_n_cycles")]
    pub n_cycles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<u64>,
    /// Corrector controls. For grid experiments `eps` is replaced per cell.
    #[serde(default = "default_solver")]
    pub solver: StepParams,
    #[serde(default)]
    pub output_path: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_schemes() -> Vec<SchemeKind> {
    SchemeKind::COMPARED.to_vec()
}

fn default_potential() -> PotentialSpec {
    PotentialSpec::Pendulum
}

fn default_n_cycles() -> usize {
    DEFAULT_N_CYCLES
}

fn default_solver() -> StepParams {
    StepParams::new(0.02)
}

fn default_workers() -> usize {
    1
}

/// `{0.02, 0.1, 0.2, …, 1.9, 2.1, …, 3.0}`.
pub fn default_p0_grid() -> Vec<f64> {
    let mut grid = vec![0.02];
    grid.extend((1..=19).map(|k| k as f64 / 10.0));
    grid.extend((21..=30).map(|k| k as f64 / 10.0));
    grid
}

/// `n` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect()
}

/// Number of points in the default δ-profile position grid over `[−π, π]`.
pub const PROFILE_POINTS: usize = 1001;

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            schemes: default_schemes(),
            potential: default_potential(),
            p0_grid: Vec::new(),
            eps_grid: Vec::new(),
            n_cycles: default_n_cycles(),
            n_steps: None,
            solver: default_solver(),
            output_path: PathBuf::new(),
            workers: default_workers(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Copy with empty grids and unset counts replaced by the defaults of
    /// the experiment, validated.
    pub fn resolved(&self) -> Result<Self, LabError> {
        let mut c = self.clone();
        let eps = c.solver.eps;
        match c.experiment {
            Experiment::Simulate => {
                fill(&mut c.p0_grid, || vec![1.0]);
                fill(&mut c.eps_grid, || vec![eps]);
                c.n_steps.get_or_insert(1000);
            }
            Experiment::Separatrix => {
                fill(&mut c.p0_grid, || vec![1.9999999999]);
                fill(&mut c.eps_grid, || vec![0.9]);
                c.n_steps.get_or_insert(40);
            }
            Experiment::SweepP0 => {
                fill(&mut c.p0_grid, default_p0_grid);
                fill(&mut c.eps_grid, || vec![eps]);
            }
            Experiment::SweepEps => {
                fill(&mut c.p0_grid, || vec![0.02]);
                fill(&mut c.eps_grid, || log_grid(1e-3, 0.5, 12));
            }
            Experiment::DeltaProfile => {
                fill(&mut c.eps_grid, || vec![0.02, 0.1]);
            }
            Experiment::OrderStudy => {
                fill(&mut c.p0_grid, || vec![1.0]);
                fill(&mut c.eps_grid, || log_grid(1e-3, 1e-1, 9));
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), LabError> {
        let bad = |msg: String| Err(LabError::Config(msg));
        self.potential.validate().map_err(LabError::Config)?;
        self.solver.validate().map_err(|e| LabError::Config(e.to_string()))?;
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.experiment != Experiment::DeltaProfile && self.schemes.is_empty() {
            return bad("scheme list is empty".into());
        }
        for (name, grid) in [("p0_grid", &self.p0_grid), ("eps_grid", &self.eps_grid)] {
            if self.experiment == Experiment::DeltaProfile && name == "p0_grid" {
                continue;
            }
            if grid.is_empty() {
                return bad(format!("{name} is empty"));
            }
            if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return bad(format!("{name} entries must be positive and finite"));
            }
            if grid.windows(2).any(|w| !(w[1] > w[0])) {
                return bad(format!("{name} must be strictly increasing"));
            }
        }
        let single = |name: &str, grid: &[f64]| {
            if grid.len() == 1 {
                Ok(())
            } else {
                bad(format!("{} needs exactly one {name} value, got {}", self.experiment, grid.len()))
            }
        };
        match self.experiment {
            Experiment::Simulate | Experiment::Separatrix => {
                single("p0", &self.p0_grid)?;
                single("eps", &self.eps_grid)?;
            }
            Experiment::OrderStudy => {
                single("p0", &self.p0_grid)?;
                if self.eps_grid.len() < 5 {
                    return bad(format!("order-study needs at least 5 eps values, got {}", self.eps_grid.len()));
                }
                if self.eps_grid.iter().any(|&e| e > 1.0) {
                    return bad("order-study eps values must not exceed the unit horizon".into());
                }
            }
            Experiment::SweepP0 | Experiment::SweepEps => {
                if self.n_cycles < 10 {
                    return bad(format!("n_cycles must be at least 10, got {}", self.n_cycles));
                }
            }
            Experiment::DeltaProfile => {}
        }
        if self.experiment == Experiment::Separatrix && self.potential != PotentialSpec::Pendulum {
            return bad("separatrix runs need the pendulum potential".into());
        }
        if self.experiment.is_sweep() {
            match self.potential {
                PotentialSpec::Pendulum => {
                    if self.p0_grid.contains(&2.0) {
                        return bad("p0 = 2 lies on the separatrix, whose period is infinite".into());
                    }
                }
                PotentialSpec::Harmonic { .. } => {}
                _ => return bad("period sweeps need a pendulum or harmonic potential".into()),
            }
        }
        Ok(())
    }
}

fn fill(grid: &mut Vec<f64>, default: impl FnOnce() -> Vec<f64>) {
    if grid.is_empty() {
        *grid = default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_parses_with_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"sweep-p0","output_path":"out.csv"}"#).unwrap();
        assert_eq!(c.schemes, SchemeKind::COMPARED.to_vec());
        assert_eq!(c.potential, PotentialSpec::Pendulum);
        let r = c.resolved().unwrap();
        assert_eq!(r.p0_grid.len(), 30);
        assert_eq!(r.eps_grid, vec![0.02]);
    }

    #[test]
    fn snake_case_experiment_names_are_accepted() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"order_study"}"#).unwrap();
        assert_eq!(c.experiment, Experiment::OrderStudy);
        assert_eq!("delta_profile".parse::<Experiment>().unwrap(), Experiment::DeltaProfile);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let text = r#"{"experiment":"sweep-eps","schemes":["ledg","dg"],"potential":{"kind":"harmonic","omega":2.0},
            "p0_grid":[1.21],"eps_grid":[0.01,0.1],"n_cycles":20,"solver":{"eps":0.1,"max_iter":30},
            "output_path":"x.csv","workers":3}"#;
        let once = ExperimentConfig::from_json(text).unwrap().to_json();
        let twice = ExperimentConfig::from_json(&once).unwrap().to_json();
        assert_eq!(once, twice);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cases = [
            r#"{"experiment":"sweep-eps","schemes":[]}"#,
            r#"{"experiment":"sweep-p0","p0_grid":[1.0,0.5]}"#,
            r#"{"experiment":"sweep-p0","p0_grid":[1.0,2.0]}"#,
            r#"{"experiment":"simulate","p0_grid":[1.0,1.5]}"#,
            r#"{"experiment":"order-study","eps_grid":[0.1,0.01]}"#,
            r#"{"experiment":"sweep-p0","workers":0}"#,
            r#"{"experiment":"sweep-p0","potential":{"kind":"linear_force","slope":1.0}}"#,
        ];
        for text in cases {
            let c = ExperimentConfig::from_json(text).unwrap();
            assert!(matches!(c.resolved(), Err(LabError::Config(_))), "{text}");
        }
        assert!(ExperimentConfig::from_json(r#"{"experiment":"simulate","bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"nope"}"#).is_err());
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = log_grid(1e-3, 1e-1, 9);
        assert_eq!((g[0], g[8]), (1e-3, 1e-1));
        assert!((g[4] - 1e-2).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
