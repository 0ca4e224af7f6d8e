//! Experiment specifications: per-command defaults, TOML config overlay and
//! command-line overrides.
//!
//! A config file has the same shape as the resolved spec written into every
//! output header, so stripping the `# ` prefix from a header reproduces the
//! run:
//!
//! ```toml
//! [scenario]
//! name = "fig2"
//!
//! [network]
//! n_total = 5
//! n_active = 5
//! radius = 1.0
//! alpha = 4.0
//!
//! [library]
//! size = 2
//! gamma = 1.2
//! cache_capacity = 1
//!
//! [sweep]
//! variable = "beta_db"
//! start = -10.0
//! stop = 20.0
//! steps = 7
//!
//! [run]
//! beta_db = 0.0
//! trials = 1000000
//! seed = 1
//! weight_mode = "paper"
//! ranks = [1, 2, 3]
//! n_active_values = [1, 5, 10, 20]
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::caching::ContentLibrary;
use crate::geometry::NetworkConfig;
use crate::interference::WeightMode;

/// Subcommands that run an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Coverage,
    HitCurve,
    MaxHit,
    Throughput,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Coverage => "coverage",
            Experiment::HitCurve => "hitcurve",
            Experiment::MaxHit => "maxhit",
            Experiment::Throughput => "throughput",
        }
    }

    /// The only sweep axis each experiment understands.
    pub fn sweep_variable(self) -> SweepVariable {
        match self {
            Experiment::Coverage => SweepVariable::BetaDb,
            Experiment::HitCurve => SweepVariable::B1,
            Experiment::MaxHit | Experiment::Throughput => SweepVariable::NActive,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// SIR threshold in dB.
    BetaDb,
    /// Caching probability of the most popular content.
    B1,
    /// Number of simultaneously active devices.
    NActive,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::BetaDb => "beta_db",
            SweepVariable::B1 => "b1",
            SweepVariable::NActive => "n_active",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    /// Evenly spaced points from `start` to `stop` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    /// Fixed SIR threshold in dB (experiments that do not sweep it).
    pub beta_db: f64,
    /// Monte Carlo trials per row; 0 disables the simulation columns.
    pub trials: u64,
    pub seed: u64,
    pub weight_mode: WeightMode,
    /// Serving ranks reported by `coverage`.
    pub ranks: Vec<usize>,
    /// Active-device counts for the `hitcurve` family of curves.
    pub n_active_values: Vec<usize>,
    /// Where to write the CSV. Not recorded in output headers, so the same
    /// run written to two paths gives identical files.
    #[serde(default, skip_serializing)]
    pub output: Option<String>,
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub network: NetworkConfig,
    pub library: ContentLibrary,
    pub sweep: SweepAxis,
    pub run: RunSettings,
}

/// Why a spec was rejected; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn invalid<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

/// Values given on the command line; `None` leaves the spec untouched.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub weight_mode: Option<WeightMode>,
    pub output: Option<String>,
}

impl ExperimentSpec {
    /// Defaults reproduce the figure each experiment corresponds to.
    pub fn defaults(experiment: Experiment) -> Self {
        let fig2 = experiment == Experiment::Coverage;
        let network = if fig2 {
            NetworkConfig {
                n_total: 5,
                n_active: 5,
                radius: 1.0,
                alpha: 4.0,
            }
        } else {
            NetworkConfig {
                n_total: 20,
                n_active: 20,
                radius: 1.0,
                alpha: 4.0,
            }
        };
        let sweep = match experiment {
            Experiment::Coverage => SweepAxis {
                variable: SweepVariable::BetaDb,
                start: -10.0,
                stop: 20.0,
                steps: 7,
            },
            Experiment::HitCurve => SweepAxis {
                variable: SweepVariable::B1,
                start: 0.0,
                stop: 1.0,
                steps: 101,
            },
            Experiment::MaxHit | Experiment::Throughput => SweepAxis {
                variable: SweepVariable::NActive,
                start: 1.0,
                stop: 20.0,
                steps: 20,
            },
        };
        let trials = match experiment {
            Experiment::Coverage => 1_000_000,
            Experiment::HitCurve | Experiment::MaxHit => 100_000,
            Experiment::Throughput => 0,
        };
        Self {
            scenario: Scenario {
                name: experiment.name().to_string(),
            },
            network,
            library: ContentLibrary {
                size: 2,
                gamma: 1.2,
                cache_capacity: 1,
            },
            sweep,
            run: RunSettings {
                beta_db: 0.0,
                trials,
                seed: 1,
                weight_mode: WeightMode::Paper,
                ranks: vec![1, 2, 3],
                n_active_values: vec![1, 5, 10, 20],
                output: None,
            },
        }
    }

    /// Defaults, overlaid with the TOML text (if any), then the overrides.
    pub fn resolve(
        experiment: Experiment,
        config_text: Option<&str>,
        overrides: &Overrides,
    ) -> Result<Self, SpecError> {
        let mut spec = match config_text {
            None => Self::defaults(experiment),
            Some(text) => {
                let file: toml::Table = toml::from_str(text)
                    .map_err(|e| SpecError(format!("config parse error: {e}")))?;
                let mut base = toml::Table::try_from(Self::defaults(experiment))
                    .map_err(|e| SpecError(format!("internal: {e}")))?;
                merge(&mut base, file);
                toml::Value::Table(base)
                    .try_into()
                    .map_err(|e| SpecError(format!("invalid config: {e}")))?
            }
        };
        if let Some(seed) = overrides.seed {
            spec.run.seed = seed;
        }
        if let Some(trials) = overrides.trials {
            spec.run.trials = trials;
        }
        if let Some(mode) = overrides.weight_mode {
            spec.run.weight_mode = mode;
        }
        if let Some(out) = &overrides.output {
            spec.run.output = Some(out.clone());
        }
        spec.validate(experiment)?;
        Ok(spec)
    }

    pub fn resolve_file(
        experiment: Experiment,
        path: Option<&Path>,
        overrides: &Overrides,
    ) -> Result<Self, SpecError> {
        let text = match path {
            Some(p) => Some(
                std::fs::read_to_string(p)
                    .map_err(|e| SpecError(format!("cannot read config {}: {e}", p.display())))?,
            ),
            None => None,
        };
        Self::resolve(experiment, text.as_deref(), overrides)
    }

    pub fn validate(&self, experiment: Experiment) -> Result<(), SpecError> {
        self.network
            .validate()
            .map_err(|e| SpecError(format!("[network] {e}")))?;
        self.library
            .validate()
            .map_err(|e| SpecError(format!("[library] {e}")))?;
        let expected = experiment.sweep_variable();
        if self.sweep.variable != expected {
            return invalid(format!(
                "{experiment} sweeps `{}`, not `{}`",
                expected.name(),
                self.sweep.variable.name()
            ));
        }
        if self.sweep.steps < 2 {
            return invalid(format!("sweep needs steps >= 2, got {}", self.sweep.steps));
        }
        if !self.sweep.start.is_finite() || !self.sweep.stop.is_finite() {
            return invalid("sweep bounds must be finite");
        }
        if !self.run.beta_db.is_finite() {
            return invalid("beta_db must be finite");
        }
        let n_total = self.network.n_total;
        match experiment {
            Experiment::Coverage => {
                if self.run.ranks.is_empty() {
                    return invalid("coverage needs at least one rank in [run] ranks");
                }
                if let Some(k) = self.run.ranks.iter().find(|&&k| k == 0 || k > n_total) {
                    return invalid(format!("rank {k} outside 1..={n_total}"));
                }
            }
            Experiment::HitCurve => {
                if self.library.size != 2 || self.library.cache_capacity != 1 {
                    return invalid(
                        "hitcurve requires a two-content library with cache_capacity = 1",
                    );
                }
                let (lo, hi) = (
                    self.sweep.start.min(self.sweep.stop),
                    self.sweep.start.max(self.sweep.stop),
                );
                if lo < 0.0 || hi > 1.0 {
                    return invalid("b1 sweep must stay within [0, 1]");
                }
                if self.run.n_active_values.is_empty() {
                    return invalid("hitcurve needs at least one entry in [run] n_active_values");
                }
                if let Some(n) = self
                    .run
                    .n_active_values
                    .iter()
                    .find(|&&n| n == 0 || n > n_total)
                {
                    return invalid(format!("n_active {n} outside 1..={n_total}"));
                }
            }
            Experiment::MaxHit | Experiment::Throughput => {
                self.n_active_points()?;
            }
        }
        Ok(())
    }

    /// Integer sweep points for the n_active axis.
    pub fn n_active_points(&self) -> Result<Vec<usize>, SpecError> {
        let pts = self.sweep.points();
        let mut out = Vec::with_capacity(pts.len());
        for p in pts {
            if (p - p.round()).abs() > 1e-9 {
                return invalid(format!("n_active sweep point {p} is not an integer"));
            }
            let n = p.round();
            if n < 1.0 || n > self.network.n_total as f64 {
                return invalid(format!("n_active {n} outside 1..={}", self.network.n_total));
            }
            out.push(n as usize);
        }
        if out.windows(2).any(|w| w[0] == w[1]) {
            return invalid("n_active sweep repeats a value");
        }
        Ok(out)
    }

    /// The resolved spec as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }
}

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
