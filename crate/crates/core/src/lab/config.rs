use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::{EngineKind, PhaseChoice};
use crate::error::{Error, Result};
use crate::model::DEFAULT_GAMMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Evolve,
    Scan,
    Critical,
    Scaling,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for KGrid {
    fn default() -> Self {
        Self { start: 1.0, stop: 2.6, step: 0.1 }
    }
}

impl KGrid {
    /// `start, start + step, ...` up to `stop` inclusive, snapped to 1e-12.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

/// JSON run description. Every field has a default, so `{}` is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    pub n_qubits: usize,
    /// Kick strength for `evolve`.
    pub k: f64,
    pub gamma_target: f64,
    pub phase_pairs: Option<usize>,
    /// Master seed; realization seeds are derived from it.
    pub seed: u64,
    pub engine: EngineKind,
    pub phases: PhaseChoice,
    pub epsilon: f64,
    pub mu: f64,
    /// For `critical`/`scaling`: use `mu = epsilon` at every strength instead of `mu`.
    pub mu_equals_epsilon: bool,
    pub t_max: u64,
    pub record_every: u64,
    pub save_profiles: bool,
    pub realizations: usize,
    pub k_grid: KGrid,
    /// Explicit k values; overrides `k_grid`.
    pub k_values: Option<Vec<f64>>,
    /// Strengths for `critical`/`scaling`.
    pub epsilons: Vec<f64>,
    pub average_fraction: f64,
    /// Ideal critical point used for shifts and for `n_g`; measured at `epsilon = 0` when absent.
    pub reference_kc: Option<f64>,
    /// Precomputed `(eps_tilde, delta_kc)` pairs; `scaling` then only fits.
    pub points: Option<Vec<[f64; 2]>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            pipeline: Pipeline::Evolve,
            n_qubits: 8,
            k: 1.2,
            gamma_target: DEFAULT_GAMMA,
            phase_pairs: None,
            seed: 1,
            engine: EngineKind::Oracle,
            phases: PhaseChoice::FromCircuit,
            epsilon: 0.0,
            mu: 0.0,
            mu_equals_epsilon: false,
            t_max: 100,
            record_every: 1,
            save_profiles: false,
            realizations: 4,
            k_grid: KGrid::default(),
            k_values: None,
            epsilons: vec![0.0],
            average_fraction: 0.1,
            reference_kc: None,
            points: None,
        }
    }
}

fn field_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config { location: format!("field `{field}`"), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config { location, message } => {
                Error::Config { location: format!("{}: {location}", path.display()), message }
            }
            other => other,
        })
    }

    pub fn k_values(&self) -> Vec<f64> {
        self.k_values.clone().unwrap_or_else(|| self.k_grid.values())
    }

    pub fn mu_for(&self, epsilon: f64) -> f64 {
        if self.mu_equals_epsilon {
            epsilon
        } else {
            self.mu
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::state::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(field_error("n_qubits", format!("{} outside 2..=30", self.n_qubits)));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(field_error("k", "must be finite and >= 0"));
        }
        if !(self.gamma_target > 0.0 && self.gamma_target <= 0.5) {
            return Err(field_error("gamma_target", "must lie in (0, 0.5]"));
        }
        if self.realizations == 0 {
            return Err(field_error("realizations", "must be >= 1"));
        }
        if !(self.average_fraction > 0.0 && self.average_fraction <= 1.0) {
            return Err(field_error("average_fraction", "must lie in (0, 1]"));
        }
        if self.epsilon < 0.0 || self.mu < 0.0 {
            return Err(field_error("epsilon", "imperfection strengths must be >= 0"));
        }
        if let Some(eps) = self.epsilons.iter().find(|e| !(**e >= 0.0)) {
            return Err(field_error("epsilons", format!("invalid strength {eps}")));
        }
        let ks = self.k_values();
        if ks.is_empty() || ks.iter().any(|k| !(*k >= 0.0)) || ks.windows(2).any(|w| w[0] >= w[1]) {
            let field = if self.k_values.is_some() { "k_values" } else { "k_grid" };
            return Err(field_error(field, "k values must be non-empty, non-negative and strictly ascending"));
        }
        if !(self.k_grid.step > 0.0) {
            return Err(field_error("k_grid", "step must be > 0"));
        }
        let imperfect = match self.pipeline {
            Pipeline::Evolve | Pipeline::Scan => self.epsilon > 0.0 || self.mu > 0.0,
            Pipeline::Critical | Pipeline::Scaling => {
                self.points.is_none() && self.epsilons.iter().any(|&e| e > 0.0 || self.mu_for(e) > 0.0)
            }
        };
        if imperfect && self.engine == EngineKind::Oracle {
            return Err(field_error("engine", "imperfect runs require the circuit engine"));
        }
        if matches!(self.pipeline, Pipeline::Critical | Pipeline::Scaling)
            && self.points.is_none()
            && self.epsilons.is_empty()
        {
            return Err(field_error("epsilons", "need at least one strength"));
        }
        Ok(())
    }
}
