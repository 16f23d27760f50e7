//! Experiment configuration files.
//!
//! A config is a JSON object. Every key is optional; missing keys take the
//! benchmark values. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use narrevo_core::{Belief, LawOfMotion, PersistentRedraw, PrecisionMenu, SimParams};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::output::Manifest;

/// Parameter changes applied on top of the base parameters for one
/// comparative-statics variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(alias = "T")]
    pub horizon: u32,
    pub tau: u32,
    pub p: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub mu0: f64,
    pub delta: f64,
    pub persistent_redraw: PersistentRedraw,
    pub q_grid: Vec<f64>,
    pub laws: Vec<LawOfMotion>,
    pub reps: usize,
    pub master_seed: u64,
    /// One entry per variant; the default single empty entry is the
    /// benchmark itself.
    pub overrides: Vec<Overrides>,
    pub emit_timeseries: bool,
    pub output_dir: PathBuf,
}

pub const DEFAULT_MASTER_SEED: u64 = 20_240_601;

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 500,
            horizon: 700,
            tau: 10,
            p: 0.7,
            rho1: 0.6,
            rho2: 0.9,
            mu0: 0.5,
            delta: 0.5,
            persistent_redraw: PersistentRedraw::AfterSelection,
            q_grid: vec![0.5, 0.6, 0.7, 0.8, 0.9],
            laws: LawOfMotion::ALL.to_vec(),
            reps: 100,
            master_seed: DEFAULT_MASTER_SEED,
            overrides: vec![Overrides::default()],
            emit_timeseries: false,
            output_dir: PathBuf::from("narrevo-out"),
        }
    }
}

/// One point of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Position in enumeration order (law, then override set, then q);
    /// feeds seed derivation.
    pub index: usize,
    pub law: LawOfMotion,
    pub q: f64,
    pub override_index: usize,
    pub params: SimParams,
}

impl Cell {
    pub fn describe(&self) -> String {
        format!(
            "cell {} (law {}, q {}, override set {})",
            self.index, self.law, self.q, self.override_index
        )
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str, origin: &Path) -> Result<ExperimentConfig, ConfigError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::parse(origin, &e))?;
        config.validate()
    }

    /// Parameters for one law, q and override set, before validation.
    pub fn params_for(&self, law: LawOfMotion, q: f64, overrides: &Overrides) -> Result<SimParams, ConfigError> {
        let p = overrides.p.unwrap_or(self.p);
        let rho2 = overrides.rho2.unwrap_or(self.rho2);
        let menu = PrecisionMenu::new(self.rho1, rho2, p).map_err(ConfigError::invalid)?;
        let mu0 = Belief::new(self.mu0).map_err(|_| ConfigError::Invalid {
            key: "mu0".into(),
            message: format!("mu0 must lie in (0, 1), got {}", self.mu0),
        })?;
        Ok(SimParams {
            n: overrides.n.unwrap_or(self.n),
            horizon: self.horizon,
            tau: overrides.tau.unwrap_or(self.tau),
            menu,
            mu0,
            q,
            delta: overrides.delta.unwrap_or(self.delta),
            law,
            persistent_redraw: self.persistent_redraw,
        })
    }

    /// Every cell of the matrix, validated, in enumeration order.
    pub fn cells(&self) -> Result<Vec<Cell>, ConfigError> {
        let mut cells = Vec::with_capacity(self.laws.len() * self.overrides.len() * self.q_grid.len());
        for &law in &self.laws {
            for (override_index, overrides) in self.overrides.iter().enumerate() {
                for &q in &self.q_grid {
                    let index = cells.len();
                    let describe = |e: ConfigError| {
                        let cell = format!("cell {index} (law {law}, q {q}, override set {override_index})");
                        e.in_cell(cell)
                    };
                    let params = self
                        .params_for(law, q, overrides)
                        .and_then(|p| p.validate().map_err(ConfigError::invalid))
                        .map_err(describe)?;
                    cells.push(Cell {
                        index,
                        law,
                        q,
                        override_index,
                        params,
                    });
                }
            }
        }
        Ok(cells)
    }

    pub fn validate(self) -> Result<ExperimentConfig, ConfigError> {
        let invalid = |key: &str, message: String| ConfigError::Invalid {
            key: key.into(),
            message,
        };
        if self.reps < 1 {
            return Err(invalid("reps", "reps must be at least 1".into()));
        }
        if self.q_grid.is_empty() {
            return Err(invalid("q_grid", "q_grid must not be empty".into()));
        }
        if let Some(q) = self.q_grid.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
            return Err(invalid("q_grid", format!("every q must lie in (0, 1], got {q}")));
        }
        if self.laws.is_empty() {
            return Err(invalid("laws", "laws must not be empty".into()));
        }
        if self.overrides.is_empty() {
            return Err(invalid("overrides", "overrides must hold at least one (possibly empty) set".into()));
        }
        // Base parameters first so errors name the plain key when no
        // override is involved.
        self.params_for(self.laws[0], self.q_grid[0], &Overrides::default())?
            .validate()
            .map_err(ConfigError::invalid)?;
        self.cells()?;
        Ok(self)
    }
}

/// Reads a config file, or the config echoed in a `manifest.json`.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match ExperimentConfig::from_json_str(&text, path) {
        // A manifest written by a previous run stands in for its config.
        Err(err @ ConfigError::Parse { .. }) => match serde_json::from_str::<Manifest>(&text) {
            Ok(manifest) => manifest.config.validate(),
            Err(_) => Err(err),
        },
        other => other,
    }
}
