//! aggregate.csv, timeseries.csv and manifest.json.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use narrevo_core::{AgentKind, LawOfMotion};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{ConfigError, HarnessError};
use crate::experiment::ExperimentRun;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const AGGREGATE_HEADER: [&str; 14] = [
    "law", "q", "delta", "p", "rho1", "rho2", "tau", "n", "reps", "kind", "mean_share", "sd_share", "mean_mse",
    "sd_mse",
];
pub const TIMESERIES_HEADER: [&str; 6] = ["rep", "t", "kind", "share", "mean_error", "psi"];

/// Formats `x` with 12 significant digits in plain decimal notation.
pub fn format_number(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("round-trips through its own formatting");
    format!("{rounded}")
}

fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestCell {
    pub index: usize,
    pub law: LawOfMotion,
    pub q: f64,
    pub override_index: usize,
    pub seed_base: u64,
    /// Value of the timeseries `rep` column for this cell's replication 0.
    pub rep_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub artifact: String,
    pub artifact_version: String,
    pub created_utc: String,
    pub master_seed: u64,
    pub seed_derivation: String,
    pub config: ExperimentConfig,
    pub cells: Vec<ManifestCell>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, run: &ExperimentRun) -> Manifest {
        Manifest {
            artifact: "narrevo".into(),
            artifact_version: ARTIFACT_VERSION.into(),
            created_utc: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            master_seed: config.master_seed,
            seed_derivation: "splitmix64 absorb of (master_seed, cell index, rep index)".into(),
            config: config.clone(),
            cells: run
                .aggregate
                .cells
                .iter()
                .map(|c| ManifestCell {
                    index: c.cell.index,
                    law: c.cell.law,
                    q: c.cell.q,
                    override_index: c.cell.override_index,
                    seed_base: c.seed_base,
                    rep_offset: c.cell.index * run.aggregate.reps,
                })
                .collect(),
        }
    }

    pub fn read(path: &Path) -> Result<Manifest, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| ConfigError::parse(path, &e))
    }
}

/// Paths of the files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub aggregate: PathBuf,
    pub timeseries: Option<PathBuf>,
    pub manifest: PathBuf,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, HarnessError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_aggregate(run: &ExperimentRun, path: &Path) -> Result<(), HarnessError> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut cells: Vec<_> = run.aggregate.cells.iter().collect();
    cells.sort_by(|a, b| {
        (a.cell.law.code(), a.cell.override_index)
            .cmp(&(b.cell.law.code(), b.cell.override_index))
            .then(a.cell.q.total_cmp(&b.cell.q))
    });

    let mut w = csv_writer(path)?;
    w.write_record(AGGREGATE_HEADER).map_err(csv_err)?;
    for c in cells {
        let p = &c.cell.params;
        for kind in AgentKind::ALL {
            let s = &c.kinds[kind.index()];
            w.write_record([
                c.cell.law.name().to_string(),
                format_number(c.cell.q),
                format_number(p.delta),
                format_number(p.menu.true_p()),
                format_number(p.menu.rho1()),
                format_number(p.menu.rho2()),
                p.tau.to_string(),
                p.n.to_string(),
                run.aggregate.reps.to_string(),
                kind.name().to_string(),
                format_number(s.mean_share),
                format_number(s.sd_share),
                format_optional(s.mean_mse),
                format_optional(s.sd_mse),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_timeseries(run: &ExperimentRun, path: &Path) -> Result<(), HarnessError> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let reps = run.aggregate.reps;
    let mut w = csv_writer(path)?;
    w.write_record(TIMESERIES_HEADER).map_err(csv_err)?;
    for (cell, results) in run.aggregate.cells.iter().zip(&run.replications) {
        for (r, result) in results.iter().enumerate() {
            let rep = (cell.cell.index * reps + r).to_string();
            for epoch in &result.epoch_series {
                let t = epoch.t.to_string();
                let psi = format_number(epoch.stats.psi);
                for kind in AgentKind::ALL {
                    w.write_record([
                        rep.as_str(),
                        t.as_str(),
                        kind.name(),
                        &format_number(epoch.stats.shares[kind.index()]),
                        &format_optional(epoch.stats.mean_error[kind.index()]),
                        psi.as_str(),
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, manifest).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(|e| HarnessError::io(path, e))
}

/// Writes all outputs of `run` into `dir`, creating it if needed.
pub fn write_outputs(run: &ExperimentRun, config: &ExperimentConfig, dir: &Path) -> Result<OutputPaths, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let paths = OutputPaths {
        aggregate: dir.join("aggregate.csv"),
        timeseries: config.emit_timeseries.then(|| dir.join("timeseries.csv")),
        manifest: dir.join("manifest.json"),
    };
    write_aggregate(run, &paths.aggregate)?;
    if let Some(ts) = &paths.timeseries {
        write_timeseries(run, ts)?;
    }
    write_manifest(&Manifest::new(config, run), &paths.manifest)?;
    Ok(paths)
}
