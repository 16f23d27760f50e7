//! Experiment harness for `narrevo-core`: config files, seed derivation,
//! parallel replication runs, aggregation and CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod seed;

pub use config::{parse_config, Cell, ExperimentConfig, Overrides};
pub use error::{ConfigError, HarnessError};
pub use experiment::{aggregate_cell, run_experiment, AggregateResult, CellAggregate, ExperimentRun, KindSummary};
pub use output::{format_number, write_outputs, Manifest, OutputPaths};
pub use seed::derive_seed;
