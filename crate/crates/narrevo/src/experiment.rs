//! Running a config's replications and aggregating them per cell.

use narrevo_core::{run_replication, AgentKind, ReplicationResult};
use rayon::prelude::*;

use crate::config::{Cell, ExperimentConfig};
use crate::error::HarnessError;
use crate::seed::derive_seed;

/// Cross-replication statistics for one kind in one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindSummary {
    pub mean_share: f64,
    pub sd_share: f64,
    /// `None` when the kind was extinct over the trailing window of every
    /// replication.
    pub mean_mse: Option<f64>,
    pub sd_mse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellAggregate {
    pub cell: Cell,
    /// Seed of replication 0; replication `r` uses `derive_seed(master, cell, r)`.
    pub seed_base: u64,
    pub kinds: [KindSummary; AgentKind::COUNT],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub reps: usize,
    pub master_seed: u64,
    pub cells: Vec<CellAggregate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub aggregate: AggregateResult,
    /// Per cell, replications in index order.
    pub replications: Vec<Vec<ReplicationResult>>,
}

/// Sum of `values` independent of their order.
fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Mean and sample standard deviation; the deviation of a single value is 0.
fn mean_sd(mut values: Vec<f64>) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = stable_sum(&mut values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, (stable_sum(&mut sq) / (n - 1.0)).sqrt())
}

/// Aggregates one cell. The result does not depend on the order of
/// `results`.
pub fn aggregate_cell(cell: Cell, seed_base: u64, results: &[ReplicationResult]) -> CellAggregate {
    assert!(!results.is_empty(), "a cell needs at least one replication");
    let kinds = core::array::from_fn(|k| {
        let (mean_share, sd_share) = mean_sd(results.iter().map(|r| r.final_shares[k]).collect());
        let mse: Vec<f64> = results.iter().filter_map(|r| r.final_mse[k]).collect();
        let (mean_mse, sd_mse) = if mse.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_sd(mse);
            (Some(m), Some(s))
        };
        KindSummary {
            mean_share,
            sd_share,
            mean_mse,
            sd_mse,
        }
    });
    CellAggregate {
        cell,
        seed_base,
        kinds,
    }
}

/// Runs every replication of every cell on `workers` threads (the rayon
/// default when `None`). Output is identical for any worker count.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentRun, HarnessError> {
    let cells = config.cells()?;
    let reps = config.reps;
    let master = config.master_seed;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let run = |&(c, r): &(usize, usize)| {
        let cell = &cells[c];
        let seed = derive_seed(master, cell.index as u64, r as u64);
        run_replication(&cell.params, seed).map_err(|source| HarnessError::Simulation {
            cell: cell.describe(),
            rep: r,
            source,
        })
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build()?;
    let flat: Vec<ReplicationResult> = pool.install(|| jobs.par_iter().map(run).collect::<Result<_, _>>())?;

    let mut replications = Vec::with_capacity(cells.len());
    let mut flat = flat.into_iter();
    for _ in 0..cells.len() {
        replications.push(flat.by_ref().take(reps).collect::<Vec<_>>());
    }
    let aggregates = cells
        .iter()
        .zip(&replications)
        .map(|(cell, results)| aggregate_cell(*cell, derive_seed(master, cell.index as u64, 0), results))
        .collect();

    Ok(ExperimentRun {
        aggregate: AggregateResult {
            reps,
            master_seed: master,
            cells: aggregates,
        },
        replications,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_sd() {
        let (m, s) = mean_sd(vec![2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_sd(vec![0.3]), (0.3, 0.0));
    }

    #[test]
    fn stable_sum_ignores_order() {
        let a = stable_sum(&mut [1e16, 1.0, -1e16, 3.0]);
        let b = stable_sum(&mut [3.0, -1e16, 1.0, 1e16]);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
