//! Monte Carlo comparison of row orders on uniform synthetic tables.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::metrics::run_count;
use crate::models::UniformModel;
use crate::oracle::{generate_uniform_sparse, generate_uniform_with, ENUMERATION_BUDGET};
use crate::orders::{sort_table, ColumnOrder, OrderFamily, OrderSpec};
use crate::table::{EncodedTable, Permutation};

/// Row order measured by an experiment: the generator's shuffled order, or a
/// sort by one family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Shuffled,
    Sorted(OrderFamily),
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Shuffled,
        Method::Sorted(OrderFamily::Lexicographic),
        Method::Sorted(OrderFamily::ReflectedGray),
        Method::Sorted(OrderFamily::ModularGray),
        Method::Sorted(OrderFamily::Hilbert),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Shuffled => "shuffled",
            Method::Sorted(f) => f.name(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: UniformModel,
    pub trials: usize,
    pub seed: u64,
    pub column_order: ColumnOrder,
    /// Apply the column policy to Hilbert order too. Off by default since
    /// Hilbert order treats columns symmetrically.
    pub permute_hilbert: bool,
}

impl ExperimentConfig {
    pub fn new(model: UniformModel, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            model,
            trials,
            seed,
            column_order: ColumnOrder::AsGiven,
            permute_hilbert: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: &'static str,
    pub mean: f64,
    pub std: f64,
    pub min: u64,
    pub max: u64,
    pub trials: usize,
}

/// Synthetic table for trial `trial`: seed `seed + trial`, enumerated when the
/// tuple space fits the budget and sampled sparsely otherwise.
pub fn trial_table(model: &UniformModel, seed: u64, trial: usize) -> Result<EncodedTable> {
    let s = seed.wrapping_add(trial as u64);
    match generate_uniform_with(model, s, ENUMERATION_BUDGET) {
        Err(e) if e.is_budget() => generate_uniform_sparse(model, s),
        other => other,
    }
}

/// Total runs for every method on one table, in [`Method::ALL`] order.
pub fn measure(t: &EncodedTable, column_order: &ColumnOrder, permute_hilbert: bool) -> Result<Vec<u64>> {
    let perm = column_order.resolve(t.cardinalities())?;
    Method::ALL
        .iter()
        .map(|&m| match m {
            Method::Shuffled => Ok(run_count(t).total_runs),
            Method::Sorted(f) => {
                let p = if f == OrderFamily::Hilbert && !permute_hilbert {
                    Permutation::identity(t.width())
                } else {
                    perm.clone()
                };
                Ok(run_count(&sort_table(t, &OrderSpec::new(f, p))?).total_runs)
            }
        })
        .collect()
}

/// Mean and sample standard deviation of total runs per method.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<MethodSummary>> {
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|i| measure(&trial_table(&cfg.model, cfg.seed, i)?, &cfg.column_order, cfg.permute_hilbert))
        .collect::<Result<Vec<_>>>()?;
    Ok(Method::ALL
        .iter()
        .enumerate()
        .map(|(k, m)| summarize(m.name(), per_trial.iter().map(|r| r[k])))
        .collect())
}

fn summarize(method: &'static str, values: impl Iterator<Item = u64> + Clone) -> MethodSummary {
    let n = values.clone().count();
    let mean = values.clone().map(|v| v as f64).sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 {
        values.clone().map(|v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MethodSummary {
        method,
        mean,
        std: var.sqrt(),
        min: values.clone().min().unwrap_or(0),
        max: values.max().unwrap_or(0),
        trials: n,
    }
}
