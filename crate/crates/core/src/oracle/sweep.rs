use std::collections::{HashMap, HashSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::mu_bounds;
use crate::table::{ColumnProfile, EncodedTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub mean_mu: f64,
    pub trials: usize,
}

/// Mean of the recursive-order bound over random `k`-column projections, for
/// every `k` from 1 to the table width.
///
/// Projections keep the original column order and their distinct rows are
/// counted exactly. Each distinct column subset is counted once.
pub fn mu_sweep(t: &EncodedTable, samples_per_k: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let c = t.width();
    if c == 0 || c > 64 {
        return Err(Error::InvalidParameter(format!("mu sweep needs 1..=64 columns, got {c}")));
    }
    if samples_per_k == 0 {
        return Err(Error::InvalidParameter("mu sweep needs at least one sample per k".into()));
    }
    if t.is_empty() {
        return Err(Error::InvalidParameter("mu sweep needs at least one row".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<u64>> = (1..=c)
        .map(|k| {
            let trials = if k == c { 1 } else { samples_per_k };
            (0..trials)
                .map(|_| sample(&mut rng, c, k).iter().fold(0u64, |m, j| m | 1 << j))
                .collect()
        })
        .collect();
    let mut masks: Vec<u64> = draws.iter().flatten().copied().collect();
    masks.sort_unstable();
    masks.dedup();
    let counts: HashMap<u64, usize> = masks
        .par_iter()
        .map(|&m| (m, distinct_projection(t, m)))
        .collect();

    let cards = t.cardinalities();
    draws
        .iter()
        .enumerate()
        .map(|(i, ms)| {
            let mut sum = 0.0;
            for m in ms {
                let cols: Vec<u64> = (0..c).filter(|j| m >> j & 1 == 1).map(|j| u64::from(cards[j])).collect();
                let profile = ColumnProfile::from_parts(t.len() as u64, cols, counts[m] as u64);
                sum += mu_bounds(&profile)?.mu_f64();
            }
            Ok(SweepRow { k: i + 1, mean_mu: sum / ms.len() as f64, trials: ms.len() })
        })
        .collect()
}

fn distinct_projection(t: &EncodedTable, mask: u64) -> usize {
    let cols: Vec<usize> = (0..t.width()).filter(|j| mask >> j & 1 == 1).collect();
    let cards = t.cardinalities();
    let fits = cols
        .iter()
        .try_fold(1u64, |acc, &j| acc.checked_mul(u64::from(cards[j])))
        .is_some();
    if fits {
        let keys: HashSet<u64> = t
            .rows()
            .map(|r| cols.iter().fold(0u64, |acc, &j| acc * u64::from(cards[j]) + u64::from(r[j])))
            .collect();
        keys.len()
    } else {
        let keys: HashSet<Vec<u32>> = t.rows().map(|r| cols.iter().map(|&j| r[j]).collect()).collect();
        keys.len()
    }
}
