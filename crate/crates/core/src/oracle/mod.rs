//! Exact answers at desk scale: optimal row orders, exhaustive column-order
//! search and synthetic uniform tables.

mod generate;
mod sweep;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub use generate::{generate_uniform, generate_uniform_sparse, generate_uniform_with, ENUMERATION_BUDGET};
pub use sweep::{mu_sweep, SweepRow};

use crate::error::{Error, Result};
use crate::metrics::run_count;
use crate::orders::{sort_table, OrderFamily, OrderSpec};
use crate::table::{EncodedTable, Permutation};

/// Default cap on distinct rows for [`brute_force_min_runs`].
pub const DEFAULT_ROW_LIMIT: usize = 15;
/// Default cap on columns for [`best_column_order`].
pub const DEFAULT_COLUMN_LIMIT: usize = 8;

/// Minimum run count over all row orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub optimal_runs: u64,
    /// Row indices of the input in an optimal order.
    pub witness_order: Vec<usize>,
    /// Dynamic-programming states visited.
    pub explored: u64,
}

/// Exact minimum run count by Held-Karp over the distinct rows.
///
/// Every adjacent pair of rows adds its Hamming distance to the `c` runs that
/// the first row opens, so the optimum is `c` plus the cheapest Hamiltonian
/// path. Equal rows are placed together at no cost.
pub fn brute_force_min_runs(t: &EncodedTable, limit: usize) -> Result<OracleResult> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<&[u32], usize> = HashMap::new();
    for (i, row) in t.rows().enumerate() {
        let g = *index.entry(row).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    let d = groups.len();
    if d > limit || d > 25 {
        return Err(Error::budget("distinct rows for the exact oracle", d, limit.min(25)));
    }
    if d == 0 {
        return Ok(OracleResult { optimal_runs: 0, witness_order: vec![], explored: 0 });
    }
    let reps: Vec<&[u32]> = groups.iter().map(|g| t.row(g[0])).collect();
    let dist: Vec<u32> = reps
        .iter()
        .flat_map(|a| reps.iter().map(move |b| a.iter().zip(*b).filter(|(x, y)| x != y).count() as u32))
        .collect();

    let full = (1usize << d) - 1;
    let mut cost = vec![u32::MAX; (full + 1) * d];
    let mut parent = vec![u8::MAX; (full + 1) * d];
    for v in 0..d {
        cost[(1 << v) * d + v] = 0;
    }
    let mut explored = 0u64;
    for mask in 1..=full {
        for last in 0..d {
            let here = cost[mask * d + last];
            if here == u32::MAX {
                continue;
            }
            explored += 1;
            for next in 0..d {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let m2 = mask | 1 << next;
                let c2 = here + dist[last * d + next];
                if c2 < cost[m2 * d + next] {
                    cost[m2 * d + next] = c2;
                    parent[m2 * d + next] = last as u8;
                }
            }
        }
    }
    let (mut last, best) = (0..d)
        .map(|v| (v, cost[full * d + v]))
        .min_by_key(|&(v, c)| (c, v))
        .expect("at least one row");
    let mut path = Vec::with_capacity(d);
    let mut mask = full;
    loop {
        path.push(last);
        let p = parent[mask * d + last];
        mask &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    path.reverse();
    let witness_order = path.iter().flat_map(|&g| groups[g].iter().copied()).collect();
    Ok(OracleResult {
        optimal_runs: t.width() as u64 + u64::from(best),
        witness_order,
        explored,
    })
}

/// Run counts of one family under every column permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSearch {
    pub family: OrderFamily,
    pub best_perm: Permutation,
    pub best_runs: u64,
    pub per_perm: Vec<(Permutation, u64)>,
}

impl Serialize for ColumnSearch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct PerPerm<'a>(&'a [(Permutation, u64)]);
        impl Serialize for PerPerm<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (p, r) in self.0 {
                    m.serialize_entry(&p.to_string(), r)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("family", &self.family)?;
        m.serialize_entry("best_perm", &self.best_perm)?;
        m.serialize_entry("best_runs", &self.best_runs)?;
        m.serialize_entry("per_perm", &PerPerm(&self.per_perm))?;
        m.end()
    }
}

/// All permutations of `base` in lexicographic order of positions.
fn permutations_of(base: &[usize]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..base.len()).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| base[i]).collect());
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return out;
        };
        let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).expect("successor exists");
        idx.swap(i - 1, j);
        idx[i..].reverse();
    }
}

/// Sort `t` under every column permutation and keep the fewest runs.
///
/// Permutations are tried starting from increasing cardinality (ties by
/// column index) and the first strict minimum wins, so among equally good
/// orders the one closest to increasing cardinality is reported.
pub fn best_column_order(t: &EncodedTable, family: OrderFamily, max_columns: usize) -> Result<ColumnSearch> {
    let c = t.width();
    if c > max_columns {
        return Err(Error::budget("columns for exhaustive column search", c, max_columns));
    }
    let base = Permutation::sorting_by_key(t.cardinalities());
    let perms = permutations_of(base.as_slice());
    let per_perm = perms
        .into_par_iter()
        .map(|p| {
            let p = Permutation::new(p)?;
            let sorted = sort_table(t, &OrderSpec::new(family, p.clone()))?;
            Ok((p, run_count(&sorted).total_runs))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_perm, best_runs) = per_perm
        .iter()
        .fold(None::<&(Permutation, u64)>, |best, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .cloned()
        .expect("at least one permutation");
    Ok(ColumnSearch { family, best_perm, best_runs, per_perm })
}

/// Outcome of comparing the best recursive order against the optimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursiveGap {
    pub optimal_runs: u64,
    pub best_recursive_runs: u64,
    pub best_family: OrderFamily,
    pub best_perm: Permutation,
}

impl RecursiveGap {
    pub fn is_suboptimal(&self) -> bool {
        self.best_recursive_runs > self.optimal_runs
    }
}

/// Best run count reachable by any recursive family under any column
/// permutation, next to the exact optimum.
pub fn recursive_gap(t: &EncodedTable, row_limit: usize, max_columns: usize) -> Result<RecursiveGap> {
    let optimal = brute_force_min_runs(t, row_limit)?;
    let mut best: Option<(u64, OrderFamily, Permutation)> = None;
    for family in OrderFamily::ALL.into_iter().filter(|f| f.is_recursive()) {
        let search = best_column_order(t, family, max_columns)?;
        if best.as_ref().is_none_or(|b| search.best_runs < b.0) {
            best = Some((search.best_runs, family, search.best_perm));
        }
    }
    let (runs, family, perm) = best.expect("three recursive families");
    Ok(RecursiveGap {
        optimal_runs: optimal.optimal_runs,
        best_recursive_runs: runs,
        best_family: family,
        best_perm: perm,
    })
}
