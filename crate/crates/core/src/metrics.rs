//! Run counts, seamless joins, order predicates and the suboptimality bounds
//! of recursive orders.

use std::collections::HashSet;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::table::{ColumnProfile, EncodedTable};

/// Per-column runs and seamless joins of a table in its current row order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunStats {
    #[serde(rename = "runs")]
    pub runs_per_column: Vec<u64>,
    #[serde(rename = "joins")]
    pub joins_per_column: Vec<u64>,
    pub hamming_sum: u64,
    pub total_runs: u64,
}

/// Runs, joins and the adjacent-row Hamming sum in one pass.
///
/// Joins are counted on any row order, but they only carry their block
/// meaning when the table is sorted by a recursive order.
pub fn run_count(t: &EncodedTable) -> RunStats {
    let c = t.width();
    let start = if t.is_empty() { 0 } else { 1 };
    let mut runs = vec![start; c];
    let mut joins = vec![0u64; c];
    let mut hamming_sum = 0u64;
    let mut rows = t.rows();
    if let Some(mut prev) = rows.next() {
        for row in rows {
            let mut prefix_changed = false;
            for j in 0..c {
                if row[j] != prev[j] {
                    runs[j] += 1;
                    hamming_sum += 1;
                    prefix_changed = true;
                } else if prefix_changed {
                    joins[j] += 1;
                }
            }
            prev = row;
        }
    }
    RunStats {
        total_runs: runs.iter().sum(),
        runs_per_column: runs,
        joins_per_column: joins,
        hamming_sum,
    }
}

pub fn seamless_joins(t: &EncodedTable) -> Vec<u64> {
    run_count(t).joins_per_column
}

/// True when equal items are always listed consecutively.
pub fn is_discriminating<T, I>(values: I) -> bool
where
    T: Hash + Eq,
    I: IntoIterator<Item = T>,
{
    let mut seen = HashSet::new();
    let mut prev: Option<T> = None;
    for v in values {
        if prev.as_ref() == Some(&v) {
            continue;
        }
        if seen.contains(&v) {
            return false;
        }
        if let Some(p) = prev.replace(v) {
            seen.insert(p);
        }
    }
    true
}

/// True when every prefix projection of the row sequence is discriminating.
pub fn is_recursive_ordering(t: &EncodedTable) -> bool {
    (1..=t.width()).all(|k| is_discriminating(t.rows().map(|r| &r[..k])))
}

/// Bounds on how far a recursive order can be from the optimal row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub mu: BigRational,
    pub mu_gc: BigRational,
    pub lower_bound_runs: BigUint,
    pub upper_bound_runs: BigUint,
}

impl BoundReport {
    pub fn mu_f64(&self) -> f64 {
        self.mu.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mu_gc_f64(&self) -> f64 {
        self.mu_gc.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundReport", 6)?;
        st.serialize_field("mu", &round_decimal(&self.mu, 4))?;
        st.serialize_field("mu_gc", &round_decimal(&self.mu_gc, 4))?;
        st.serialize_field("mu_exact", &self.mu.to_string())?;
        st.serialize_field("mu_gc_exact", &self.mu_gc.to_string())?;
        st.serialize_field("lower_bound", &self.lower_bound_runs.to_string())?;
        st.serialize_field("upper_bound", &self.upper_bound_runs.to_string())?;
        st.end()
    }
}

/// `r` rounded half away from zero to `places` decimals.
pub fn round_decimal(r: &BigRational, places: u32) -> f64 {
    format_decimal(r, places).parse().unwrap_or(f64::NAN)
}

/// Decimal string of `r` rounded half away from zero to `places` decimals.
pub fn format_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = (r.abs() * BigRational::from_integer(scale.clone())).round().to_integer();
    let (int, frac) = (&scaled / &scale, &scaled % &scale);
    let sign = if r.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac:0>width$}", width = places as usize)
    }
}

/// Ratios between the run count any recursive order can reach and the
/// unconditional lower bound `n + c - 1`, with `n` the distinct-row count.
pub fn mu_bounds(profile: &ColumnProfile) -> Result<BoundReport> {
    let n = BigUint::from(profile.distinct_rows);
    if n.is_zero() {
        return Err(Error::InvalidParameter("bounds need at least one row".into()));
    }
    let c = profile.width();
    let lower = &n + BigUint::from(c) - 1u32;
    let mut upper = BigUint::zero();
    let mut upper_gc = BigUint::zero();
    let mut before = BigUint::one();
    for (j, card) in profile.cardinalities.iter().enumerate() {
        let prefix = &profile.prefix_products[j];
        upper += prefix.min(&n).clone();
        let gray = BigUint::one() + BigUint::from(card.saturating_sub(1)) * &before;
        upper_gc += gray.min(n.clone());
        before = prefix.clone();
    }
    let denom = BigInt::from(lower.clone());
    Ok(BoundReport {
        mu: BigRational::new(BigInt::from(upper.clone()), denom.clone()),
        mu_gc: BigRational::new(BigInt::from(upper_gc), denom),
        lower_bound_runs: lower,
        upper_bound_runs: upper,
    })
}

/// `n` rows whose first column is `0..n` and whose other columns alternate
/// 0/1 with the row parity. As listed it has `n * c` runs.
pub fn adversarial_table(n: usize, c: usize) -> Result<EncodedTable> {
    if n < 2 || c < 2 {
        return Err(Error::InvalidParameter(format!(
            "adversarial table needs n >= 2 and c >= 2, got n={n}, c={c}"
        )));
    }
    let n32 = u32::try_from(n)
        .map_err(|_| Error::InvalidParameter(format!("too many rows: {n}")))?;
    let mut codes = Vec::with_capacity(n * c);
    for i in 0..n32 {
        codes.push(i);
        codes.extend(std::iter::repeat_n(i % 2, c - 1));
    }
    let mut cards = vec![2u32; c];
    cards[0] = n32;
    EncodedTable::from_codes(codes, &cards)
}
