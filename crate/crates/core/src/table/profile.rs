use std::collections::HashSet;

use num_bigint::BigUint;
use serde::Serialize;

use super::EncodedTable;

/// Column cardinalities, their running products, and the exact distinct-row count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnProfile {
    pub rows: u64,
    pub cardinalities: Vec<u64>,
    /// `prefix_products[j]` is the product of the first `j + 1` cardinalities.
    #[serde(serialize_with = "serialize_big")]
    pub prefix_products: Vec<BigUint>,
    pub distinct_rows: u64,
}

fn serialize_big<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

impl ColumnProfile {
    /// Profile of a table whose rows are not materialized.
    pub fn from_parts(rows: u64, cardinalities: Vec<u64>, distinct_rows: u64) -> Self {
        let mut acc = BigUint::from(1u32);
        let prefix_products = cardinalities
            .iter()
            .map(|&n| {
                acc *= n;
                acc.clone()
            })
            .collect();
        ColumnProfile {
            rows,
            cardinalities,
            prefix_products,
            distinct_rows,
        }
    }

    pub fn width(&self) -> usize {
        self.cardinalities.len()
    }
}

pub fn profile(t: &EncodedTable) -> ColumnProfile {
    ColumnProfile::from_parts(
        t.len() as u64,
        t.cardinalities().iter().map(|&n| u64::from(n)).collect(),
        count_distinct(t) as u64,
    )
}

/// Exact number of distinct rows.
pub fn count_distinct(t: &EncodedTable) -> usize {
    t.rows().collect::<HashSet<&[u32]>>().len()
}
