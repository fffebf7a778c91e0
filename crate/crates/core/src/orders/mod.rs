//! Row orders over encoded tuples.

mod gray;
mod hilbert;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gray::{cmp_modular_gray, cmp_reflected_gray};
pub use hilbert::{bit_width, hilbert_key};

use crate::error::{Error, Result};
use crate::table::{permute_columns, EncodedTable, Permutation};
use hilbert::HilbertEncoder;

/// Row order family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderFamily {
    Lexicographic,
    ReflectedGray,
    ModularGray,
    Hilbert,
}

impl OrderFamily {
    pub const ALL: [OrderFamily; 4] = [
        OrderFamily::Lexicographic,
        OrderFamily::ReflectedGray,
        OrderFamily::ModularGray,
        OrderFamily::Hilbert,
    ];

    /// Lexicographic and both Gray orders are recursive; Hilbert is not.
    pub fn is_recursive(self) -> bool {
        !matches!(self, OrderFamily::Hilbert)
    }

    pub fn name(self) -> &'static str {
        match self {
            OrderFamily::Lexicographic => "lexicographic",
            OrderFamily::ReflectedGray => "reflected-gray",
            OrderFamily::ModularGray => "modular-gray",
            OrderFamily::Hilbert => "hilbert",
        }
    }
}

impl fmt::Display for OrderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "lexicographic" | "lex" | "lexico" => Ok(OrderFamily::Lexicographic),
            "reflected-gray" | "reflected" | "gray" => Ok(OrderFamily::ReflectedGray),
            "modular-gray" | "modular" => Ok(OrderFamily::ModularGray),
            "hilbert" => Ok(OrderFamily::Hilbert),
            _ => Err(Error::InvalidParameter(format!("unknown order family '{s}'"))),
        }
    }
}

/// A family plus the column permutation applied before sorting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSpec {
    pub family: OrderFamily,
    pub column_permutation: Permutation,
}

impl OrderSpec {
    pub fn new(family: OrderFamily, column_permutation: Permutation) -> Self {
        OrderSpec { family, column_permutation }
    }

    pub fn identity(family: OrderFamily, width: usize) -> Self {
        OrderSpec::new(family, Permutation::identity(width))
    }
}

/// Column ordering policy, resolved against a table's cardinalities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ColumnOrder {
    #[default]
    AsGiven,
    IncreasingCardinality,
    DecreasingCardinality,
    Explicit(Permutation),
}

impl ColumnOrder {
    /// Ties between equal cardinalities keep the original column order.
    pub fn resolve(&self, cards: &[u32]) -> Result<Permutation> {
        match self {
            ColumnOrder::AsGiven => Ok(Permutation::identity(cards.len())),
            ColumnOrder::IncreasingCardinality => Ok(Permutation::sorting_by_key(cards)),
            ColumnOrder::DecreasingCardinality => {
                let keys: Vec<std::cmp::Reverse<u32>> =
                    cards.iter().map(|&n| std::cmp::Reverse(n)).collect();
                Ok(Permutation::sorting_by_key(&keys))
            }
            ColumnOrder::Explicit(p) => {
                if p.len() != cards.len() {
                    return Err(Error::LengthMismatch { expected: cards.len(), found: p.len() });
                }
                Ok(p.clone())
            }
        }
    }
}

/// Rank of a tuple within its family's order over the full tuple space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortKey(pub BigUint);

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

pub(crate) fn check_tuple(u: &[u32], cards: &[u32]) -> Result<()> {
    if u.len() != cards.len() {
        return Err(Error::LengthMismatch { expected: cards.len(), found: u.len() });
    }
    for (column, (&code, &cardinality)) in u.iter().zip(cards).enumerate() {
        if code >= cardinality {
            return Err(Error::CodeOutOfRange { column, code, cardinality });
        }
    }
    Ok(())
}

pub fn cmp_lexicographic(u: &[u32], v: &[u32]) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { expected: u.len(), found: v.len() });
    }
    Ok(u.cmp(v))
}

/// Compare two tuples under `family`.
pub fn compare(family: OrderFamily, u: &[u32], v: &[u32], cards: &[u32]) -> Result<Ordering> {
    match family {
        OrderFamily::Lexicographic => {
            check_tuple(u, cards)?;
            check_tuple(v, cards)?;
            cmp_lexicographic(u, v)
        }
        OrderFamily::ReflectedGray => cmp_reflected_gray(u, v, cards),
        OrderFamily::ModularGray => cmp_modular_gray(u, v, cards),
        OrderFamily::Hilbert => Ok(hilbert_key(u, cards)?.cmp(&hilbert_key(v, cards)?)),
    }
}

/// Rank of `u` for any family. Recursive families rank by the mixed-radix
/// value of their digit positions.
pub fn sort_key(family: OrderFamily, u: &[u32], cards: &[u32]) -> Result<SortKey> {
    check_tuple(u, cards)?;
    if family == OrderFamily::Hilbert {
        return hilbert_key(u, cards);
    }
    let mut pos = Vec::with_capacity(u.len());
    positions(family, u, cards, &mut pos);
    let mut rank = BigUint::default();
    for (&t, &n) in pos.iter().zip(cards) {
        rank = rank * n + t;
    }
    Ok(SortKey(rank))
}

fn positions(family: OrderFamily, u: &[u32], cards: &[u32], out: &mut Vec<u32>) {
    out.clear();
    match family {
        OrderFamily::Lexicographic => out.extend_from_slice(u),
        OrderFamily::ReflectedGray => gray::reflected_positions(u, cards, out),
        OrderFamily::ModularGray => gray::modular_positions(u, cards, out),
        OrderFamily::Hilbert => unreachable!("Hilbert has no digit positions"),
    }
}

/// Row permutation that sorts `t` by `family` over its current columns.
/// Ties keep input order, so the result is deterministic.
pub fn sorted_row_order(t: &EncodedTable, family: OrderFamily) -> Result<Vec<usize>> {
    let cards = t.cardinalities();
    let n = t.len();
    let mut order: Vec<usize> = (0..n).collect();
    match family {
        OrderFamily::Lexicographic => {
            order.par_sort_by(|&a, &b| t.row(a).cmp(t.row(b)));
        }
        OrderFamily::ReflectedGray | OrderFamily::ModularGray => {
            let width = t.width();
            let keys: Vec<u32> = (0..n)
                .into_par_iter()
                .map_init(Vec::new, |buf, i| {
                    positions(family, t.row(i), cards, buf);
                    buf.clone()
                })
                .collect::<Vec<_>>()
                .concat();
            order.par_sort_by(|&a, &b| {
                keys[a * width..(a + 1) * width].cmp(&keys[b * width..(b + 1) * width])
            });
        }
        OrderFamily::Hilbert => {
            let encoder = HilbertEncoder::for_cards(cards)?;
            let keys: Vec<BigUint> = (0..n).into_par_iter().map(|i| encoder.index(t.row(i))).collect();
            order.par_sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        }
    }
    Ok(order)
}

/// Apply the column permutation, then sort rows. The output keeps the
/// permuted column order; `column_origin` records where each column came from.
pub fn sort_table(t: &EncodedTable, spec: &OrderSpec) -> Result<EncodedTable> {
    if spec.column_permutation.len() != t.width() {
        return Err(Error::LengthMismatch {
            expected: t.width(),
            found: spec.column_permutation.len(),
        });
    }
    let permuted = permute_columns(t, &spec.column_permutation)?;
    let order = sorted_row_order(&permuted, spec.family)?;
    Ok(permuted.reorder_rows(&order))
}
