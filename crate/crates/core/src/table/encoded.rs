use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Permutation, RawTable};
use crate::error::{Error, Result};

/// How the distinct values of each column are mapped to codes `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ValueOrder {
    /// Byte-wise string order, so numeric-looking text still sorts as text.
    #[default]
    Alphabetical,
    /// Most frequent value first; equal frequencies fall back to alphabetical.
    FrequencyDesc,
    /// One list per column. Listed values absent from the data are dropped.
    Explicit(Vec<Vec<String>>),
}

/// Row-major matrix of dense value codes with one dictionary per column.
///
/// Column `j` holds codes in `0..cardinalities()[j]`, and code `k` stands for
/// `dictionaries()[j][k]`. Tables are immutable once built; reordering
/// operations return new tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedTable {
    codes: Vec<u32>,
    width: usize,
    cards: Vec<u32>,
    dictionaries: Vec<Vec<String>>,
    names: Option<Vec<String>>,
    origin: Vec<usize>,
}

impl EncodedTable {
    /// Builds a table from flat row-major codes and explicit dictionaries.
    pub fn new(codes: Vec<u32>, dictionaries: Vec<Vec<String>>, names: Option<Vec<String>>) -> Result<Self> {
        let width = dictionaries.len();
        if width == 0 {
            return Err(Error::InvalidParameter("a table needs at least one column".into()));
        }
        if !codes.len().is_multiple_of(width) {
            return Err(Error::LengthMismatch {
                expected: codes.len() / width * width + width,
                found: codes.len(),
            });
        }
        if let Some(n) = &names {
            if n.len() != width {
                return Err(Error::LengthMismatch {
                    expected: width,
                    found: n.len(),
                });
            }
        }
        for (j, dict) in dictionaries.iter().enumerate() {
            let distinct: BTreeSet<&String> = dict.iter().collect();
            if distinct.len() != dict.len() {
                return Err(Error::InvalidParameter(format!("column {j}: dictionary has duplicate values")));
            }
            if dict.len() > u32::MAX as usize {
                return Err(Error::InvalidParameter(format!("column {j}: too many distinct values")));
            }
        }
        let cards: Vec<u32> = dictionaries.iter().map(|d| d.len() as u32).collect();
        check_codes(&codes, &cards)?;
        Ok(EncodedTable {
            codes,
            width,
            origin: (0..width).collect(),
            cards,
            dictionaries,
            names,
        })
    }

    /// Builds a synthetic table over domains `0..cards[j]`. Dictionary entries
    /// are zero-padded decimals so that alphabetical and numeric order agree.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R], cards: &[u32]) -> Result<Self> {
        let mut codes = Vec::with_capacity(rows.len() * cards.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != cards.len() {
                return Err(Error::LengthMismatch {
                    expected: cards.len(),
                    found: row.len(),
                });
            }
            codes.extend_from_slice(row);
        }
        Self::from_codes(codes, cards)
    }

    /// Like [`EncodedTable::from_rows`] but takes flat row-major codes.
    pub fn from_codes(codes: Vec<u32>, cards: &[u32]) -> Result<Self> {
        let dictionaries = cards.iter().map(|&n| numeric_dictionary(n)).collect();
        Self::new(codes, dictionaries, None)
    }

    pub fn len(&self) -> usize {
        self.codes.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cards
    }

    pub fn dictionaries(&self) -> &[Vec<String>] {
        &self.dictionaries
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Index of each column in the table this one was derived from.
    pub fn column_origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.codes[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, u32> {
        self.codes.chunks_exact(self.width)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = u32> + '_ {
        self.codes.iter().skip(j).step_by(self.width).copied()
    }

    /// Decodes row `i` back to its original text values.
    pub fn decode_row(&self, i: usize) -> Vec<&str> {
        self.row(i)
            .iter()
            .zip(&self.dictionaries)
            .map(|(&c, d)| d[c as usize].as_str())
            .collect()
    }

    /// Same columns and dictionaries with rows taken in the order of `order`.
    pub fn reorder_rows(&self, order: &[usize]) -> Self {
        let mut codes = Vec::with_capacity(order.len() * self.width);
        for &i in order {
            codes.extend_from_slice(self.row(i));
        }
        EncodedTable {
            codes,
            ..self.metadata_clone()
        }
    }

    fn metadata_clone(&self) -> Self {
        EncodedTable {
            codes: Vec::new(),
            width: self.width,
            cards: self.cards.clone(),
            dictionaries: self.dictionaries.clone(),
            names: self.names.clone(),
            origin: self.origin.clone(),
        }
    }
}

fn numeric_dictionary(n: u32) -> Vec<String> {
    let digits = n.saturating_sub(1).max(1).to_string().len();
    (0..n).map(|v| format!("{v:0digits$}")).collect()
}

fn check_codes(codes: &[u32], cards: &[u32]) -> Result<()> {
    for row in codes.chunks_exact(cards.len()) {
        for (j, (&code, &cardinality)) in row.iter().zip(cards).enumerate() {
            if code >= cardinality {
                return Err(Error::CodeOutOfRange {
                    column: j,
                    code,
                    cardinality,
                });
            }
        }
    }
    Ok(())
}

/// Dictionary-encodes every column of `raw` under the chosen value order.
pub fn encode(raw: &RawTable, value_order: &ValueOrder) -> Result<EncodedTable> {
    let width = raw.width();
    if let ValueOrder::Explicit(lists) = value_order {
        if lists.len() != width {
            return Err(Error::LengthMismatch {
                expected: width,
                found: lists.len(),
            });
        }
    }

    let mut dictionaries = Vec::with_capacity(width);
    let mut lookups: Vec<HashMap<&str, u32>> = Vec::with_capacity(width);
    for j in 0..width {
        let mut freq: HashMap<&str, usize> = HashMap::new();
        for row in raw.rows() {
            *freq.entry(row[j].as_str()).or_default() += 1;
        }
        let mut values: Vec<&str> = freq.keys().copied().collect();
        match value_order {
            ValueOrder::Alphabetical => values.sort_unstable(),
            ValueOrder::FrequencyDesc => values.sort_unstable_by(|a, b| freq[b].cmp(&freq[a]).then(a.cmp(b))),
            ValueOrder::Explicit(lists) => {
                let mut rank: HashMap<&str, usize> = HashMap::with_capacity(lists[j].len());
                for (r, v) in lists[j].iter().enumerate() {
                    if rank.insert(v.as_str(), r).is_some() {
                        return Err(Error::InvalidParameter(format!(
                            "column {j}: value {v:?} listed twice in the explicit value order"
                        )));
                    }
                }
                // report the first missing value in row order
                for row in raw.rows() {
                    if !rank.contains_key(row[j].as_str()) {
                        return Err(Error::MissingValue {
                            column: j,
                            value: row[j].clone(),
                        });
                    }
                }
                values.sort_unstable_by_key(|v| rank[v]);
            }
        }
        lookups.push(values.iter().enumerate().map(|(k, &v)| (v, k as u32)).collect());
        dictionaries.push(values.into_iter().map(str::to_owned).collect::<Vec<_>>());
    }

    let mut codes = Vec::with_capacity(raw.len() * width);
    for row in raw.rows() {
        for (j, value) in row.iter().enumerate() {
            codes.push(lookups[j][value.as_str()]);
        }
    }
    EncodedTable::new(codes, dictionaries, raw.header().map(<[String]>::to_vec))
}

/// Reorders columns: column `j` of the result is column `p[j]` of `t`.
pub fn permute_columns(t: &EncodedTable, p: &Permutation) -> Result<EncodedTable> {
    if p.len() != t.width() {
        return Err(Error::LengthMismatch {
            expected: t.width(),
            found: p.len(),
        });
    }
    let mut codes = Vec::with_capacity(t.codes.len());
    for row in t.rows() {
        codes.extend(p.as_slice().iter().map(|&m| row[m]));
    }
    Ok(EncodedTable {
        codes,
        width: t.width,
        cards: p.apply(&t.cards)?,
        dictionaries: p.apply(&t.dictionaries)?,
        names: t.names.as_ref().map(|n| p.apply(n)).transpose()?,
        origin: p.apply(&t.origin)?,
    })
}

/// Uniformly random row order, fully determined by `seed`.
pub fn shuffle_rows(t: &EncodedTable, seed: u64) -> EncodedTable {
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    t.reorder_rows(&order)
}
