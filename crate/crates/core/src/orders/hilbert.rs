//! Compact Hilbert indices over mixed per-dimension bit widths.
//!
//! Column `j` gets `ceil(log2 N_j)` bits. The index walks the Hilbert curve of
//! the padded hypercube (every dimension at the widest precision) and ranks a
//! point among the points of the sub-box only, so no index bits are spent on
//! padding. Orientation follows the entry/direction recurrence over reflected
//! binary Gray codes, with column `j` on bit `j` of each level's word.

use num_bigint::BigUint;

use super::{check_tuple, SortKey};
use crate::error::{Error, Result};

/// Bits used for a column of cardinality `n`.
pub fn bit_width(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Compact Hilbert index of `u`. Supports up to 64 columns.
pub fn hilbert_key(u: &[u32], cards: &[u32]) -> Result<SortKey> {
    check_tuple(u, cards)?;
    let widths: Vec<u32> = cards.iter().map(|&n| bit_width(n)).collect();
    let encoder = HilbertEncoder::new(&widths)?;
    Ok(SortKey(encoder.index(u)))
}

/// Precomputed per-level masks for one set of bit widths.
pub(crate) struct HilbertEncoder {
    dims: u32,
    widths: Vec<u32>,
    levels: u32,
}

impl HilbertEncoder {
    pub(crate) fn new(widths: &[u32]) -> Result<Self> {
        if widths.len() > 64 {
            return Err(Error::InvalidParameter(format!(
                "Hilbert order supports at most 64 columns, got {}",
                widths.len()
            )));
        }
        Ok(HilbertEncoder {
            dims: widths.len() as u32,
            widths: widths.to_vec(),
            levels: widths.iter().copied().max().unwrap_or(0),
        })
    }

    pub(crate) fn for_cards(cards: &[u32]) -> Result<Self> {
        Self::new(&cards.iter().map(|&n| bit_width(n)).collect::<Vec<_>>())
    }

    pub(crate) fn index(&self, u: &[u32]) -> BigUint {
        let n = self.dims;
        let mut words: Vec<u64> = Vec::new();
        let mut acc = Bits::default();
        let mut entry = 0u64;
        let mut dir = 0u32;
        for level in (0..self.levels).rev() {
            let mut active = 0u64;
            let mut point = 0u64;
            for (j, (&w, &x)) in self.widths.iter().zip(u).enumerate() {
                if w > level {
                    active |= 1 << j;
                }
                point |= u64::from((x >> level) & 1) << j;
            }
            let free = rotate_right(active, dir + 1, n);
            let t = rotate_right(point ^ entry, dir + 1, n);
            let w = gray_inverse(t);
            for k in (0..n).rev() {
                if free >> k & 1 == 1 {
                    acc.push(w >> k & 1, &mut words);
                }
            }
            entry ^= rotate_left(entry_point(w), dir + 1, n);
            dir = (dir + direction(w, n) + 1) % n;
        }
        acc.finish(&mut words);
        let mut index = BigUint::default();
        for word in words {
            index = (index << 64u32) | BigUint::from(word);
        }
        index
    }
}

/// MSB-first bit accumulator that spills full 64-bit words.
#[derive(Default)]
struct Bits {
    word: u64,
    len: u32,
}

impl Bits {
    fn push(&mut self, bit: u64, out: &mut Vec<u64>) {
        self.word = (self.word << 1) | bit;
        self.len += 1;
        if self.len == 64 {
            out.push(self.word);
            self.word = 0;
            self.len = 0;
        }
    }

    // Right-aligns the trailing partial word so the sequence reads as one integer.
    fn finish(self, out: &mut Vec<u64>) {
        if self.len == 0 {
            return;
        }
        if out.is_empty() {
            out.push(self.word);
            return;
        }
        let shift = self.len;
        let mut carry = self.word;
        for w in out.iter_mut().rev() {
            let next = *w >> (64 - shift);
            *w = (*w << shift) | carry;
            carry = next;
        }
        out.insert(0, carry);
    }
}

fn mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn rotate_right(x: u64, r: u32, n: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    let r = r % n;
    if r == 0 {
        return x & mask(n);
    }
    ((x >> r) | (x << (n - r))) & mask(n)
}

fn rotate_left(x: u64, r: u32, n: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    rotate_right(x, n - r % n, n)
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn gray_inverse(mut g: u64) -> u64 {
    let mut shift = 1;
    while shift < 64 {
        g ^= g >> shift;
        shift <<= 1;
    }
    g
}

/// Corner where the curve enters sub-cube `w`.
fn entry_point(w: u64) -> u64 {
    if w == 0 {
        0
    } else {
        gray(2 * ((w - 1) / 2))
    }
}

/// Axis along which the curve leaves sub-cube `w`.
fn direction(w: u64, n: u32) -> u32 {
    if w == 0 {
        0
    } else if w.is_multiple_of(2) {
        (w - 1).trailing_ones() % n
    } else {
        w.trailing_ones() % n
    }
}
