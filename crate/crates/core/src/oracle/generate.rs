use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::UniformModel;
use crate::table::EncodedTable;

/// Largest tuple space [`generate_uniform`] enumerates.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// Largest expected row count the sparse sampler accepts.
const SPARSE_ROW_BUDGET: f64 = 1e8;

/// Uniform table: each tuple of the cross product is kept with probability
/// `p`, then rows are shuffled. Deterministic for a given seed.
pub fn generate_uniform(model: &UniformModel, seed: u64) -> Result<EncodedTable> {
    generate_uniform_with(model, seed, ENUMERATION_BUDGET)
}

pub fn generate_uniform_with(model: &UniformModel, seed: u64, budget: u64) -> Result<EncodedTable> {
    let space = model.space();
    if space > budget.into() {
        return Err(Error::BudgetExceeded {
            what: "tuple space to enumerate",
            needed: space.to_string(),
            limit: budget.to_string(),
            hint: "; use sparse sampling for small p",
        });
    }
    let cards = &model.cardinalities;
    let c = cards.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codes = Vec::new();
    let mut tuple = vec![0u32; c];
    'outer: loop {
        if rng.gen_bool(model.p) {
            codes.extend_from_slice(&tuple);
        }
        for j in (0..c).rev() {
            tuple[j] += 1;
            if tuple[j] < cards[j] {
                continue 'outer;
            }
            tuple[j] = 0;
        }
        break;
    }
    finish(codes, cards, &mut rng)
}

/// Same distribution as [`generate_uniform`] without enumerating the tuple
/// space: the gaps between kept tuple indices are drawn from a geometric law.
/// Use when `p` times the space size is small.
pub fn generate_uniform_sparse(model: &UniformModel, seed: u64) -> Result<EncodedTable> {
    let cards = &model.cardinalities;
    let space: u128 = cards
        .iter()
        .try_fold(1u128, |acc, &n| acc.checked_mul(u128::from(n)))
        .ok_or_else(|| Error::budget("tuple space for sparse sampling", "more than 2^128", "2^128"))?;
    let expected = model.p * space as f64;
    if expected > SPARSE_ROW_BUDGET {
        return Err(Error::budget("expected rows for sparse sampling", expected, SPARSE_ROW_BUDGET));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codes = Vec::new();
    if model.p > 0.0 {
        let ln_q = (-model.p).ln_1p();
        let mut next: u128 = 0;
        loop {
            let skip = if model.p >= 1.0 {
                0.0
            } else {
                let u: f64 = 1.0 - rng.gen::<f64>();
                (u.ln() / ln_q).floor()
            };
            if skip >= (space - next) as f64 {
                break;
            }
            next += skip as u128;
            if next >= space {
                break;
            }
            let start = codes.len();
            let mut rest = next;
            codes.resize(start + cards.len(), 0);
            for j in (0..cards.len()).rev() {
                let n = u128::from(cards[j]);
                codes[start + j] = (rest % n) as u32;
                rest /= n;
            }
            next += 1;
        }
    }
    finish(codes, cards, &mut rng)
}

fn finish(codes: Vec<u32>, cards: &[u32], rng: &mut ChaCha8Rng) -> Result<EncodedTable> {
    let c = cards.len();
    let n = codes.len() / c;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut shuffled = Vec::with_capacity(codes.len());
    for i in order {
        shuffled.extend_from_slice(&codes[i * c..(i + 1) * c]);
    }
    EncodedTable::from_codes(shuffled, cards)
}
