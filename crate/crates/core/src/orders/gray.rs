//! Reflected and modular mixed-radix Gray-code orders.
//!
//! Both orders are lexicographic order on a per-digit *position*: where each
//! digit sits in the cycle its column runs through inside the current block.
//! Converting a tuple to its position tuple is a bijection on the tuple space,
//! which is what makes the orders total and lets a rank be read off as a
//! mixed-radix number.

use std::cmp::Ordering;

use super::check_tuple;
use crate::error::Result;

/// Reflected Gray order: each column alternately counts up and down. The
/// direction flips once for every odd value in the shared prefix.
pub fn cmp_reflected_gray(u: &[u32], v: &[u32], cards: &[u32]) -> Result<Ordering> {
    check_tuple(u, cards)?;
    check_tuple(v, cards)?;
    Ok(reflected_unchecked(u, v))
}

pub(crate) fn reflected_unchecked(u: &[u32], v: &[u32]) -> Ordering {
    let mut ascending = true;
    for (&a, &b) in u.iter().zip(v) {
        if a != b {
            let o = a.cmp(&b);
            return if ascending { o } else { o.reverse() };
        }
        if a & 1 == 1 {
            ascending = !ascending;
        }
    }
    Ordering::Equal
}

/// Modular Gray order: each column counts upward modulo its cardinality,
/// starting from wherever the previous block left it. With cardinalities
/// (10, 10, 10) the order runs 000, 001, ..., 009, 019, 010, ...
pub fn cmp_modular_gray(u: &[u32], v: &[u32], cards: &[u32]) -> Result<Ordering> {
    check_tuple(u, cards)?;
    check_tuple(v, cards)?;
    let mut pu = Vec::with_capacity(u.len());
    let mut pv = Vec::with_capacity(v.len());
    modular_positions(u, cards, &mut pu);
    modular_positions(v, cards, &mut pv);
    Ok(pu.cmp(&pv))
}

/// Appends the reflected-order digit positions of `u` to `out`.
pub(crate) fn reflected_positions(u: &[u32], cards: &[u32], out: &mut Vec<u32>) {
    let mut ascending = true;
    for (&a, &n) in u.iter().zip(cards) {
        out.push(if ascending { a } else { n - 1 - a });
        if a & 1 == 1 {
            ascending = !ascending;
        }
    }
}

/// Appends the modular-order digit positions of `u` to `out`.
///
/// The position of digit `i` is `(u_i + s) mod N_i`, where `s` is the rank of
/// the prefix `u_0..u_{i-1}` in the order. Only `s mod N_i` is needed, which is
/// evaluated by Horner's rule over the earlier positions so that ranks never
/// have to be materialized.
pub(crate) fn modular_positions(u: &[u32], cards: &[u32], out: &mut Vec<u32>) {
    let start = out.len();
    for (i, (&a, &n)) in u.iter().zip(cards).enumerate() {
        let n64 = u64::from(n);
        let mut shift = 0u64;
        for (k, &t) in out[start..start + i].iter().enumerate() {
            shift = (shift * (u64::from(cards[k]) % n64) + u64::from(t)) % n64;
        }
        out.push(((u64::from(a) + shift) % n64) as u32);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn complete(cards: &[u32]) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &n in cards {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..n).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn digits(s: &str) -> Vec<u32> {
        s.bytes().map(|b| u32::from(b - b'0')).collect()
    }

    #[test]
    fn reflected_three_column_listing() {
        let cards = [3, 2, 2];
        let mut all = complete(&cards);
        all.sort_by(|a, b| cmp_reflected_gray(a, b, &cards).unwrap());
        let expect: Vec<Vec<u32>> = "000 001 011 010 110 111 101 100 200 201 211 210"
            .split(' ')
            .map(digits)
            .collect();
        assert_eq!(all, expect);
        assert_eq!(cmp_reflected_gray(&[0, 1, 1], &[0, 1, 0], &cards).unwrap(), Ordering::Less);
    }

    #[test]
    fn reflected_decimal_prefix() {
        let cards = [10, 10, 10];
        let mut all = complete(&cards);
        all.sort_by(|a, b| cmp_reflected_gray(a, b, &cards).unwrap());
        let head: Vec<Vec<u32>> = "000 001 002 003 004 005 006 007 008 009 019 018"
            .split(' ')
            .map(digits)
            .collect();
        assert_eq!(&all[..12], &head[..]);
        // the second digit's 1-block ends at 010, then 020, 021, ...
        let i = all.iter().position(|t| *t == digits("010")).unwrap();
        assert_eq!(all[i + 1], digits("020"));
    }

    #[test]
    fn modular_decimal_listing() {
        let cards = [10, 10, 10];
        let mut all = complete(&cards);
        all.sort_by(|a, b| cmp_modular_gray(a, b, &cards).unwrap());
        let head: Vec<Vec<u32>> = "000 001 002 003 004 005 006 007 008 009 019 010 011"
            .split(' ')
            .map(digits)
            .collect();
        assert_eq!(&all[..13], &head[..]);
        let i = all.iter().position(|t| *t == digits("018")).unwrap();
        assert_eq!(&all[i + 1..i + 4], &[digits("028"), digits("029"), digits("020")]);
        assert_eq!(cmp_modular_gray(&[0, 1, 9], &[0, 1, 0], &cards).unwrap(), Ordering::Less);
    }

    #[test]
    fn zero_is_minimum() {
        let cards = [3, 5, 2, 4];
        let zero = [0, 0, 0, 0];
        for t in complete(&cards).iter().skip(1) {
            assert_eq!(cmp_modular_gray(&zero, t, &cards).unwrap(), Ordering::Less);
            assert_eq!(cmp_reflected_gray(&zero, t, &cards).unwrap(), Ordering::Less);
        }
    }

    #[test]
    fn modular_mixed_radix_is_gray() {
        let cards = [3, 2, 2];
        let mut all = complete(&cards);
        all.sort_by(|a, b| cmp_modular_gray(a, b, &cards).unwrap());
        for w in all.windows(2) {
            let d = w[0].iter().zip(&w[1]).filter(|(a, b)| a != b).count();
            assert_eq!(d, 1, "{:?} -> {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(
            cmp_reflected_gray(&[0, 2], &[0, 0], &[2, 2]),
            Err(Error::CodeOutOfRange { column: 1, .. })
        ));
        assert!(cmp_modular_gray(&[0], &[0, 0], &[2, 2]).is_err());
        assert_eq!(cmp_modular_gray(&[1, 1], &[1, 1], &[2, 2]).unwrap(), Ordering::Equal);
    }
}
