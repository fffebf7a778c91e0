//! Analytic run and join counts for complete and uniformly sampled tables.

mod blocks;
pub mod inequality;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use blocks::{
    expected_joins_lexico, expected_joins_reflected, lambda_reflected, p_dd, p_ud, rho,
};
pub use inequality::{check_order_inequality, uniform_grid, InequalityReport, InequalityRow};

use crate::error::{Error, Result};
use crate::orders::OrderFamily;
use blocks::Prob;

/// Every tuple of the cross product of the column domains is present
/// independently with probability `p`. `p = 0` is allowed and gives empty
/// tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformModel {
    pub cardinalities: Vec<u32>,
    pub p: f64,
}

impl UniformModel {
    pub fn new(cardinalities: Vec<u32>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must be in [0, 1], got {p}")));
        }
        if cardinalities.is_empty() {
            return Err(Error::InvalidParameter("model needs at least one column".into()));
        }
        if let Some(j) = cardinalities.iter().position(|&n| n == 0) {
            return Err(Error::InvalidParameter(format!("column {j} has cardinality 0")));
        }
        Ok(UniformModel { cardinalities, p })
    }

    /// Number of candidate tuples.
    pub fn space(&self) -> BigUint {
        self.cardinalities.iter().map(|&n| BigUint::from(n)).product()
    }
}

/// Expected runs and joins per column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub family: OrderFamily,
    pub runs: Vec<f64>,
    pub joins: Vec<f64>,
    pub total_runs: f64,
    pub expected_distinct_rows: f64,
    /// Absolute error allowed per column (0 when the formula is exact).
    pub error_band: f64,
}

impl ExpectationReport {
    pub fn total_band(&self) -> f64 {
        self.error_band * self.runs.len() as f64
    }
}

/// Expected runs of a table drawn from `model` and sorted by `family`.
///
/// Column `j` behaves like the second column of a two-column table whose
/// first column is the product of the columns before it and whose entries
/// are present when any completion over the later columns is.
pub fn expected_runs(model: &UniformModel, family: OrderFamily) -> Result<ExpectationReport> {
    let reflected = match family {
        OrderFamily::Lexicographic => false,
        OrderFamily::ReflectedGray => true,
        other => {
            return Err(Error::InvalidParameter(format!("no run model for {other} order")));
        }
    };
    let cards: Vec<f64> = model.cardinalities.iter().map(|&n| f64::from(n)).collect();
    let base = Prob::new(model.p);
    let c = cards.len();
    let mut runs = Vec::with_capacity(c);
    let mut joins = Vec::with_capacity(c);
    let mut before = 1.0f64;
    for j in 0..c {
        let suffix: f64 = cards[j + 1..].iter().product();
        let present = base.block(suffix);
        let n = cards[j];
        let s = if j == 0 {
            0.0
        } else if reflected {
            blocks::joins_reflected_at(before, n, present)
        } else {
            blocks::joins_lexico_at(before, n, present)
        };
        runs.push(before * n * present.p - s);
        joins.push(s);
        before *= n;
    }
    Ok(ExpectationReport {
        family,
        total_runs: runs.iter().sum(),
        expected_distinct_rows: model.p * before,
        runs,
        joins,
        error_band: if reflected { 1.0 } else { 0.0 },
    })
}

/// Exact run counts of the complete cross product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteRuns {
    pub per_column: Vec<BigUint>,
    pub total: BigUint,
}

impl Serialize for CompleteRuns {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CompleteRuns", 2)?;
        let per: Vec<String> = self.per_column.iter().map(|v| v.to_string()).collect();
        st.serialize_field("runs", &per)?;
        st.serialize_field("total_runs", &self.total.to_string())?;
        st.end()
    }
}

/// Runs of the complete table under lexicographic or Gray order (both Gray
/// families give the same counts). A column of cardinality 1 is one run.
pub fn complete_runs(cards: &[u32], family: OrderFamily) -> Result<CompleteRuns> {
    if family == OrderFamily::Hilbert {
        return Err(Error::InvalidParameter("no complete-table formula for hilbert order".into()));
    }
    let mut before = BigUint::one();
    let mut per_column = Vec::with_capacity(cards.len());
    for &n in cards {
        if n == 0 {
            return Err(Error::InvalidParameter("cardinality 0".into()));
        }
        let r = if n == 1 {
            BigUint::one()
        } else if family == OrderFamily::Lexicographic {
            &before * n
        } else {
            BigUint::one() + &before * (n - 1)
        };
        per_column.push(r);
        before *= n;
    }
    let total = per_column.iter().sum();
    Ok(CompleteRuns { per_column, total })
}

/// Relative saving of Gray over lexicographic order on a complete table
/// with `c` columns of cardinality `n`.
pub fn gray_benefit(n: u32, c: u32) -> Result<BigRational> {
    if n < 2 || c < 1 {
        return Err(Error::InvalidParameter(format!("need N >= 2 and c >= 1, got N={n}, c={c}")));
    }
    let cards = vec![n; c as usize];
    let lex = complete_runs(&cards, OrderFamily::Lexicographic)?.total;
    let gray = complete_runs(&cards, OrderFamily::ReflectedGray)?.total;
    let lex = BigInt::from(lex);
    Ok(BigRational::new(&lex - BigInt::from(gray), lex))
}

/// Closed form used as a cross-check of [`gray_benefit`].
pub fn gray_benefit_closed(n: u32, c: u32) -> f64 {
    let nb = BigInt::from(n);
    let geometric = (nb.pow(c + 1) - 1u32) / (&nb - 1u32) - 1u32;
    let gray = nb.pow(c) + BigInt::from(c) - 1u32;
    BigRational::new(&geometric - gray, geometric).to_f64().unwrap_or(f64::NAN)
}
