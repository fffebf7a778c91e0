//! Row and column reordering for run-length-encoded tables.
//!
//! Tables are dictionary-encoded ([`EncodedTable`]), sorted by one of four
//! row orders ([`OrderFamily`]) after an optional column permutation, and
//! scored by their run count ([`metrics::run_count`]). The [`models`] module
//! gives expected run counts on uniform random tables and [`oracle`] finds
//! exact optima on small ones.

pub mod error;
pub mod experiment;
pub mod metrics;
pub mod models;
pub mod oracle;
pub mod orders;
pub mod table;

pub use error::{Error, Result};
pub use metrics::{mu_bounds, run_count, BoundReport, RunStats};
pub use models::{ExpectationReport, UniformModel};
pub use oracle::{ColumnSearch, OracleResult};
pub use orders::{sort_table, ColumnOrder, OrderFamily, OrderSpec, SortKey};
pub use table::{ColumnProfile, EncodedTable, Permutation, RawTable, ValueOrder};
