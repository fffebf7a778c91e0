//! Table ingestion and the dictionary-encoded representation every order and
//! metric works on.

mod encoded;
mod permutation;
mod profile;
mod raw;

pub use encoded::{encode, permute_columns, shuffle_rows, EncodedTable, ValueOrder};
pub use permutation::Permutation;
pub use profile::{count_distinct, profile, ColumnProfile};
pub use raw::{load_delimited, RawTable};
