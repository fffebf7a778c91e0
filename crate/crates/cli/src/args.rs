use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use runorder_core::experiment::trial_table;
use runorder_core::table::{encode, load_delimited};
use runorder_core::{ColumnOrder, EncodedTable, OrderFamily, Permutation, UniformModel, ValueOrder};

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

/// `--col-order` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColOrderArg {
    Policy(ColumnOrder),
    Exhaustive,
}

impl Default for ColOrderArg {
    fn default() -> Self {
        ColOrderArg::Policy(ColumnOrder::AsGiven)
    }
}

impl FromStr for ColOrderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let policy = match s {
            "as-given" | "as_given" => ColumnOrder::AsGiven,
            "increasing" | "increasing-cardinality" | "increasing_cardinality" => {
                ColumnOrder::IncreasingCardinality
            }
            "decreasing" | "decreasing-cardinality" | "decreasing_cardinality" => {
                ColumnOrder::DecreasingCardinality
            }
            "exhaustive" => return Ok(ColOrderArg::Exhaustive),
            _ => {
                let Some(list) = s.strip_prefix("explicit:") else {
                    return Err(format!(
                        "unknown column order {s:?} (as-given, increasing, decreasing, explicit:I,J,..., exhaustive)"
                    ));
                };
                let idx = parse_list::<usize>(list)?;
                ColumnOrder::Explicit(Permutation::new(idx).map_err(|e| e.to_string())?)
            }
        };
        Ok(ColOrderArg::Policy(policy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ValueOrderArg {
    #[default]
    Alphabetical,
    Frequency,
    Explicit,
}

/// Comma-separated list. A plain `Vec` field would make clap expect repeated
/// flags instead.
pub type List<T> = Vec<T>;

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

pub fn parse_cards(s: &str) -> Result<Vec<u32>, String> {
    parse_list(s)
}

pub fn parse_family(s: &str) -> Result<OrderFamily, String> {
    s.parse::<OrderFamily>().map_err(|e| e.to_string())
}

/// Table source: a delimited file or a synthetic uniform model.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Delimited input file; `-` reads standard input.
    #[arg(long, conflicts_with_all = ["cards", "p"])]
    pub input: Option<PathBuf>,
    /// Field delimiter of the input.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// The first input line holds column names.
    #[arg(long)]
    pub header: bool,
    /// Column cardinalities of a synthetic uniform table, e.g. 4,8,16.
    #[arg(long, value_parser = parse_cards, requires = "p")]
    pub cards: Option<List<u32>>,
    /// Probability that each tuple of a synthetic table is present.
    #[arg(long, requires = "cards")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub value_order: ValueOrderArg,
    /// One line per column listing its values in order, separated by the
    /// delimiter. Used with `--value-order explicit`.
    #[arg(long)]
    pub value_order_file: Option<PathBuf>,
}

impl InputArgs {
    pub fn load(&self) -> Result<EncodedTable> {
        match (&self.input, &self.cards, self.p) {
            (Some(path), _, _) => {
                let raw = if path.as_os_str() == "-" {
                    load_delimited(io::stdin().lock(), self.delimiter, self.header)
                } else {
                    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    load_delimited(BufReader::new(f), self.delimiter, self.header)
                }
                .with_context(|| format!("reading {}", path.display()))?;
                Ok(encode(&raw, &self.value_order()?)?)
            }
            (None, Some(cards), Some(p)) => {
                let model = UniformModel::new(cards.clone(), p)?;
                Ok(trial_table(&model, self.seed, 0)?)
            }
            _ => Err(UsageError("give --input PATH or --cards LIST --p FLOAT".into()).into()),
        }
    }

    fn value_order(&self) -> Result<ValueOrder> {
        match (self.value_order, &self.value_order_file) {
            (ValueOrderArg::Alphabetical, None) => Ok(ValueOrder::Alphabetical),
            (ValueOrderArg::Frequency, None) => Ok(ValueOrder::FrequencyDesc),
            (ValueOrderArg::Explicit, Some(path)) => {
                let mut text = String::new();
                File::open(path)
                    .and_then(|mut f| f.read_to_string(&mut text))
                    .with_context(|| format!("reading {}", path.display()))?;
                let lists = text
                    .lines()
                    .filter(|l| !l.is_empty())
                    .map(|l| l.split(self.delimiter).map(str::to_owned).collect())
                    .collect();
                Ok(ValueOrder::Explicit(lists))
            }
            (ValueOrderArg::Explicit, None) => {
                Err(UsageError("--value-order explicit needs --value-order-file".into()).into())
            }
            (_, Some(_)) => {
                Err(UsageError("--value-order-file needs --value-order explicit".into()).into())
            }
        }
    }
}
