use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use runorder_core::experiment::{run_experiment, trial_table, ExperimentConfig};
use runorder_core::metrics::adversarial_table;
use runorder_core::models::{self, check_order_inequality, complete_runs, expected_runs, uniform_grid};
use runorder_core::oracle::{best_column_order, brute_force_min_runs, recursive_gap, DEFAULT_COLUMN_LIMIT, DEFAULT_ROW_LIMIT};
use runorder_core::orders::{sort_table, OrderFamily, OrderSpec};
use runorder_core::table::{count_distinct, profile};
use runorder_core::{mu_bounds, run_count, ColumnOrder, EncodedTable, Permutation, UniformModel};

use crate::args::{parse_cards, parse_family, parse_list, ColOrderArg, Format, InputArgs, List};
use crate::UsageError;

/// Rendered result of a command.
pub struct Report {
    pub json: Value,
    pub tsv: String,
}

impl Report {
    fn new(command: &str, fields: Value, tsv: String) -> Self {
        let mut m = Map::new();
        m.insert("schema".into(), json!(1));
        m.insert("command".into(), json!(command));
        if let Value::Object(f) = fields {
            m.extend(f);
        }
        Report { json: Value::Object(m), tsv }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = match format {
            Format::Json => format!("{}\n", serde_json::to_string(&self.json)?),
            Format::Tsv => self.tsv.clone(),
        };
        match out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OrderArgs {
    #[arg(long, value_parser = parse_family, default_value = "lexicographic")]
    pub family: OrderFamily,
    /// as-given, increasing, decreasing, explicit:I,J,... or exhaustive.
    #[arg(long, default_value = "as-given")]
    pub col_order: ColOrderArg,
    /// Apply the column order to hilbert sorts too.
    #[arg(long)]
    pub permute_hilbert: bool,
    /// Largest column count for the exhaustive column order.
    #[arg(long, default_value_t = DEFAULT_COLUMN_LIMIT)]
    pub max_columns: usize,
}

fn resolve_columns(
    t: &EncodedTable,
    family: OrderFamily,
    order: &ColOrderArg,
    permute_hilbert: bool,
    max_columns: usize,
) -> Result<Permutation> {
    if family == OrderFamily::Hilbert && !permute_hilbert {
        return Ok(Permutation::identity(t.width()));
    }
    Ok(match order {
        ColOrderArg::Policy(p) => p.resolve(t.cardinalities())?,
        ColOrderArg::Exhaustive => best_column_order(t, family, max_columns)?.best_perm,
    })
}

fn tsv_row<T: ToString>(out: &mut String, fields: &[T]) {
    let line: Vec<String> = fields.iter().map(ToString::to_string).collect();
    out.push_str(&line.join("\t"));
    out.push('\n');
}

fn join_list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

#[derive(Debug, Clone, Args)]
pub struct SortArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write the sorted table here as delimited text.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn sort(a: &SortArgs) -> Result<Report> {
    let t = a.input.load()?;
    let o = &a.order;
    let perm = resolve_columns(&t, o.family, &o.col_order, o.permute_hilbert, o.max_columns)?;
    let sorted = sort_table(&t, &OrderSpec::new(o.family, perm))?;
    let stats = run_count(&sorted);
    if let Some(path) = &a.out {
        write_table(&sorted, a.input.delimiter, path)?;
    }
    let mut tsv = String::from("column\tsource_column\truns\tjoins\n");
    for j in 0..sorted.width() {
        tsv_row(&mut tsv, &[j, sorted.column_origin()[j], stats.runs_per_column[j] as usize, stats.joins_per_column[j] as usize]);
    }
    let fields = json!({
        "family": o.family,
        "column_order": sorted.column_origin(),
        "rows": sorted.len(),
        "columns": sorted.width(),
        "runs": stats.runs_per_column,
        "joins": stats.joins_per_column,
        "hamming_sum": stats.hamming_sum,
        "total_runs": stats.total_runs,
    });
    Ok(Report::new("sort", fields, tsv))
}

fn write_table(t: &EncodedTable, delimiter: char, path: &Path) -> Result<()> {
    let delimiter = u8::try_from(delimiter).map_err(|_| UsageError("delimiter must be ASCII".into()))?;
    let sink: Box<dyn Write> = if path.as_os_str() == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
    };
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(sink);
    if let Some(names) = t.names() {
        w.write_record(names)?;
    }
    for i in 0..t.len() {
        w.write_record(t.decode_row(i))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn bound(a: &BoundArgs) -> Result<Report> {
    let t = a.input.load()?;
    let prof = profile(&t);
    let b = mu_bounds(&prof)?;
    let mut fields = json!({
        "rows": prof.rows,
        "distinct_rows": prof.distinct_rows,
        "cardinalities": prof.cardinalities,
    });
    if let (Value::Object(f), Value::Object(extra)) = (&mut fields, to_value(&b)) {
        f.extend(extra);
    }
    let mut tsv = String::from("rows\tdistinct_rows\tmu\tmu_gc\tlower_bound\tupper_bound\n");
    tsv_row(
        &mut tsv,
        &[
            prof.rows.to_string(),
            prof.distinct_rows.to_string(),
            fields["mu"].to_string(),
            fields["mu_gc"].to_string(),
            b.lower_bound_runs.to_string(),
            b.upper_bound_runs.to_string(),
        ],
    );
    Ok(Report::new("bound", fields, tsv))
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_cards)]
    pub cards: Option<List<u32>>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Defaults to lexicographic, or to both lexicographic and reflected-gray
    /// with --inequality.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<OrderFamily>,
    #[arg(long, default_value = "as-given")]
    pub col_order: ColOrderArg,
    /// Sample the ordering inequality between two column cardinalities
    /// instead of reporting expectations.
    #[arg(long)]
    pub inequality: bool,
    #[arg(long, default_value_t = 2)]
    pub n_min: u64,
    #[arg(long, default_value_t = 10)]
    pub n_max: u64,
    /// Number of evenly spaced p values in (0, 1).
    #[arg(long, default_value_t = 999)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_COLUMN_LIMIT)]
    pub max_columns: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn model(a: &ModelArgs) -> Result<Report> {
    if a.inequality {
        return inequality(a);
    }
    let (Some(cards), Some(p)) = (&a.cards, a.p) else {
        return Err(UsageError("model needs --cards and --p (or --inequality)".into()).into());
    };
    let family = a.family.unwrap_or(OrderFamily::Lexicographic);
    let base = UniformModel::new(cards.clone(), p)?;
    let perms = match &a.col_order {
        ColOrderArg::Policy(policy) => vec![policy.resolve(cards)?],
        ColOrderArg::Exhaustive => all_permutations(cards.len(), a.max_columns)?,
    };
    let mut tsv = String::from("column_order\tcolumn\tcardinality\texpected_runs\texpected_joins\n");
    let mut orders = Vec::with_capacity(perms.len());
    for perm in &perms {
        let permuted = perm.apply(cards)?;
        let (runs, joins, total, band) = if p == 1.0 {
            // the complete table: exact counts for every family but hilbert
            let exact = complete_runs(&permuted, family)?;
            let runs: Vec<f64> = exact.per_column.iter().map(|r| r.to_string().parse().unwrap_or(f64::INFINITY)).collect();
            let mut before = 1.0;
            let joins: Vec<f64> = permuted
                .iter()
                .zip(&runs)
                .map(|(&n, &r)| {
                    let s = before * f64::from(n) - r;
                    before *= f64::from(n);
                    s
                })
                .collect();
            let total = runs.iter().sum();
            (runs, joins, total, 0.0)
        } else {
            let m = UniformModel::new(permuted.clone(), p)?;
            let r = expected_runs(&m, family)?;
            (r.runs, r.joins, r.total_runs, r.error_band)
        };
        let label = join_list(perm.as_slice());
        for j in 0..permuted.len() {
            tsv_row(&mut tsv, &[label.clone(), j.to_string(), permuted[j].to_string(), runs[j].to_string(), joins[j].to_string()]);
        }
        orders.push(json!({
            "column_order": perm.as_slice(),
            "cardinalities": permuted,
            "runs": runs,
            "joins": joins,
            "total_runs": total,
            "error_band": band,
        }));
    }
    let fields = json!({
        "family": family,
        "p": base.p,
        "cardinalities": base.cardinalities,
        "expected_distinct_rows": base.p * cards.iter().map(|&n| f64::from(n)).product::<f64>(),
        "orders": orders,
    });
    Ok(Report::new("model", fields, tsv))
}

fn all_permutations(c: usize, max_columns: usize) -> Result<Vec<Permutation>> {
    if c > max_columns {
        return Err(runorder_core::Error::BudgetExceeded {
            what: "columns for exhaustive column order",
            needed: c.to_string(),
            limit: max_columns.to_string(),
            hint: "",
        }
        .into());
    }
    let mut idx: Vec<usize> = (0..c).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation::new(idx.clone())?);
        let Some(i) = (1..c).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return Ok(out);
        };
        let j = (i..c).rev().find(|&j| idx[j] > idx[i - 1]).expect("successor exists");
        idx.swap(i - 1, j);
        idx[i..].reverse();
    }
}

fn inequality(a: &ModelArgs) -> Result<Report> {
    let families = match a.family {
        Some(f) => vec![f],
        None => vec![OrderFamily::Lexicographic, OrderFamily::ReflectedGray],
    };
    if a.grid == 0 {
        return Err(UsageError("--grid must be at least 1".into()).into());
    }
    let grid = uniform_grid(a.grid);
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for &family in &families {
        for n2 in a.n_min..=a.n_max {
            for n3 in n2 + 1..=a.n_max {
                let r = check_order_inequality(n2, n3, family, &grid)?;
                pairs.push(json!({
                    "family": family,
                    "n2": n2,
                    "n3": n3,
                    "holds": r.holds,
                    "margin": r.margin,
                    "margin_p": r.margin_p,
                }));
                rows.extend(r.rows.into_iter().map(|row| (family, row)));
            }
        }
    }
    if pairs.is_empty() {
        return Err(UsageError(format!("no pairs with {} <= N2 < N3 <= {}", a.n_min, a.n_max)).into());
    }
    let all_hold = pairs.iter().all(|p| p["holds"] == json!(true));
    let mut tsv = String::from("family\t");
    let mut body = Vec::new();
    models::inequality::write_tsv(&mut body, &rows.iter().map(|r| r.1).collect::<Vec<_>>())?;
    let body = String::from_utf8(body).expect("tsv is utf-8");
    let mut lines = body.lines();
    let _ = writeln!(tsv, "{}", lines.next().unwrap_or_default());
    for ((family, _), line) in rows.iter().zip(lines) {
        let _ = writeln!(tsv, "{family}\t{line}");
    }
    let fields = json!({
        "grid_points": a.grid,
        "all_hold": all_hold,
        "pairs": pairs,
    });
    Ok(Report::new("model-inequality", fields, tsv))
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Family to compare against the optimum; all four when omitted.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<OrderFamily>,
    /// as-given, increasing, decreasing, explicit:I,J,... or exhaustive.
    #[arg(long, default_value = "as-given")]
    pub col_order: ColOrderArg,
    #[arg(long)]
    pub permute_hilbert: bool,
    /// Largest distinct-row count for the exact search.
    #[arg(long, default_value_t = DEFAULT_ROW_LIMIT)]
    pub row_limit: usize,
    #[arg(long, default_value_t = DEFAULT_COLUMN_LIMIT)]
    pub max_columns: usize,
    /// Search this many synthetic tables for ones where no recursive order
    /// under any column permutation is optimal.
    #[arg(long, requires = "cards")]
    pub fuzz: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn oracle(a: &OracleArgs) -> Result<Report> {
    if let Some(n) = a.fuzz {
        return fuzz(a, n);
    }
    let t = a.input.load()?;
    let best = brute_force_min_runs(&t, a.row_limit)?;
    let optimal = best.optimal_runs;
    let ratio = |runs: u64| if optimal == 0 { 1.0 } else { runs as f64 / optimal as f64 };
    let families = match a.family {
        Some(f) => vec![f],
        None => OrderFamily::ALL.to_vec(),
    };
    let mut tsv = String::from("family\tcolumn_order\truns\toptimal_runs\tratio\n");
    let mut heuristics = Vec::new();
    for family in families {
        let hilbert_fixed = family == OrderFamily::Hilbert && !a.permute_hilbert;
        match &a.col_order {
            ColOrderArg::Exhaustive if !hilbert_fixed => {
                let search = best_column_order(&t, family, a.max_columns)?;
                for (perm, runs) in &search.per_perm {
                    tsv_row(&mut tsv, &[family.to_string(), perm.to_string(), runs.to_string(), optimal.to_string(), ratio(*runs).to_string()]);
                }
                let per_perm: Map<String, Value> =
                    search.per_perm.iter().map(|(p, r)| (p.to_string(), json!(r))).collect();
                heuristics.push(json!({
                    "family": family,
                    "column_order": search.best_perm,
                    "runs": search.best_runs,
                    "ratio": ratio(search.best_runs),
                    "per_column_order": per_perm,
                }));
            }
            order => {
                let perm = resolve_columns(&t, family, order, a.permute_hilbert, a.max_columns)?;
                let runs = run_count(&sort_table(&t, &OrderSpec::new(family, perm.clone()))?).total_runs;
                tsv_row(&mut tsv, &[family.to_string(), perm.to_string(), runs.to_string(), optimal.to_string(), ratio(runs).to_string()]);
                heuristics.push(json!({
                    "family": family,
                    "column_order": perm,
                    "runs": runs,
                    "ratio": ratio(runs),
                }));
            }
        }
    }
    let distinct = count_distinct(&t);
    let witness_rows: Vec<Vec<&str>> = best.witness_order.iter().map(|&i| t.decode_row(i)).collect();
    let fields = json!({
        "rows": t.len(),
        "distinct_rows": distinct,
        "lower_bound": if distinct == 0 { 0 } else { distinct + t.width() - 1 },
        "optimal_runs": optimal,
        "witness_order": best.witness_order,
        "witness_rows": witness_rows,
        "explored": best.explored,
        "heuristics": heuristics,
    });
    Ok(Report::new("oracle", fields, tsv))
}

/// Run counts of one searched fuzz table.
struct Searched {
    trial: usize,
    lower: u64,
    optimal: u64,
    recursive: u64,
    upper: u64,
}

fn fuzz(a: &OracleArgs, n: usize) -> Result<Report> {
    let (Some(cards), Some(p)) = (&a.input.cards, a.input.p) else {
        return Err(UsageError("--fuzz needs --cards and --p".into()).into());
    };
    let model = UniformModel::new(cards.clone(), p)?;
    let seed = a.input.seed;
    let outcomes = (0..n)
        .into_par_iter()
        .map(|trial| -> Result<Option<Searched>> {
            let t = trial_table(&model, seed, trial)?;
            let d = count_distinct(&t);
            if d == 0 || d > a.row_limit {
                return Ok(None);
            }
            let gap = recursive_gap(&t, a.row_limit, a.max_columns)?;
            let upper = mu_bounds(&profile(&t))?.upper_bound_runs.try_into().unwrap_or(u64::MAX);
            Ok(Some(Searched {
                trial,
                lower: (d + t.width() - 1) as u64,
                optimal: gap.optimal_runs,
                recursive: gap.best_recursive_runs,
                upper,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let searched: Vec<Searched> = outcomes.into_iter().flatten().collect();
    let suboptimal: Vec<&Searched> = searched.iter().filter(|o| o.recursive > o.optimal).collect();
    let violations = searched
        .iter()
        .filter(|o| !(o.lower <= o.optimal && o.optimal <= o.recursive && o.recursive <= o.upper))
        .count();
    let max_ratio = searched.iter().map(|o| o.recursive as f64 / o.optimal as f64).fold(1.0, f64::max);
    let frequency = if searched.is_empty() { 0.0 } else { suboptimal.len() as f64 / searched.len() as f64 };
    let examples: Vec<u64> = suboptimal.iter().take(10).map(|o| seed.wrapping_add(o.trial as u64)).collect();
    let mut tsv = String::from("tables\tsearched\tsuboptimal\tfrequency\tmax_ratio\tsandwich_violations\n");
    tsv_row(
        &mut tsv,
        &[n.to_string(), searched.len().to_string(), suboptimal.len().to_string(), frequency.to_string(), max_ratio.to_string(), violations.to_string()],
    );
    let fields = json!({
        "cardinalities": cards,
        "p": p,
        "seed": seed,
        "tables": n,
        "searched": searched.len(),
        "skipped": n - searched.len(),
        "suboptimal": suboptimal.len(),
        "frequency": frequency,
        "max_ratio": max_ratio,
        "sandwich_violations": violations,
        "suboptimal_seeds": examples,
    });
    Ok(Report::new("oracle-fuzz", fields, tsv))
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_parser = parse_cards)]
    pub cards: List<u32>,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// as-given, increasing, decreasing or explicit:I,J,...
    #[arg(long, default_value = "as-given")]
    pub col_order: ColOrderArg,
    #[arg(long)]
    pub permute_hilbert: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn experiment(a: &ExperimentArgs) -> Result<Report> {
    let ColOrderArg::Policy(column_order) = &a.col_order else {
        return Err(UsageError("experiment does not support the exhaustive column order".into()).into());
    };
    let model = UniformModel::new(a.cards.clone(), a.p)?;
    let trials = usize::try_from(a.trials).map_err(|_| UsageError("too many trials".into()))?;
    let mut cfg = ExperimentConfig::new(model, trials, a.seed);
    cfg.column_order = column_order.clone();
    cfg.permute_hilbert = a.permute_hilbert;
    let summaries = run_experiment(&cfg)?;
    let mut tsv = String::from("method\tmean\tstd\tmin\tmax\ttrials\n");
    for s in &summaries {
        tsv_row(&mut tsv, &[s.method.to_string(), s.mean.to_string(), s.std.to_string(), s.min.to_string(), s.max.to_string(), s.trials.to_string()]);
    }
    let fields = json!({
        "cardinalities": a.cards,
        "p": a.p,
        "trials": a.trials,
        "seed": a.seed,
        "column_order": policy_name(column_order),
        "permute_hilbert": a.permute_hilbert,
        "methods": summaries,
    });
    Ok(Report::new("experiment", fields, tsv))
}

fn policy_name(p: &ColumnOrder) -> String {
    match p {
        ColumnOrder::AsGiven => "as-given".into(),
        ColumnOrder::IncreasingCardinality => "increasing".into(),
        ColumnOrder::DecreasingCardinality => "decreasing".into(),
        ColumnOrder::Explicit(perm) => format!("explicit:{perm}"),
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Adversarial table ROWS,COLS: a key column followed by alternating 0/1 columns.
    #[arg(long, value_parser = parse_list::<usize>, conflicts_with_all = ["cards", "p"])]
    pub adversarial: Option<List<usize>>,
    #[arg(long, value_parser = parse_cards, requires = "p")]
    pub cards: Option<List<u32>>,
    #[arg(long, requires = "cards")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Write a header line c0,c1,...
    #[arg(long)]
    pub header: bool,
    /// Destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen(a: &GenArgs) -> Result<()> {
    let t = match (&a.adversarial, &a.cards, a.p) {
        (Some(dims), _, _) => {
            let [rows, cols] = dims[..] else {
                return Err(UsageError("--adversarial takes ROWS,COLS".into()).into());
            };
            adversarial_table(rows, cols)?
        }
        (None, Some(cards), Some(p)) => trial_table(&UniformModel::new(cards.clone(), p)?, a.seed, 0)?,
        _ => return Err(UsageError("gen needs --adversarial ROWS,COLS or --cards LIST --p FLOAT".into()).into()),
    };
    let t = if a.header {
        let names = (0..t.width()).map(|j| format!("c{j}")).collect();
        EncodedTable::new(t.codes().to_vec(), t.dictionaries().to_vec(), Some(names))?
    } else {
        t
    };
    write_table(&t, a.delimiter, a.out.as_deref().unwrap_or(Path::new("-")))
}
