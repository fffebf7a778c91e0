//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero when any of them fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use runorder_core::experiment::{run_experiment, trial_table, ExperimentConfig, Method};
use runorder_core::metrics::{adversarial_table, is_recursive_ordering, round_decimal};
use runorder_core::models::{check_order_inequality, expected_runs, uniform_grid};
use runorder_core::oracle::{brute_force_min_runs, generate_uniform, generate_uniform_sparse, mu_sweep};
use runorder_core::orders::hilbert_key;
use runorder_core::table::profile;
use runorder_core::{
    mu_bounds, run_count, sort_table, ColumnOrder, EncodedTable, OrderFamily, OrderSpec, Permutation, UniformModel,
};

type Outcome = Result<String, String>;
type Check = (u8, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const RECURSIVE: [OrderFamily; 3] =
    [OrderFamily::Lexicographic, OrderFamily::ReflectedGray, OrderFamily::ModularGray];

fn sorted(t: &EncodedTable, family: OrderFamily) -> Result<EncodedTable, String> {
    ok(sort_table(t, &OrderSpec::identity(family, t.width())))
}

fn complete(cards: &[u32], seed: u64) -> Result<EncodedTable, String> {
    ok(generate_uniform(&ok(UniformModel::new(cards.to_vec(), 1.0))?, seed))
}

fn prefix_products(cards: &[u32]) -> Vec<u64> {
    cards
        .iter()
        .scan(1u64, |acc, &n| {
            *acc *= u64::from(n);
            Some(*acc)
        })
        .collect()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn small_example() -> EncodedTable {
    let rows: Vec<[u32; 2]> = vec![
        [1, 1], [3, 4], [4, 2], [4, 4], [5, 7], [6, 5], [6, 6], [6, 8], [8, 4], [9, 4],
    ];
    EncodedTable::from_rows(&rows, &[10, 10]).unwrap()
}

fn letter_pairs() -> EncodedTable {
    let rows: Vec<[u32; 2]> = ["KY", "AY", "AD", "ZD", "ZB", "AB", "AC", "WC", "WE", "FE", "FC", "HC", "HJ"]
        .iter()
        .map(|s| {
            let b = s.as_bytes();
            [u32::from(b[0] - b'A'), u32::from(b[1] - b'A')]
        })
        .collect();
    EncodedTable::from_rows(&rows, &[26, 26]).unwrap()
}

fn c1_small_example() -> Outcome {
    let t = small_example();
    let lex = run_count(&sorted(&t, OrderFamily::Lexicographic)?).total_runs;
    ensure(lex == 16, || format!("lexicographic runs {lex}, want 16"))?;
    let best = ok(brute_force_min_runs(&t, 15))?;
    ensure(best.optimal_runs == 14, || format!("optimum {}, want 14", best.optimal_runs))?;
    let mut seen = best.witness_order.clone();
    seen.sort_unstable();
    ensure(seen == (0..t.len()).collect::<Vec<_>>(), || "witness is not a row permutation".into())?;
    let witness_runs = run_count(&t.reorder_rows(&best.witness_order)).total_runs;
    ensure(witness_runs == 14, || format!("witness has {witness_runs} runs"))?;
    Ok("lexicographic 16, optimum 14, witness verified".into())
}

fn c2_complete_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut vectors = Vec::new();
    while vectors.len() < 50 {
        let c = rng.gen_range(1..=6);
        let cards: Vec<u32> = (0..c).map(|_| rng.gen_range(2..=30)).collect();
        if cards.iter().map(|&n| u64::from(n)).product::<u64>() <= 100_000 {
            vectors.push(cards);
        }
    }
    for (i, cards) in vectors.iter().enumerate() {
        let t = complete(cards, i as u64)?;
        let pre = prefix_products(cards);
        let lex = run_count(&sorted(&t, OrderFamily::Lexicographic)?);
        ensure(lex.runs_per_column == pre, || format!("{cards:?}: lexicographic runs {:?}", lex.runs_per_column))?;
        ensure(lex.total_runs == pre.iter().sum::<u64>(), || format!("{cards:?}: lexicographic total"))?;
        let want: Vec<u64> = (0..cards.len())
            .map(|j| 1 + (u64::from(cards[j]) - 1) * if j == 0 { 1 } else { pre[j - 1] })
            .collect();
        for family in [OrderFamily::ReflectedGray, OrderFamily::ModularGray] {
            let s = run_count(&sorted(&t, family)?);
            ensure(s.runs_per_column == want, || format!("{cards:?} {family}: runs {:?}, want {want:?}", s.runs_per_column))?;
            let total = cards.len() as u64 - 1 + pre[cards.len() - 1];
            ensure(s.total_runs == total, || format!("{cards:?} {family}: total {}", s.total_runs))?;
        }
    }
    Ok(format!("{} cardinality vectors, three families exact", vectors.len()))
}

fn all_adjacent_hamming_one(t: &EncodedTable) -> bool {
    t.rows().zip(t.rows().skip(1)).all(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count() == 1)
}

fn c3_structure() -> Outcome {
    let mut vectors: Vec<Vec<u32>> = Vec::new();
    for a in 2..=16u32 {
        vectors.push(vec![a]);
        for b in 2..=16 {
            vectors.push(vec![a, b]);
            for c in 2..=16 {
                vectors.push(vec![a, b, c]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    while vectors.len() < 3615 + 60 {
        let c = rng.gen_range(4..=6);
        let cards: Vec<u32> = (0..c).map(|_| rng.gen_range(2..=8)).collect();
        if cards.iter().product::<u32>() <= 4096 {
            vectors.push(cards);
        }
    }
    vectors.par_iter().enumerate().try_for_each(|(i, cards)| -> Result<(), String> {
        let t = complete(cards, i as u64)?;
        for family in [OrderFamily::ReflectedGray, OrderFamily::ModularGray] {
            let s = sorted(&t, family)?;
            ensure(all_adjacent_hamming_one(&s), || format!("{cards:?} {family}: adjacent rows differ in more than one column"))?;
        }
        if i % 16 == 0 {
            for family in RECURSIVE {
                ensure(is_recursive_ordering(&sorted(&t, family)?), || format!("{cards:?} {family}: not recursive"))?;
            }
        }
        Ok(())
    })?;

    let mut grids = 0;
    for dims in 1..=12usize {
        for bits in 1..=12 / dims {
            let side = 1u32 << bits;
            let cards = vec![side; dims];
            let t = complete(&cards, 0)?;
            let mut keyed: Vec<(BigUint, &[u32])> =
                t.rows().map(|r| Ok((ok(hilbert_key(r, &cards))?.0, r))).collect::<Result<_, String>>()?;
            keyed.sort();
            let distinct: HashSet<&BigUint> = keyed.iter().map(|k| &k.0).collect();
            ensure(distinct.len() == keyed.len(), || format!("{cards:?}: duplicate hilbert keys"))?;
            for w in keyed.windows(2) {
                let lee: u32 = w[0].1.iter().zip(w[1].1).map(|(a, b)| a.abs_diff(*b)).sum();
                ensure(lee == 1, || format!("{cards:?}: {:?} -> {:?} jumps {lee}", w[0].1, w[1].1))?;
            }
            grids += 1;
        }
    }

    // unequal sides: injective, but the compact index may jump
    let mut mixed = 0;
    for a in 0..=6u32 {
        for b in 0..=6 {
            for c in 0..=(12 - a - b).min(6) {
                let cards = [1u32 << a, 1 << b, 1 << c];
                let t = complete(&cards, 0)?;
                let keys: HashSet<BigUint> =
                    t.rows().map(|r| Ok(ok(hilbert_key(r, &cards))?.0)).collect::<Result<_, String>>()?;
                ensure(keys.len() == t.len(), || format!("{cards:?}: duplicate hilbert keys"))?;
                mixed += 1;
            }
        }
    }

    let witness = ok(EncodedTable::from_rows(&[[0u32, 0], [1, 0], [1, 1], [0, 1]], &[3, 3]))?;
    ensure(!is_recursive_ordering(&witness), || "hilbert witness reported recursive".into())?;
    let h = sorted(&complete(&[3, 3], 0)?, OrderFamily::Hilbert)?;
    ensure(h.rows().take(4).eq(witness.rows()), || "hilbert sort of 3x3 does not start with the witness".into())?;
    ensure(!is_recursive_ordering(&h), || "hilbert sort of 3x3 reported recursive".into())?;
    Ok(format!("{} gray tables Hamming-1, {grids} hilbert grids Lee-1, {mixed} mixed grids injective, witness non-recursive", vectors.len()))
}

fn c4_sandwich() -> Outcome {
    let tables: Vec<EncodedTable> = {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        (0..1000)
            .map(|_| {
                let c = rng.gen_range(1..=4);
                let cards: Vec<u32> = (0..c).map(|_| rng.gen_range(1..=8)).collect();
                let n = rng.gen_range(1..=12);
                let codes: Vec<u32> = (0..n).flat_map(|_| cards.iter().map(|&k| rng.gen_range(0..k)).collect::<Vec<_>>()).collect();
                EncodedTable::from_codes(codes, &cards).unwrap()
            })
            .collect()
    };
    tables.par_iter().try_for_each(|t| -> Result<(), String> {
        let prof = profile(t);
        let b = ok(mu_bounds(&prof))?;
        let lower = prof.distinct_rows + t.width() as u64 - 1;
        let opt = ok(brute_force_min_runs(t, 12))?.optimal_runs;
        let upper: u64 = ok(u64::try_from(&b.upper_bound_runs))?;
        ensure(lower <= opt, || format!("{:?}: optimum {opt} below {lower}", t.codes()))?;
        for family in RECURSIVE {
            let rec = run_count(&sorted(t, family)?).total_runs;
            ensure(opt <= rec && rec <= upper, || format!("{:?} {family}: {opt} <= {rec} <= {upper} fails", t.codes()))?;
            let ratio = BigRational::new(rec.into(), opt.into());
            ensure(ratio <= b.mu, || format!("{:?} {family}: ratio above mu", t.codes()))?;
        }
        Ok(())
    })?;
    let date = mu_bounds(&profile(&complete(&[12, 31, 100], 0)?)).map_err(|e| e.to_string())?;
    let want = BigRational::new(37584.into(), 37202.into());
    ensure(date.mu == want, || format!("date mu {}", date.mu))?;
    ensure(round_decimal(&date.mu, 4) == 1.0103, || "date mu does not round to 1.0103".into())?;
    Ok(format!("{} tables sandwiched; date mu = {} = {}", tables.len(), date.mu, round_decimal(&date.mu, 4)))
}

fn c5_adversarial() -> Outcome {
    let t = ok(adversarial_table(1000, 5))?;
    let built = run_count(&t).total_runs;
    ensure(built == 5000, || format!("as built {built}"))?;
    let perm = ok(ColumnOrder::IncreasingCardinality.resolve(t.cardinalities()))?;
    ensure(perm.as_slice()[4] == 0, || format!("key column not moved last: {perm}"))?;
    for family in RECURSIVE {
        let runs = run_count(&ok(sort_table(&t, &OrderSpec::new(family, perm.clone())))?).total_runs;
        ensure(runs == 1008, || format!("{family}: {runs} runs, want 1008"))?;
    }
    let ratio = built as f64 / 1008.0;
    ensure(ratio > 4.9, || format!("ratio {ratio}"))?;
    Ok(format!("5000 vs 1008 runs, ratio {ratio:.3}"))
}

fn c6_uniform_benchmark() -> Outcome {
    let rows: [([u32; 5], [f64; 4]); 3] = [
        ([4, 8, 16, 32, 64], [47.8, 18.9, 18.7, 18.7]),
        ([64, 32, 16, 8, 4], [47.8, 28.5, 28.1, 28.2]),
        ([16, 16, 16, 16, 16], [49.7, 23.7, 23.3, 23.4]),
    ];
    let mut detail = Vec::new();
    for (cards, reference) in rows {
        let cfg = ExperimentConfig::new(ok(UniformModel::new(cards.to_vec(), 0.01))?, 20, 1);
        let summary = ok(run_experiment(&cfg))?;
        let mean = |m: Method| summary.iter().find(|s| s.method == m.name()).map(|s| s.mean).unwrap();
        let means: Vec<f64> = Method::ALL.iter().map(|&m| mean(m) / 1000.0).collect();
        for (k, want) in reference.iter().enumerate() {
            let err = (means[k] - want).abs() / want;
            ensure(err <= 0.03, || format!("{cards:?} {}: {:.2}k vs {want}k", Method::ALL[k].name(), means[k]))?;
        }
        let (shuffled, lex, hilbert) = (means[0], means[1], means[4]);
        ensure(lex < hilbert && hilbert < shuffled, || format!("{cards:?}: hilbert {hilbert:.2}k outside ({lex:.2}k, {shuffled:.2}k)"))?;
        detail.push(format!("{:?}: {}", cards, means.iter().map(|m| format!("{m:.1}")).collect::<Vec<_>>().join("/")));
    }
    Ok(detail.join("; "))
}

struct TrialStats {
    total: [f64; 2],
    blocks: [f64; 2],
    share: [f64; 2],
}

fn c7_analytic_vs_empirical() -> Outcome {
    let cases: Vec<(Vec<u32>, f64, usize)> = vec![
        (vec![5, 10], 0.1, 10_000),
        (vec![30, 4], 0.3, 10_000),
        (vec![10, 10], 0.05, 10_000),
        (vec![2, 30], 0.5, 10_000),
        (vec![20, 20], 0.02, 10_000),
        (vec![4, 6, 8], 0.1, 1_000),
        (vec![10, 5, 3], 0.05, 1_000),
        (vec![8, 8, 8], 0.01, 1_000),
        (vec![3, 12, 30], 0.02, 1_000),
    ];
    let families = [OrderFamily::Lexicographic, OrderFamily::ReflectedGray];
    let mut worst: f64 = 0.0;
    for (cards, p, trials) in cases {
        let model = ok(UniformModel::new(cards.clone(), p))?;
        let c = cards.len() as f64;
        let stats = (0..trials)
            .into_par_iter()
            .map(|i| -> Result<TrialStats, String> {
                let t = ok(trial_table(&model, 7, i))?;
                let mut s = TrialStats { total: [0.0; 2], blocks: [0.0; 2], share: [0.0; 2] };
                for (k, &f) in families.iter().enumerate() {
                    let r = run_count(&sorted(&t, f)?);
                    let joins: u64 = r.joins_per_column.iter().sum();
                    s.total[k] = r.total_runs as f64;
                    s.blocks[k] = (r.total_runs + joins) as f64;
                    s.share[k] = if r.total_runs == 0 { 0.0 } else { joins as f64 / (r.total_runs + joins) as f64 };
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>, String>>()?;
        let min_n = f64::from(*cards.iter().min().unwrap());
        for (k, &f) in families.iter().enumerate() {
            let expected = ok(expected_runs(&model, f))?.total_runs;
            let (mean, se) = mean_se(&stats.iter().map(|s| s.total[k]).collect::<Vec<_>>());
            let dev = (expected - mean).abs();
            worst = worst.max(dev / (c + 3.0 * se));
            ensure(dev <= c + 3.0 * se, || format!("{cards:?} p={p} {f}: expected {expected:.3}, mean {mean:.3} (se {se:.3})"))?;
            let (share, share_se) = mean_se(&stats.iter().map(|s| s.share[k]).collect::<Vec<_>>());
            ensure(share <= 1.0 / min_n + 3.0 * share_se, || format!("{cards:?} p={p} {f}: join share {share:.4}"))?;
        }
        let (diff, diff_se) = mean_se(&stats.iter().map(|s| s.blocks[0] - s.blocks[1]).collect::<Vec<_>>());
        ensure(diff.abs() <= 3.0 * diff_se, || format!("{cards:?} p={p}: runs+joins differ by {diff:.3} (se {diff_se:.3})"))?;
    }
    Ok(format!("9 configurations; largest deviation {:.0}% of the allowed band", worst * 100.0))
}

fn c8_order_inequality() -> Outcome {
    let grid = uniform_grid(999);
    let mut smallest = (f64::INFINITY, String::new());
    for family in [OrderFamily::Lexicographic, OrderFamily::ReflectedGray] {
        for n2 in 2..=9u64 {
            for n3 in n2 + 1..=10 {
                let r = ok(check_order_inequality(n2, n3, family, &grid))?;
                ensure(r.holds && r.margin > 0.0, || format!("{family} N2={n2} N3={n3}: margin {:e} at p={}", r.margin, r.margin_p))?;
                if r.margin < smallest.0 {
                    smallest = (r.margin, format!("{family} N2={n2} N3={n3} p={}", r.margin_p));
                }
            }
        }
    }
    Ok(format!("90 pairs hold; smallest margin {:.3e} ({})", smallest.0, smallest.1))
}

fn c9_recursive_suboptimal() -> Outcome {
    let t = letter_pairs();
    let opt = ok(brute_force_min_runs(&t, 15))?.optimal_runs;
    ensure(opt == 14, || format!("optimum {opt}, want 14"))?;
    let mut best = u64::MAX;
    for family in RECURSIVE {
        for perm in [vec![0, 1], vec![1, 0]] {
            let spec = OrderSpec::new(family, ok(Permutation::new(perm.clone()))?);
            let runs = run_count(&ok(sort_table(&t, &spec))?).total_runs;
            ensure(runs >= 15, || format!("{family} columns {perm:?}: {runs} runs"))?;
            best = best.min(runs);
        }
    }
    Ok(format!("optimum 14, best recursive {best}"))
}

fn c10_mu_trend() -> Outcome {
    let model = ok(UniformModel::new(vec![10; 10], 2e-6))?;
    let t = ok(generate_uniform_sparse(&model, 10))?;
    let sweep = ok(mu_sweep(&t, 40, 10))?;
    let means: Vec<f64> = sweep.iter().map(|r| r.mean_mu).collect();
    for k in 3..means.len() {
        ensure(means[k] >= means[k - 1], || format!("mean mu drops at k={}: {means:?}", k + 1))?;
    }
    Ok(format!(
        "{} rows; mean mu by k: {}",
        t.len(),
        means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(" ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Check; 10] = [
        (1, "small example exactness", 1, c1_small_example),
        (2, "complete-table formulas", 30, c2_complete_formulas),
        (3, "gray and hilbert structure", 30, c3_structure),
        (4, "mu sandwich", 300, c4_sandwich),
        (5, "adversarial construction", 1, c5_adversarial),
        (6, "uniform table benchmark", 600, c6_uniform_benchmark),
        (7, "analytic vs empirical", 900, c7_analytic_vs_empirical),
        (8, "order inequality sampling", 120, c8_order_inequality),
        (9, "recursive suboptimality witness", 1, c9_recursive_suboptimal),
        (10, "mu vs dimension trend", 300, c10_mu_trend),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(limit) => Err(format!("over the {limit}s limit; {d}")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!("[{tag}] {id:>2} {name} ({:.2}s): {detail}", elapsed.as_secs_f64());
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
