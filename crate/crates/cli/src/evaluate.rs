use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rexinfer::driver::derived_seed;
use rexinfer::glushkov::{check_deterministic, equivalent};
use rexinfer::regex_ast::parse;
use rexinfer::select::language_size;
use rexinfer::Regex;
use serde::Serialize;

use crate::generate::SampleMode;
use crate::infer::{infer, InferOpts};
use crate::{read_input, write_output};

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Corpus file: one expression per line, `#` starts a comment line.
    pub corpus: PathBuf,
    #[command(flatten)]
    pub opts: InferOpts,
    /// Sample size per target.
    #[arg(long, default_value_t = 300)]
    pub size: usize,
    /// Draw covering samples.
    #[arg(long, conflicts_with = "coverage")]
    pub covering: bool,
    /// Draw samples with this fraction of witnessed Glushkov edges.
    #[arg(long)]
    pub coverage: Option<f64>,
    /// Write per-target results as JSON.
    #[arg(long)]
    pub json_report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Entry {
    target: String,
    alphabet: usize,
    kappa: f64,
    #[serde(serialize_with = "decimal")]
    language_size: BigUint,
    inferred: Option<String>,
    error: Option<String>,
    success: bool,
}

fn decimal<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

fn read_corpus(text: &str) -> Result<Vec<Regex>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r = parse(line).with_context(|| format!("corpus line {}", i + 1))?;
        check_deterministic(&r).with_context(|| format!("corpus line {}", i + 1))?;
        out.push(r);
    }
    Ok(out)
}

fn evaluate_one(i: usize, r: &Regex, args: &EvaluateArgs, mode: &SampleMode) -> Result<Entry> {
    let stats = r.stats();
    let seed = derived_seed(args.opts.seed, 0, i);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = mode.draw(r, args.size, &mut rng)?;
    let opts = InferOpts { seed, ..args.opts.clone() };
    let (inferred, error, success) = match infer(&sample, &opts) {
        Ok(out) => {
            let ok = equivalent(&out.expr, r)?;
            (Some(out.expr.to_string()), None, ok)
        }
        Err(e) => (None, Some(format!("{e:#}")), false),
    };
    Ok(Entry {
        target: r.to_string(),
        alphabet: stats.alphabet.len(),
        kappa: stats.kappa().unwrap_or(0.0),
        language_size: language_size(r)?,
        inferred,
        error,
        success,
    })
}

#[derive(Default)]
struct Tally {
    total: usize,
    success: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.success += ok as usize;
    }

    fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.success as f64 / self.total as f64
        }
    }
}

fn table<K: std::fmt::Display>(out: &mut String, title: &str, rows: &BTreeMap<K, Tally>) {
    let _ = writeln!(out, "\n{title:<14} {:>6} {:>8}", "n", "success");
    for (k, t) in rows {
        let _ = writeln!(out, "{:<14} {:>6} {:>7.1}%", k.to_string(), t.total, t.rate());
    }
}

/// κ bucket `[lo, lo + 0.2)` as its lower bound in tenths.
fn kappa_bucket(kappa: f64) -> u32 {
    ((kappa * 10.0 + 1e-9) as u32) / 2 * 2
}

struct Bucket(u32);

impl std::fmt::Display for Bucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lo = self.0 as f64 / 10.0;
        write!(f, "[{lo:.1},{:.1})", lo + 0.2)
    }
}

fn render(entries: &[Entry]) -> String {
    let mut all = Tally::default();
    let mut by_sigma: BTreeMap<usize, Tally> = BTreeMap::new();
    let mut by_kappa: BTreeMap<u32, Tally> = BTreeMap::new();
    let mut by_decile: BTreeMap<usize, Tally> = BTreeMap::new();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| entries[a].language_size.cmp(&entries[b].language_size));
    for (rank, &i) in order.iter().enumerate() {
        let e = &entries[i];
        all.add(e.success);
        by_sigma.entry(e.alphabet).or_default().add(e.success);
        by_kappa.entry(kappa_bucket(e.kappa)).or_default().add(e.success);
        by_decile.entry(rank * 10 / entries.len() + 1).or_default().add(e.success);
    }
    let mut out = String::new();
    let _ = writeln!(out, "targets: {}, recovered: {} ({:.1}%)", all.total, all.success, all.rate());
    table(&mut out, "|Σ|", &by_sigma);
    table(&mut out, "size decile", &by_decile);
    let by_kappa: BTreeMap<String, Tally> = by_kappa.into_iter().map(|(b, t)| (Bucket(b).to_string(), t)).collect();
    table(&mut out, "κ", &by_kappa);
    out
}

pub fn run(args: &EvaluateArgs) -> Result<()> {
    let corpus = read_corpus(&read_input(&args.corpus)?)?;
    let mode = SampleMode::new(args.covering, args.coverage)?;
    let entries: Vec<Entry> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, r)| evaluate_one(i, r, args, &mode))
        .collect::<Result<_>>()?;
    if let Some(p) = &args.json_report {
        write_output(Some(p), &serde_json::to_string_pretty(&entries)?)?;
    }
    print!("{}", render(&entries));
    Ok(())
}
