use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use rexinfer::driver::{idregex, learn_koa, oracle_learn, BwIters, InferConfig, RunStatus};
use rexinfer::glushkov::{accepts, glushkov_automaton};
use rexinfer::koa::coverage;
use rexinfer::select::Measure;
use rexinfer::{Koa, Regex, Sample};
use serde_json::{json, Value};

use crate::{read_input, write_output, Internal};

/// Options shared by every command that runs inference.
#[derive(Args, Clone, Debug)]
pub struct InferOpts {
    /// Largest occurrence bound k tried (default 4, or 1 with --oracle).
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Random restarts per k.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Baum-Welch iterations after each disambiguation step: a number,
    /// `auto` (2 for at most 7 symbols, else 3) or `converge`.
    #[arg(long, default_value = "auto", value_parser = parse_bw_iters)]
    pub bw_iters: BwIters,
    /// Convergence threshold on the relative log-likelihood change of the
    /// initial training.
    #[arg(long)]
    pub bw_epsilon: Option<f64>,
    /// Candidate selection measure: `size` or `mdl`.
    #[arg(long, default_value = "size")]
    pub measure: Measure,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the exhaustive enumerative learner (|Σ| ≤ 3, k ≤ 2 only).
    #[arg(long)]
    pub oracle: bool,
    /// Length budget of the enumerative learner.
    #[arg(long, default_value_t = 16)]
    pub oracle_budget: usize,
}

fn parse_bw_iters(s: &str) -> std::result::Result<BwIters, String> {
    match s {
        "auto" => Ok(BwIters::Auto),
        "converge" => Ok(BwIters::Converge),
        n => n
            .parse()
            .map(BwIters::Fixed)
            .map_err(|_| format!("expected a number, `auto` or `converge`, got {n:?}")),
    }
}

impl InferOpts {
    pub fn config(&self) -> InferConfig {
        let mut cfg = InferConfig {
            kmax: self.kmax.unwrap_or(4),
            restarts: self.restarts,
            bw_iters: self.bw_iters,
            measure: self.measure,
            seed: self.seed,
            ..InferConfig::default()
        };
        if let Some(eps) = self.bw_epsilon {
            cfg.train.epsilon = eps;
        }
        cfg
    }
}

pub struct Inferred {
    pub expr: Regex,
    pub report: Value,
    /// Automaton behind the chosen expression.
    pub koa: Koa,
}

/// Run the configured learner and verify that the result accepts the sample.
pub fn infer(sample: &Sample, opts: &InferOpts) -> Result<Inferred> {
    let start = Instant::now();
    let (expr, mut report, koa) = if opts.oracle {
        let k = opts.kmax.unwrap_or(1);
        let out = oracle_learn(sample, k, opts.oracle_budget)?;
        let koa = glushkov_automaton(&out.expr)?;
        let report = json!({
            "method": "oracle",
            "k": k,
            "budget": opts.oracle_budget,
            "enumerated": out.enumerated,
            "fallback": out.fallback,
        });
        (out.expr, report, koa)
    } else {
        let cfg = opts.config();
        let out = idregex(sample, &cfg)?;
        let koa = match out.runs.iter().find(|r| matches!(&r.status, RunStatus::Ok { expr, .. } if *expr == out.best.expr)) {
            Some(run) => learn_koa(sample, run.k, &cfg, run.seed)?,
            None => glushkov_automaton(&out.best.expr)?,
        };
        let mut by_k: BTreeMap<usize, Vec<&rexinfer::select::Candidate>> = BTreeMap::new();
        for c in &out.candidates {
            by_k.entry(c.k).or_default().push(c);
        }
        let report = json!({
            "method": "idregex",
            "config": cfg,
            "best": out.best,
            "candidates_by_k": by_k,
            "runs": out.runs,
        });
        (out.best.expr, report, koa)
    };
    if let Some(w) = sample.words().find(|w| !accepts(&expr, w)) {
        let w: Vec<&str> = w.iter().map(|a| a.as_str()).collect();
        return Err(Internal(format!("{expr} rejects the sample word {:?}", w.join(" "))).into());
    }
    let cov = coverage(&expr, sample)?;
    report["expression"] = json!(expr.to_string());
    report["sample"] = json!({
        "words": sample.len(),
        "distinct": sample.distinct(),
        "alphabet": sample.alphabet(),
    });
    report["coverage"] = json!({
        "witnessed": cov.witnessed,
        "total": cov.total,
        "fraction": cov.fraction(),
    });
    report["wall_time_ms"] = json!(start.elapsed().as_millis() as u64);
    Ok(Inferred { expr, report, koa })
}

#[derive(Args, Debug)]
pub struct InferArgs {
    /// Sample file: one word per line, symbols separated by spaces.
    pub sample: PathBuf,
    #[command(flatten)]
    pub opts: InferOpts,
    /// Write the automaton behind the result as JSON.
    #[arg(long)]
    pub dump_automaton: Option<PathBuf>,
    /// Write a JSON report of all runs and candidates.
    #[arg(long)]
    pub json_report: Option<PathBuf>,
}

pub fn run(args: &InferArgs) -> Result<()> {
    let text = read_input(&args.sample)?;
    let sample = Sample::parse_lines(&text).with_context(|| format!("reading {}", args.sample.display()))?;
    let out = infer(&sample, &args.opts)?;
    if let Some(p) = &args.dump_automaton {
        write_output(Some(p), &serde_json::to_string_pretty(&out.koa)?)?;
    }
    if let Some(p) = &args.json_report {
        write_output(Some(p), &serde_json::to_string_pretty(&out.report)?)?;
    }
    println!("{}", out.expr);
    Ok(())
}
