//! The top-level inference loop: learn k-OAs for increasing `k` from
//! several random starts, translate them, keep the deterministic results
//! and pick the best.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::glushkov::{accepts, equivalent, is_deterministic};
use crate::pomm::{default_bw_iters, ikoa, TrainConfig};
use crate::regex_ast::simplify;
use crate::rewrite::koa_to_kore_report;
use crate::sample::render_word;
use crate::select::{best, Candidate, Measure};
use crate::{Error, Koa, Regex, Result, Sample};

pub use crate::oracle::{oracle_learn, prefix_tree_expression, OracleOutcome};

/// Retraining iterations after each disambiguation step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BwIters {
    /// 2 for alphabets of at most 7 symbols, 3 otherwise.
    #[default]
    Auto,
    Fixed(usize),
    /// Train to convergence.
    Converge,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InferConfig {
    pub kmax: usize,
    pub restarts: usize,
    pub bw_iters: BwIters,
    /// Training of the initial process before disambiguation.
    #[serde(skip)]
    pub train: TrainConfig,
    pub measure: Measure,
    pub seed: u64,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            kmax: 4,
            restarts: 10,
            bw_iters: BwIters::Auto,
            train: TrainConfig::default(),
            measure: Measure::Size,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    /// Produced a deterministic expression.
    Ok {
        #[serde(serialize_with = "crate::select::serialize_display")]
        expr: Regex,
        repairs: usize,
    },
    /// The translation was not deterministic and was discarded.
    Nondeterministic {
        #[serde(serialize_with = "crate::select::serialize_display")]
        expr: Regex,
    },
    /// Disambiguation or scoring failed.
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub k: usize,
    pub restart: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub status: RunStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub best: Candidate,
    /// Distinct languages found, each with its best representative.
    pub candidates: Vec<Candidate>,
    pub runs: Vec<RunReport>,
    pub measure: Measure,
}

/// Seed of restart `n` at bound `k`, independent of scheduling.
pub fn derived_seed(seed: u64, k: usize, n: usize) -> u64 {
    let mut x = seed ^ ((k as u64) << 32 | n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn bw_iters(cfg: &InferConfig, sample: &Sample) -> Option<usize> {
    match cfg.bw_iters {
        BwIters::Auto => Some(default_bw_iters(sample.alphabet().len())),
        BwIters::Fixed(n) => Some(n),
        BwIters::Converge => None,
    }
}

/// One restart: learn a k-OA and translate it.
pub fn learn_koa(sample: &Sample, k: usize, cfg: &InferConfig, seed: u64) -> Result<Koa> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ikoa(sample, k, &cfg.train, bw_iters(cfg, sample), &mut rng)
}

fn run_one(sample: &Sample, k: usize, cfg: &InferConfig, seed: u64) -> RunStatus {
    let g = match learn_koa(sample, k, cfg, seed) {
        Ok(g) => g,
        Err(e) => return RunStatus::Failed { reason: e.to_string() },
    };
    let (expr, repairs) = koa_to_kore_report(&g);
    let expr = simplify(&expr);
    if let Some(w) = sample.words().find(|w| !accepts(&expr, w)) {
        return RunStatus::Failed {
            reason: format!("internal error: {expr} rejects sample word {:?}", render_word(w)),
        };
    }
    if is_deterministic(&expr) {
        RunStatus::Ok { expr, repairs }
    } else {
        RunStatus::Nondeterministic { expr }
    }
}

/// Infer a deterministic expression from a non-empty sample.
pub fn idregex(sample: &Sample, cfg: &InferConfig) -> Result<Outcome> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if cfg.kmax == 0 || cfg.restarts == 0 {
        return Err(Error::InvalidConfig("kmax and restarts must be at least 1".into()));
    }
    if sample.alphabet().is_empty() {
        let eps = Candidate::new(Regex::Epsilon, sample)?;
        return Ok(Outcome {
            best: eps.clone(),
            candidates: vec![eps],
            runs: Vec::new(),
            measure: cfg.measure,
        });
    }
    let grid: Vec<(usize, usize)> = (1..=cfg.kmax)
        .flat_map(|k| (0..cfg.restarts).map(move |n| (k, n)))
        .collect();
    let runs: Vec<RunReport> = grid
        .par_iter()
        .map(|&(k, restart)| {
            let seed = derived_seed(cfg.seed, k, restart);
            RunReport {
                k,
                restart,
                seed,
                status: run_one(sample, k, cfg, seed),
            }
        })
        .collect();

    let mut candidates: Vec<Candidate> = Vec::new();
    let mut runs = runs;
    for run in &mut runs {
        let RunStatus::Ok { expr, .. } = &run.status else {
            continue;
        };
        let cand = match Candidate::new(expr.clone(), sample) {
            Ok(c) => c,
            Err(e) => {
                run.status = RunStatus::Failed { reason: e.to_string() };
                continue;
            }
        };
        let mut same = None;
        for (i, c) in candidates.iter().enumerate() {
            if equivalent(&c.expr, &cand.expr)? {
                same = Some(i);
                break;
            }
        }
        match same {
            Some(i) => {
                if cand.cmp_by(&candidates[i], cfg.measure).is_lt() {
                    candidates[i] = cand;
                }
            }
            None => candidates.push(cand),
        }
    }
    let best = best(&candidates, cfg.measure)?.clone();
    Ok(Outcome {
        best,
        candidates,
        runs,
        measure: cfg.measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex_ast::parse;

    fn p(s: &str) -> Regex {
        parse(s).unwrap()
    }

    #[test]
    fn epsilon_sample() {
        let out = idregex(&Sample::from_strs([""]), &InferConfig::default()).unwrap();
        assert_eq!(out.best.expr, Regex::Epsilon);
        assert_eq!(out.best.expr.to_string(), "EPS");
    }

    #[test]
    fn recovers_a_small_sore() {
        let s = Sample::from_strs(["a b c", "a c", "a b b c", "a c", "a b b b c", "a b b b b c"]);
        let cfg = InferConfig {
            kmax: 2,
            restarts: 3,
            ..InferConfig::default()
        };
        let out = idregex(&s, &cfg).unwrap();
        assert!(equivalent(&out.best.expr, &p("a b* c")).unwrap(), "{}", out.best.expr);
        assert!(s.words().all(|w| accepts(&out.best.expr, w)));
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let s = Sample::from_strs(["a b", "a a b", "b", "a b b"]);
        let cfg = InferConfig {
            kmax: 2,
            restarts: 4,
            seed: 9,
            ..InferConfig::default()
        };
        assert_eq!(idregex(&s, &cfg).unwrap(), idregex(&s, &cfg).unwrap());
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert_eq!(idregex(&Sample::new(), &InferConfig::default()), Err(Error::EmptySample));
    }
}
