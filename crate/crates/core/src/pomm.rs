//! Partially observable Markov models over k-OAs: a state emits its label
//! and moves along an edge chosen by a row-stochastic matrix `α`.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::koa::{SINK, SRC};
use crate::sample::render_word;
use crate::{Error, Koa, Result, Sample, Symbol};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub max_iters: usize,
    /// Stop once the relative change of the log-likelihood drops to this.
    pub epsilon: f64,
    /// Rescale forward and backward vectors at every position.
    pub scaled: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_iters: 200,
            epsilon: 1e-6,
            scaled: true,
        }
    }
}

impl TrainConfig {
    pub fn iterations(n: usize) -> Self {
        TrainConfig {
            max_iters: n,
            epsilon: 0.0,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon < 0.0 || self.epsilon.is_nan() {
            return Err(Error::InvalidConfig(
                "the convergence threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Log-likelihood of the sample before each reestimation step, followed by
/// the value after the last one.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrainTrace {
    pub log_likelihoods: Vec<f64>,
}

impl TrainTrace {
    pub fn iterations(&self) -> usize {
        self.log_likelihoods.len().saturating_sub(1)
    }
}

/// A k-OA with transition probabilities. Deleted edges keep their state
/// but have `edge[s][t] == false` and `α(s, t) == 0`.
#[derive(Clone, Debug)]
pub struct Pomm {
    alphabet: Vec<Symbol>,
    labels: Vec<Symbol>,
    by_label: Vec<Vec<usize>>,
    edge: Vec<Vec<bool>>,
    alpha: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct AlphaDump<'a> {
    labels: Vec<Option<&'a Symbol>>,
    alpha: Vec<Vec<(usize, f64)>>,
}

impl Pomm {
    fn shell(g: &Koa) -> Self {
        let alphabet: Vec<Symbol> = g.alphabet().into_iter().collect();
        let label_ix: Vec<usize> = g
            .labels()
            .iter()
            .map(|a| alphabet.binary_search(a).unwrap())
            .collect();
        let mut by_label = vec![Vec::new(); alphabet.len()];
        for (i, &a) in label_ix.iter().enumerate() {
            by_label[a].push(i + 2);
        }
        let n = g.n_states();
        let mut edge = vec![vec![false; n]; n];
        for (s, t) in g.edges() {
            edge[s][t] = true;
        }
        Pomm {
            alphabet,
            labels: g.labels().to_vec(),
            by_label,
            edge,
            alpha: vec![vec![0.0; n]; n],
        }
    }

    /// Pair `g` with explicit probabilities; rows of states other than the
    /// sink must sum to one over their out-edges.
    pub fn new(g: &Koa, alpha: &BTreeMap<(usize, usize), f64>) -> Result<Self> {
        let mut p = Self::shell(g);
        for (&(s, t), &x) in alpha {
            if !g.has_edge(s, t) || !(x >= 0.0) {
                return Err(Error::InvalidConfig(format!("α({s}, {t}) = {x} is not on an edge")));
            }
            p.alpha[s][t] = x;
        }
        if let Some((s, x)) = p.row_sums().into_iter().find(|&(_, x)| (x - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidConfig(format!("row {s} of α sums to {x}")));
        }
        Ok(p)
    }

    /// The initial process for a sample: the complete k-OA over the sample
    /// alphabet, start probabilities from the first symbols of the sample
    /// and the other rows drawn from a flat Dirichlet distribution.
    pub fn init(k: usize, sample: &Sample, rng: &mut impl Rng) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let alphabet = sample.alphabet();
        let g = if alphabet.is_empty() {
            Koa::new(Vec::new(), [(SRC, SINK)])?
        } else {
            Koa::complete(&alphabet, k)?
        };
        let mut p = Self::shell(&g);
        let total = sample.len() as f64;
        let mut starts: BTreeMap<&Symbol, usize> = BTreeMap::new();
        let mut empty = 0;
        for (w, n) in sample.iter() {
            match w.first() {
                Some(a) => *starts.entry(a).or_insert(0) += n,
                None => empty += n,
            }
        }
        p.alpha[SRC][SINK] = empty as f64 / total;
        for (a, n) in starts {
            let targets: Vec<usize> = g
                .succ(SRC)
                .iter()
                .copied()
                .filter(|&t| g.label(t) == Some(a))
                .collect();
            for &t in &targets {
                p.alpha[SRC][t] = n as f64 / total / targets.len() as f64;
            }
        }
        for s in g.labeled_states() {
            let outs: Vec<usize> = g.succ(s).iter().copied().collect();
            let draws: Vec<f64> = outs.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let sum: f64 = draws.iter().sum();
            for (&t, x) in outs.iter().zip(draws) {
                p.alpha[s][t] = x / sum;
            }
        }
        Ok(p)
    }

    pub fn n_states(&self) -> usize {
        self.edge.len()
    }

    fn label(&self, s: usize) -> Option<&Symbol> {
        s.checked_sub(2).map(|i| &self.labels[i])
    }

    pub fn alpha(&self, s: usize, t: usize) -> f64 {
        self.alpha[s][t]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.edge[s][t]
    }

    /// `Σ_t α(s, t)` for every state `s` other than the sink that still
    /// has an out-edge.
    pub fn row_sums(&self) -> Vec<(usize, f64)> {
        (0..self.n_states())
            .filter(|&s| s != SINK && self.edge[s].iter().any(|&e| e))
            .map(|s| (s, self.alpha[s].iter().sum()))
            .collect()
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_error(&self) -> f64 {
        self.row_sums()
            .into_iter()
            .map(|(_, x)| (x - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The current support as a k-OA, restricted to states on a walk from
    /// source to sink.
    pub fn graph(&self) -> Result<Koa> {
        Koa::trimmed(self.labels.clone(), self.edges())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_states();
        (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .filter(|&(s, t)| self.edge[s][t])
            .collect()
    }

    /// α as JSON: per state, its label and non-zero out-probabilities.
    pub fn dump(&self) -> serde_json::Value {
        let n = self.n_states();
        serde_json::to_value(AlphaDump {
            labels: (0..n).map(|s| self.label(s)).collect(),
            alpha: (0..n)
                .map(|s| {
                    (0..n)
                        .filter(|&t| self.alpha[s][t] > 0.0)
                        .map(|t| (t, self.alpha[s][t]))
                        .collect()
                })
                .collect(),
        })
        .expect("α serializes")
    }

    fn encode(&self, w: &[Symbol]) -> Option<Vec<usize>> {
        w.iter().map(|a| self.alphabet.binary_search(a).ok()).collect()
    }

    /// `Pr[w]`, the total probability of the accepting runs of `w`.
    pub fn word_probability(&self, w: &[Symbol]) -> f64 {
        self.log_probability(w).map_or(0.0, f64::exp)
    }

    /// `ln Pr[w]`, or `None` when `Pr[w] = 0`.
    pub fn log_probability(&self, w: &[Symbol]) -> Option<f64> {
        let w = self.encode(w)?;
        self.forward(&w, true).map(|(_, ll)| ll)
    }

    /// `Σ_w n_w · ln Pr[w]` over the bag; an error names the first word of
    /// probability zero.
    pub fn log_likelihood(&self, sample: &Sample) -> Result<f64> {
        let mut ll = 0.0;
        for (w, n) in sample.iter() {
            let lp = self.log_probability(w).ok_or_else(|| Error::ZeroProbability {
                word: render_word(w),
            })?;
            ll += n as f64 * lp;
        }
        Ok(ll)
    }

    /// Forward vectors over the states carrying each position's label,
    /// rescaled to sum one when `scaled`, and `ln Pr[w]`.
    fn forward(&self, w: &[usize], scaled: bool) -> Option<(Vec<Vec<f64>>, f64)> {
        if w.is_empty() {
            let p = self.alpha[SRC][SINK];
            return (p > 0.0).then(|| (Vec::new(), p.ln()));
        }
        let mut log_p = 0.0;
        let mut fs: Vec<Vec<f64>> = Vec::with_capacity(w.len());
        for (i, &a) in w.iter().enumerate() {
            let states = &self.by_label[a];
            let mut f: Vec<f64> = match i {
                0 => states.iter().map(|&t| self.alpha[SRC][t]).collect(),
                _ => {
                    let prev_states = &self.by_label[w[i - 1]];
                    let prev = &fs[i - 1];
                    states
                        .iter()
                        .map(|&t| {
                            prev_states
                                .iter()
                                .zip(prev)
                                .map(|(&s, &x)| x * self.alpha[s][t])
                                .sum()
                        })
                        .collect()
                }
            };
            let c: f64 = f.iter().sum();
            if !(c > 0.0) {
                return None;
            }
            if scaled {
                f.iter_mut().for_each(|x| *x /= c);
                log_p += c.ln();
            }
            fs.push(f);
        }
        let last = &self.by_label[*w.last().unwrap()];
        let end: f64 = last
            .iter()
            .zip(fs.last().unwrap())
            .map(|(&s, &x)| x * self.alpha[s][SINK])
            .sum();
        (end > 0.0).then(|| (fs, log_p + end.ln()))
    }

    /// Backward vectors, each rescaled to sum one.
    fn backward(&self, w: &[usize]) -> Vec<Vec<f64>> {
        let mut bs = vec![Vec::new(); w.len()];
        for i in (0..w.len()).rev() {
            let states = &self.by_label[w[i]];
            let mut b: Vec<f64> = match i + 1 == w.len() {
                true => states.iter().map(|&s| self.alpha[s][SINK]).collect(),
                false => {
                    let next_states = &self.by_label[w[i + 1]];
                    let next = &bs[i + 1];
                    states
                        .iter()
                        .map(|&s| {
                            next_states
                                .iter()
                                .zip(next)
                                .map(|(&t, &x)| self.alpha[s][t] * x)
                                .sum()
                        })
                        .collect()
                }
            };
            let c: f64 = b.iter().sum();
            if c > 0.0 {
                b.iter_mut().for_each(|x| *x /= c);
            }
            bs[i] = b;
        }
        bs
    }

    /// Add the posterior transition counts of `w`, weighted by `n`.
    fn accumulate(&self, w: &[usize], n: f64, fs: &[Vec<f64>], counts: &mut [Vec<f64>]) {
        if w.is_empty() {
            counts[SRC][SINK] += n;
            return;
        }
        let bs = self.backward(w);
        let mut add = |pairs: Vec<(usize, usize, f64)>| {
            let z: f64 = pairs.iter().map(|p| p.2).sum();
            if z > 0.0 {
                for (s, t, x) in pairs {
                    counts[s][t] += n * x / z;
                }
            }
        };
        let first = &self.by_label[w[0]];
        add(first
            .iter()
            .zip(&bs[0])
            .map(|(&t, &b)| (SRC, t, self.alpha[SRC][t] * b))
            .collect());
        for i in 0..w.len() - 1 {
            let (from, to) = (&self.by_label[w[i]], &self.by_label[w[i + 1]]);
            let mut pairs = Vec::with_capacity(from.len() * to.len());
            for (&s, &f) in from.iter().zip(&fs[i]) {
                for (&t, &b) in to.iter().zip(&bs[i + 1]) {
                    pairs.push((s, t, f * self.alpha[s][t] * b));
                }
            }
            add(pairs);
        }
        let last = &self.by_label[w[w.len() - 1]];
        add(last
            .iter()
            .zip(fs.last().unwrap())
            .map(|(&s, &f)| (s, SINK, f * self.alpha[s][SINK]))
            .collect());
    }

    /// One expectation step; returns the log-likelihood of the current
    /// parameters and the expected transition counts.
    fn expect(&self, sample: &Sample, scaled: bool) -> Result<(f64, Vec<Vec<f64>>)> {
        let n = self.n_states();
        let mut counts = vec![vec![0.0; n]; n];
        let mut ll = 0.0;
        for (word, m) in sample.iter() {
            let zero = || Error::ZeroProbability {
                word: render_word(word),
            };
            let w = self.encode(word).ok_or_else(zero)?;
            let (fs, lp) = self.forward(&w, scaled).ok_or_else(zero)?;
            ll += m as f64 * lp;
            self.accumulate(&w, m as f64, &fs, &mut counts);
        }
        Ok((ll, counts))
    }

    fn maximize(&mut self, counts: &[Vec<f64>]) {
        for (s, row) in counts.iter().enumerate() {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                for (t, &c) in row.iter().enumerate() {
                    if self.edge[s][t] {
                        self.alpha[s][t] = c / total;
                    }
                }
            }
        }
    }

    /// Baum-Welch reestimation of α on the existing edges.
    pub fn baum_welch(&mut self, sample: &Sample, cfg: &TrainConfig) -> Result<TrainTrace> {
        cfg.validate()?;
        let mut trace = TrainTrace::default();
        for _ in 0..cfg.max_iters {
            let (ll, counts) = self.expect(sample, cfg.scaled)?;
            if let Some(&prev) = trace.log_likelihoods.last() {
                if (ll - prev).abs() <= cfg.epsilon * prev.abs() {
                    trace.log_likelihoods.push(ll);
                    return Ok(trace);
                }
            }
            trace.log_likelihoods.push(ll);
            self.maximize(&counts);
        }
        trace.log_likelihoods.push(self.expect(sample, cfg.scaled)?.0);
        Ok(trace)
    }

    fn accepts_all(&self, sample: &Sample) -> Result<()> {
        let g = Koa::trimmed(self.labels.clone(), self.edges()).ok();
        for w in sample.words() {
            if !g.as_ref().is_some_and(|g| g.accepts(w)) {
                return Err(Error::WordRejected {
                    word: render_word(w),
                });
            }
        }
        Ok(())
    }

    /// Turn the process into a deterministic k-OA. States are visited
    /// breadth-first from the source; for every symbol with several
    /// successors only the most probable one is kept (ties go to the
    /// smallest state), it receives the removed probability mass and the
    /// process is retrained for `bw_iters` iterations (`None` trains to
    /// convergence). Fails as soon as a sample word is no longer accepted
    /// or loses all probability.
    pub fn disambiguate(mut self, sample: &Sample, bw_iters: Option<usize>) -> Result<Koa> {
        let cfg = match bw_iters {
            Some(n) => TrainConfig::iterations(n),
            None => TrainConfig::default(),
        };
        let n = self.n_states();
        let mut queued = vec![false; n];
        queued[SRC] = true;
        queued[SINK] = true;
        let mut queue = VecDeque::from([SRC]);
        while let Some(s) = queue.pop_front() {
            for a in 0..self.alphabet.len() {
                let out: Vec<usize> = self.by_label[a]
                    .iter()
                    .copied()
                    .filter(|&t| self.edge[s][t])
                    .collect();
                if out.len() < 2 {
                    continue;
                }
                let best = out
                    .iter()
                    .copied()
                    .fold(out[0], |b, t| if self.alpha[s][t] > self.alpha[s][b] { t } else { b });
                let mass: f64 = out.iter().map(|&t| self.alpha[s][t]).sum();
                for &t in &out {
                    if t != best {
                        self.edge[s][t] = false;
                        self.alpha[s][t] = 0.0;
                    }
                }
                self.alpha[s][best] = mass;
                self.accepts_all(sample)?;
                if cfg.max_iters > 0 {
                    self.baum_welch(sample, &cfg)?;
                }
            }
            for t in 0..n {
                if self.edge[s][t] && !queued[t] {
                    queued[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let g = self.graph()?;
        debug_assert!(g.is_deterministic());
        Ok(g)
    }
}

/// Learn a deterministic k-OA from a sample: train the initial process,
/// disambiguate it and prune it against the sample.
pub fn ikoa(
    sample: &Sample,
    k: usize,
    train: &TrainConfig,
    bw_iters: Option<usize>,
    rng: &mut impl Rng,
) -> Result<Koa> {
    let mut p = Pomm::init(k, sample, rng)?;
    p.baum_welch(sample, train)?;
    p.disambiguate(sample, bw_iters)?.prune(sample)
}

/// Default number of retraining iterations per disambiguation step.
pub fn default_bw_iters(alphabet_size: usize) -> usize {
    if alphabet_size <= 7 {
        2
    } else {
        3
    }
}
