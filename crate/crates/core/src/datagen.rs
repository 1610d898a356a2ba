//! Random target expressions, stochastic sample generation and the hard
//! expression families used in experiments.

use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::glushkov::{count_words, is_deterministic};
use crate::regex_ast::{normalize_thm31, simplify};
use crate::{Error, Regex, Result, Sample, Symbol, Word};

/// Relative weights of the operators used by [`gen_expression`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpProbs {
    pub concat: f64,
    pub disj: f64,
    pub optional: f64,
    pub star: f64,
    pub plus: f64,
}

impl Default for OpProbs {
    fn default() -> Self {
        OpProbs {
            concat: 7.0 / 20.0,
            disj: 7.0 / 20.0,
            optional: 0.1,
            star: 0.1,
            plus: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub alphabet: Vec<Symbol>,
    /// How many times each alphabet symbol occurs in the expression.
    pub occurrences: Vec<usize>,
    pub op_probs: OpProbs,
    /// Draws rejected for non-determinism before giving up.
    pub max_attempts: usize,
}

impl GenConfig {
    pub fn new(alphabet: Vec<Symbol>, occurrences: Vec<usize>) -> Self {
        GenConfig {
            alphabet,
            occurrences,
            op_probs: OpProbs::default(),
            max_attempts: 10_000,
        }
    }

    /// Every symbol of `alphabet` occurring exactly once.
    pub fn sore(alphabet: Vec<Symbol>) -> Self {
        let n = alphabet.len();
        GenConfig::new(alphabet, vec![1; n])
    }

    fn validate(&self) -> Result<()> {
        let p = &self.op_probs;
        let probs = [p.concat, p.disj, p.optional, p.star, p.plus];
        if probs.iter().any(|&x| !(x >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig("operator probabilities must sum to 1".into()));
        }
        if self.alphabet.len() != self.occurrences.len() {
            return Err(Error::InvalidConfig(
                "one occurrence count is needed per alphabet symbol".into(),
            ));
        }
        if self.occurrences.iter().sum::<usize>() == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(())
    }
}

/// `n` distinct single-letter symbols `a, b, c, …`, continuing with `s26,
/// s27, …` past the Latin alphabet.
pub fn letters(n: usize) -> Vec<Symbol> {
    (0..n)
        .map(|i| match i {
            0..=25 => Symbol::new(&((b'a' + i as u8) as char).to_string()),
            _ => Symbol::new(&format!("s{i}")),
        })
        .collect()
}

enum Op {
    Concat,
    Disj,
    Optional,
    Star,
    Plus,
}

fn draw_op(p: &OpProbs, rng: &mut impl Rng) -> Op {
    let mut x = rng.random::<f64>();
    for (w, op) in [
        (p.concat, Op::Concat),
        (p.disj, Op::Disj),
        (p.optional, Op::Optional),
        (p.star, Op::Star),
    ] {
        if x < w {
            return op;
        }
        x -= w;
    }
    Op::Plus
}

fn build(leaves: &mut [Symbol], p: &OpProbs, rng: &mut impl Rng) -> Regex {
    let op = draw_op(p, rng);
    match op {
        Op::Optional => build(leaves, p, rng).opt(),
        Op::Star => build(leaves, p, rng).star(),
        Op::Plus => build(leaves, p, rng).plus(),
        _ if leaves.len() == 1 => Regex::Atom(leaves[0].clone()),
        Op::Concat | Op::Disj => {
            leaves.shuffle(rng);
            let cut = rng.random_range(1..leaves.len());
            let (l, r) = leaves.split_at_mut(cut);
            let parts = [build(l, p, rng), build(r, p, rng)];
            match op {
                Op::Concat => Regex::concat(parts),
                _ => Regex::disj(parts),
            }
        }
    }
}

/// A random simplified deterministic expression in which symbol `i` of the
/// alphabet occurs `occurrences[i]` times. Expressions are grown top-down
/// with operators drawn from the configured weights; the leaf multiset is
/// split at a uniformly random point at every binary node. Non-deterministic
/// draws are rejected.
pub fn gen_expression(cfg: &GenConfig, rng: &mut impl Rng) -> Result<Regex> {
    cfg.validate()?;
    let leaves: Vec<Symbol> = cfg
        .alphabet
        .iter()
        .zip(&cfg.occurrences)
        .flat_map(|(a, &n)| std::iter::repeat_n(a.clone(), n))
        .collect();
    for _ in 0..cfg.max_attempts {
        let mut leaves = leaves.clone();
        let r = simplify(&build(&mut leaves, &cfg.op_probs, rng));
        if is_deterministic(&r) {
            return Ok(r);
        }
    }
    Err(Error::Generation(format!(
        "no deterministic expression in {} attempts",
        cfg.max_attempts
    )))
}

/// `|L^{≤n}(r)| / |Σ^{≤n}|` over the alphabet of `r`, with `n = 2·occ(r)+1`.
pub fn language_fraction(r: &Regex) -> Result<f64> {
    let sigma = r.alphabet().len();
    let n = 2 * r.stats().occ + 1;
    let count = count_words(r, n)?.total();
    let all: num_bigint::BigUint = (0..=n).map(|i| num_bigint::BigUint::from(sigma).pow(i as u32)).sum();
    Ok(count.to_f64().unwrap_or(f64::INFINITY) / all.to_f64().unwrap_or(f64::INFINITY))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleGenConfig {
    pub size: usize,
    /// Probability of another iteration after each pass through `r+`.
    pub loop_continue: f64,
    /// Probability of taking the operand of `r?`.
    pub optional_take: f64,
}

impl SampleGenConfig {
    pub fn with_size(size: usize) -> Self {
        SampleGenConfig {
            size,
            loop_continue: 2.0 / 3.0,
            optional_take: 0.5,
        }
    }
}

impl Default for SampleGenConfig {
    fn default() -> Self {
        Self::with_size(100)
    }
}

fn walk(r: &Regex, cfg: &SampleGenConfig, rng: &mut impl Rng, out: &mut Word) {
    match r {
        Regex::Empty => unreachable!("empty language removed before sampling"),
        Regex::Epsilon => {}
        Regex::Atom(a) => out.push(a.clone()),
        Regex::Concat(cs) => cs.iter().for_each(|c| walk(c, cfg, rng, out)),
        Regex::Disj(cs) => walk(&cs[rng.random_range(0..cs.len())], cfg, rng, out),
        Regex::Optional(c) => {
            if rng.random_bool(cfg.optional_take) {
                walk(c, cfg, rng, out);
            }
        }
        Regex::Plus(c) => loop {
            walk(c, cfg, rng, out);
            if !rng.random_bool(cfg.loop_continue) {
                break;
            }
        },
    }
}

/// Draw `cfg.size` words from `L(r)` by a random walk over the structure of
/// `r`: disjunction operands are equally likely, optionals are taken with
/// probability `optional_take` and loops repeat with probability
/// `loop_continue`.
pub fn gen_sample(r: &Regex, cfg: &SampleGenConfig, rng: &mut impl Rng) -> Result<Sample> {
    for p in [cfg.loop_continue, cfg.optional_take] {
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(Error::InvalidConfig("probabilities must lie in (0, 1)".into()));
        }
    }
    let normalized;
    let r = if r.contains_empty() {
        normalized = normalize_thm31(r);
        if normalized == Regex::Empty {
            return Err(Error::EmptyLanguage);
        }
        &normalized
    } else {
        r
    };
    let mut s = Sample::new();
    for _ in 0..cfg.size {
        let mut w = Vec::new();
        walk(r, cfg, rng, &mut w);
        s.insert(w);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `(a1 a2 | a3 | … | an)+`
    R1,
    /// `(a2 | … | an)+ a1 (a2 | … | an)+`
    R2,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r1" => Ok(Family::R1),
            "r2" => Ok(Family::R2),
            _ => Err(Error::InvalidConfig(format!("unknown family {s:?}, expected r1 or r2"))),
        }
    }
}

/// Expressions whose characteristic samples grow exponentially in `n`.
pub fn hard_family(n: usize, which: Family) -> Result<Regex> {
    let a = |i: usize| Regex::atom(Symbol::new(&format!("a{i}")));
    match which {
        Family::R1 => {
            if n < 3 {
                return Err(Error::InvalidConfig("r1 needs n ≥ 3".into()));
            }
            let head = Regex::concat([a(1), a(2)]);
            Ok(Regex::disj(std::iter::once(head).chain((3..=n).map(a))).plus())
        }
        Family::R2 => {
            if n < 2 {
                return Err(Error::InvalidConfig("r2 needs n ≥ 2".into()));
            }
            let rest = || Regex::disj((2..=n).map(a)).plus();
            Ok(Regex::concat([rest(), a(1), rest()]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glushkov::accepts;
    use crate::regex_ast::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn hard_family_shapes() {
        assert_eq!(
            hard_family(4, Family::R1).unwrap(),
            parse("(a1 a2 | a3 | a4)+").unwrap()
        );
        assert_eq!(
            hard_family(3, Family::R2).unwrap(),
            parse("(a2 | a3)+ a1 (a2 | a3)+").unwrap()
        );
        assert!(is_deterministic(&hard_family(8, Family::R1).unwrap()));
        assert!(is_deterministic(&hard_family(5, Family::R2).unwrap()));
        assert!(hard_family(2, Family::R1).is_err());
        assert!(hard_family(1, Family::R2).is_err());
    }

    #[test]
    fn generated_expressions_are_deterministic_kores() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = GenConfig::new(letters(5), vec![2, 1, 2, 1, 1]);
        for _ in 0..200 {
            let r = gen_expression(&cfg, &mut rng).unwrap();
            assert!(is_deterministic(&r), "{r}");
            assert!(r.is_k_ore(2), "{r}");
            assert_eq!(r.stats().occ, 7);
        }
    }

    #[test]
    fn single_leaf_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = GenConfig::sore(letters(1));
        let shapes: BTreeSet<String> = (0..300)
            .map(|_| gen_expression(&cfg, &mut rng).unwrap().to_string())
            .collect();
        let allowed: BTreeSet<String> = ["a", "a?", "a+", "(a+)?"].iter().map(|s| s.to_string()).collect();
        assert_eq!(shapes, allowed);
    }

    #[test]
    fn samples_stay_in_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = parse("((d e b a b) | c)* a").unwrap();
        let s = gen_sample(&r, &SampleGenConfig::with_size(200), &mut rng).unwrap();
        assert_eq!(s.len(), 200);
        assert!(s.words().all(|w| accepts(&r, w)));

        let s = gen_sample(&parse("a").unwrap(), &SampleGenConfig::with_size(3), &mut rng).unwrap();
        assert_eq!(s, Sample::from_strs(["a", "a", "a"]));
    }

    #[test]
    fn loop_lengths_are_geometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let size = 4000;
        let s = gen_sample(&parse("a+").unwrap(), &SampleGenConfig::with_size(size), &mut rng).unwrap();
        let mean = s.iter().map(|(w, n)| (w.len() * n) as f64).sum::<f64>() / size as f64;
        // Geometric with success 1/3: mean 3, variance 6.
        let tol = 3.0 * 6f64.sqrt() / (size as f64).sqrt();
        assert!((mean - 3.0).abs() < tol, "{mean}");
    }

    #[test]
    fn disjunction_branches_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let size = 4000;
        let s = gen_sample(&parse("a | b").unwrap(), &SampleGenConfig::with_size(size), &mut rng).unwrap();
        let a = s.multiplicity(&[Symbol::new("a")]) as f64 / size as f64;
        let tol = 3.0 * (0.25f64 / size as f64).sqrt();
        assert!((a - 0.5).abs() < tol, "{a}");
    }

    #[test]
    fn language_fraction_bounds() {
        let f = language_fraction(&parse("(a | b)*").unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        // a: n = 3, one word out of 1 + 1 + 1 + 1.
        let f = language_fraction(&parse("a").unwrap()).unwrap();
        assert!((f - 0.25).abs() < 1e-12);
    }
}
