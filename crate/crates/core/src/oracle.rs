//! Learners that need no training: the exact prefix-tree expression of a
//! finite sample and an enumerative learner for very small alphabets.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::glushkov::{accepts, count_words, is_deterministic};
use crate::regex_ast::{canonical, normalize_thm31, simplify};
use crate::{Error, Regex, Result, Sample, Symbol};

#[derive(Default)]
struct Trie {
    end: bool,
    children: BTreeMap<Symbol, Trie>,
}

impl Trie {
    fn insert(&mut self, w: &[Symbol]) {
        match w.split_first() {
            None => self.end = true,
            Some((a, rest)) => self.children.entry(a.clone()).or_default().insert(rest),
        }
    }

    /// The expression for the words below this node, excluding the empty
    /// word; `None` for a leaf.
    fn below(&self) -> Option<Regex> {
        if self.children.is_empty() {
            return None;
        }
        Some(Regex::disj(self.children.iter().map(|(a, child)| {
            let head = Regex::atom(a.clone());
            match child.below() {
                None => head,
                Some(tail) if child.end => Regex::concat([head, tail.opt()]),
                Some(tail) => Regex::concat([head, tail]),
            }
        })))
    }
}

/// A deterministic expression accepting exactly the distinct words of a
/// finite sample, read off its prefix tree.
pub fn prefix_tree_expression(sample: &Sample) -> Result<Regex> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut root = Trie::default();
    sample.words().for_each(|w| root.insert(w));
    Ok(match root.below() {
        None => Regex::Epsilon,
        Some(r) if root.end => r.opt(),
        Some(r) => r,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleOutcome {
    #[serde(serialize_with = "crate::select::serialize_display")]
    pub expr: Regex,
    /// Distinct normal-form expressions enumerated.
    pub enumerated: usize,
    /// Set when enumeration found nothing and the prefix-tree expression
    /// was returned instead.
    pub fallback: bool,
}

/// Largest number of distinct expressions the enumerative learner builds.
pub const ENUMERATION_CAP: usize = 200_000;

fn normal(r: Regex) -> Regex {
    canonical(&simplify(&normalize_thm31(&r)))
}

/// Deterministic k-occurrence expressions over `alphabet` up to `budget`
/// in length, in normal form, grouped by their occurrence vector.
fn enumerate(alphabet: &[Symbol], k: usize, budget: usize) -> Result<Vec<Regex>> {
    let n = alphabet.len();
    // Occurrence vectors in order of total size, encoded in base k + 1.
    let mut vectors: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        vectors = vectors
            .into_iter()
            .flat_map(|v| {
                (0..=k).map(move |c| {
                    let mut v = v.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    vectors.retain(|v| v.iter().any(|&c| c > 0));
    vectors.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));

    let mut by_vec: BTreeMap<Vec<usize>, Vec<Regex>> = BTreeMap::new();
    let mut total = 0;
    for v in &vectors {
        let mut found: HashSet<Regex> = HashSet::new();
        let add = |r: Regex, found: &mut HashSet<Regex>| {
            let r = normal(r);
            if r.length() <= budget && !found.contains(&r) && is_deterministic(&r) {
                found.insert(r);
            }
        };
        if v.iter().sum::<usize>() == 1 {
            let a = v.iter().position(|&c| c == 1).unwrap();
            add(Regex::atom(alphabet[a].clone()), &mut found);
        }
        for (v1, left) in by_vec.iter() {
            if v1.iter().zip(v).any(|(x, y)| x > y) {
                continue;
            }
            let v2: Vec<usize> = v.iter().zip(v1).map(|(y, x)| y - x).collect();
            let Some(right) = by_vec.get(&v2) else {
                continue;
            };
            for l in left {
                for r in right {
                    if l.length() + r.length() + 1 > budget {
                        continue;
                    }
                    add(Regex::concat([l.clone(), r.clone()]), &mut found);
                    if v1 <= &v2 {
                        add(Regex::disj([l.clone(), r.clone()]), &mut found);
                    }
                }
            }
            if total + found.len() > ENUMERATION_CAP {
                return Err(Error::Enumeration(format!(
                    "more than {ENUMERATION_CAP} expressions"
                )));
            }
        }
        let base: Vec<Regex> = found.iter().cloned().collect();
        for r in base {
            add(r.clone().opt(), &mut found);
            add(r.clone().plus(), &mut found);
            add(r.star(), &mut found);
        }
        total += found.len();
        if total > ENUMERATION_CAP {
            return Err(Error::Enumeration(format!("more than {ENUMERATION_CAP} expressions")));
        }
        let mut list: Vec<Regex> = found.into_iter().collect();
        list.sort();
        by_vec.insert(v.clone(), list);
    }
    Ok(by_vec.into_values().flatten().collect())
}

/// Among the deterministic k-occurrence expressions over the sample
/// alphabet of length at most `budget`, the consistent one with the fewest
/// words up to length `2·budget + 1`, ties going to the shorter and then
/// the lexicographically smaller expression.
///
/// Only small problems are accepted: at most three symbols, `k ≤ 2` and
/// `budget ≤ 10·k·|Σ|`. When no expression in the enumeration accepts the
/// sample, the prefix-tree expression is returned.
pub fn oracle_learn(sample: &Sample, k: usize, budget: usize) -> Result<OracleOutcome> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let alphabet: Vec<Symbol> = sample.alphabet().into_iter().collect();
    if alphabet.len() > 3 || k == 0 || k > 2 || budget > 10 * k * alphabet.len().max(1) {
        return Err(Error::InvalidConfig(format!(
            "enumeration needs |Σ| ≤ 3, 1 ≤ k ≤ 2 and budget ≤ 10·k·|Σ|; got |Σ| = {}, k = {k}, budget = {budget}",
            alphabet.len()
        )));
    }
    if alphabet.is_empty() {
        return Ok(OracleOutcome {
            expr: Regex::Epsilon,
            enumerated: 0,
            fallback: false,
        });
    }
    let fallback = |enumerated| {
        Ok(OracleOutcome {
            expr: prefix_tree_expression(sample)?,
            enumerated,
            fallback: true,
        })
    };
    let all = match enumerate(&alphabet, k, budget) {
        Ok(all) => all,
        Err(Error::Enumeration(_)) => return fallback(ENUMERATION_CAP),
        Err(e) => return Err(e),
    };
    let bound = 2 * budget + 1;
    let needs_eps = sample.words().any(Vec::is_empty);
    let mut best: Option<(BigUint, usize, String, Regex)> = None;
    for r in &all {
        if needs_eps && !r.nullable() || !sample.words().all(|w| accepts(r, w)) {
            continue;
        }
        let key = (count_words(r, bound)?.total(), r.length(), r.to_string());
        if best.as_ref().is_none_or(|b| (&key.0, key.1, &key.2) < (&b.0, b.1, &b.2)) {
            best = Some((key.0, key.1, key.2, r.clone()));
        }
    }
    match best {
        Some((_, _, _, expr)) => Ok(OracleOutcome {
            expr,
            enumerated: all.len(),
            fallback: false,
        }),
        None => fallback(all.len()),
    }
}

/// Every word over `alphabet` of length at most `n`.
pub fn all_words(alphabet: &[Symbol], n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<Symbol>| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}
