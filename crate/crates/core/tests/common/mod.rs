#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rexinfer::{Regex, Symbol};

pub fn syms(n: usize) -> Vec<Symbol> {
    (0..n)
        .map(|i| Symbol::new(&((b'a' + i as u8) as char).to_string()))
        .collect()
}

pub fn word(s: &str) -> Vec<Symbol> {
    s.chars().map(|c| Symbol::new(&c.to_string())).collect()
}

/// End positions `j` such that `r` matches `w[i..j]`, computed directly from
/// the semantics of each operator.
fn ends(r: &Regex, w: &[Symbol], i: usize) -> BTreeSet<usize> {
    match r {
        Regex::Empty => BTreeSet::new(),
        Regex::Epsilon => BTreeSet::from([i]),
        Regex::Atom(a) => match w.get(i) {
            Some(b) if b == a => BTreeSet::from([i + 1]),
            _ => BTreeSet::new(),
        },
        Regex::Concat(cs) => {
            let mut cur = BTreeSet::from([i]);
            for c in cs {
                cur = cur.iter().flat_map(|&j| ends(c, w, j)).collect();
            }
            cur
        }
        Regex::Disj(cs) => cs.iter().flat_map(|c| ends(c, w, i)).collect(),
        Regex::Optional(c) => {
            let mut out = ends(c, w, i);
            out.insert(i);
            out
        }
        Regex::Plus(c) => {
            let mut out = BTreeSet::new();
            let mut frontier = ends(c, w, i);
            while let Some(j) = frontier.pop_first() {
                if out.insert(j) {
                    frontier.extend(ends(c, w, j).into_iter().filter(|k| !out.contains(k)));
                }
            }
            out
        }
    }
}

/// Naive membership test, independent of the automaton construction.
pub fn naive_accepts(r: &Regex, w: &[Symbol]) -> bool {
    ends(r, w, 0).contains(&w.len())
}

/// Every word over `alphabet` of length at most `n`, shortest first.
pub fn words_upto(alphabet: &[Symbol], n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// An arbitrary expression (deterministic or not) over `alphabet` with
/// about `leaves` leaves; includes ε and, rarely, ∅.
pub fn random_regex(alphabet: &[Symbol], leaves: usize, rng: &mut impl Rng) -> Regex {
    if leaves <= 1 {
        return match rng.random_range(0..20) {
            0 => Regex::Epsilon,
            1 if rng.random_bool(0.3) => Regex::Empty,
            _ => Regex::Atom(alphabet[rng.random_range(0..alphabet.len())].clone()),
        };
    }
    match rng.random_range(0..10) {
        0..=3 => {
            let cut = rng.random_range(1..leaves);
            Regex::concat([
                random_regex(alphabet, cut, rng),
                random_regex(alphabet, leaves - cut, rng),
            ])
        }
        4..=6 => {
            let cut = rng.random_range(1..leaves);
            Regex::disj([
                random_regex(alphabet, cut, rng),
                random_regex(alphabet, leaves - cut, rng),
            ])
        }
        7 => random_regex(alphabet, leaves, rng).opt(),
        8 => random_regex(alphabet, leaves, rng).plus(),
        _ => random_regex(alphabet, leaves, rng).star(),
    }
}
