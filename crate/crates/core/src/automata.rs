//! Position-style automata shared by the Glushkov translation and k-OAs.
//!
//! An [`Nfa`] has one state per labelled position plus an implicit initial
//! state; entering a position reads its label. This is exactly the shape of
//! both Glushkov automata and state-labelled k-OAs, so membership, counting
//! and equivalence are implemented once here.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::{Error, Result, Symbol};

pub(crate) const SUBSET_CAP: usize = 1 << 16;

#[derive(Clone, Debug)]
pub(crate) struct Nfa {
    pub labels: Vec<Symbol>,
    pub nullable: bool,
    pub first: Vec<usize>,
    pub last: Vec<bool>,
    pub follow: Vec<Vec<usize>>,
}

impl Nfa {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Successors of `q`, where `q == self.len()` is the initial state.
    fn succ(&self, q: usize) -> &[usize] {
        if q == self.len() {
            &self.first
        } else {
            &self.follow[q]
        }
    }

    fn is_final(&self, q: usize) -> bool {
        if q == self.len() {
            self.nullable
        } else {
            self.last[q]
        }
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut cur = vec![self.len()];
        let mut seen = vec![false; self.len()];
        for a in w {
            let mut next = Vec::new();
            for &q in &cur {
                for &p in self.succ(q) {
                    if !seen[p] && self.labels[p] == *a {
                        seen[p] = true;
                        next.push(p);
                    }
                }
            }
            for &p in &next {
                seen[p] = false;
            }
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&q| self.is_final(q))
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.labels.iter().cloned().collect()
    }

    /// Subset construction over `alphabet`, which must contain every label.
    pub fn determinize(&self, alphabet: &[Symbol]) -> Result<Dfa> {
        let index: HashMap<&Symbol, usize> =
            alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let label_ix: Vec<usize> = self.labels.iter().map(|a| index[a]).collect();

        let start = vec![self.len()];
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
        let mut subsets = vec![start];
        let mut trans = Vec::new();
        let mut accepting = Vec::new();
        let mut at = 0;
        while at < subsets.len() {
            let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); alphabet.len()];
            for &q in &subsets[at] {
                for &p in self.succ(q) {
                    buckets[label_ix[p]].insert(p);
                }
            }
            accepting.push(subsets[at].iter().any(|&q| self.is_final(q)));
            let mut row = Vec::with_capacity(alphabet.len());
            for b in buckets {
                if b.is_empty() {
                    row.push(None);
                    continue;
                }
                let key: Vec<usize> = b.into_iter().collect();
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        if subsets.len() >= SUBSET_CAP {
                            return Err(Error::StateExplosion(SUBSET_CAP));
                        }
                        ids.insert(key.clone(), subsets.len());
                        subsets.push(key);
                        subsets.len() - 1
                    }
                };
                row.push(Some(id));
            }
            trans.push(row);
            at += 1;
        }
        Ok(Dfa {
            alphabet: alphabet.to_vec(),
            trans,
            accepting,
        })
    }
}

/// A partial DFA with start state 0; a missing transition rejects.
#[derive(Clone, Debug)]
pub(crate) struct Dfa {
    pub alphabet: Vec<Symbol>,
    pub trans: Vec<Vec<Option<usize>>>,
    pub accepting: Vec<bool>,
}

impl Dfa {
    /// `counts[i]` is the number of accepted words of length exactly `i`.
    pub fn count(&self, n: usize) -> Vec<BigUint> {
        let mut cur = vec![BigUint::zero(); self.trans.len()];
        cur[0] = BigUint::from(1u8);
        let mut counts = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut total = BigUint::zero();
            for (s, c) in cur.iter().enumerate() {
                if self.accepting[s] {
                    total += c;
                }
            }
            counts.push(total);
            if i == n {
                break;
            }
            let mut next = vec![BigUint::zero(); self.trans.len()];
            for (s, c) in cur.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for t in self.trans[s].iter().flatten() {
                    next[*t] += c;
                }
            }
            cur = next;
        }
        counts
    }
}

/// Shortest word `w` (by length, then BFS order) such that
/// `bad(w ∈ L(a), w ∈ L(b))`. Both DFAs must share the same alphabet.
pub(crate) fn product_search(
    a: &Dfa,
    b: &Dfa,
    bad: impl Fn(bool, bool) -> bool,
) -> Option<Vec<Symbol>> {
    debug_assert_eq!(a.alphabet, b.alphabet);
    type Pair = (Option<usize>, Option<usize>);
    let start: Pair = (Some(0), Some(0));
    let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        let acc_a = pair.0.is_some_and(|s| a.accepting[s]);
        let acc_b = pair.1.is_some_and(|s| b.accepting[s]);
        if bad(acc_a, acc_b) {
            let mut word = Vec::new();
            let mut cur = pair;
            while let Some((prev, sym)) = parent[&cur] {
                word.push(a.alphabet[sym].clone());
                cur = prev;
            }
            word.reverse();
            return Some(word);
        }
        for sym in 0..a.alphabet.len() {
            let next = (
                pair.0.and_then(|s| a.trans[s][sym]),
                pair.1.and_then(|s| b.trans[s][sym]),
            );
            if next == (None, None) || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, Some((pair, sym)));
            queue.push_back(next);
        }
    }
    None
}
