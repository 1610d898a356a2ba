//! Glushkov translation, determinism, membership, counting and language
//! comparison of expressions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::automata::{product_search, Nfa};
use crate::regex_ast::{normalize_thm31, Atom};
use crate::{Error, Koa, Regex, Result, Symbol, Word};

/// First, last and follow sets of a single-occurrence expression, keyed by
/// its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionSets<A> {
    pub nullable: bool,
    pub first: BTreeSet<A>,
    pub last: BTreeSet<A>,
    pub follow: BTreeMap<A, BTreeSet<A>>,
}

/// Position sets of `r`. Every atom of `r` must be distinct, as in a marked
/// expression.
pub fn position_sets<A: Atom>(r: &Regex<A>) -> Result<PositionSets<A>> {
    let atoms: Vec<A> = r.atoms().into_iter().cloned().collect();
    let mut seen = BTreeSet::new();
    for a in &atoms {
        if !seen.insert(a) {
            return Err(Error::NotSingleOccurrence(a.to_string()));
        }
    }
    let nfa = nfa(r);
    let set = |ps: &[usize]| ps.iter().map(|&p| atoms[p].clone()).collect::<BTreeSet<_>>();
    Ok(PositionSets {
        nullable: nfa.nullable,
        first: set(&nfa.first),
        last: (0..atoms.len())
            .filter(|&p| nfa.last[p])
            .map(|p| atoms[p].clone())
            .collect(),
        follow: (0..atoms.len())
            .map(|p| (atoms[p].clone(), set(&nfa.follow[p])))
            .collect(),
    })
}

struct Info {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

fn positions<A: Atom>(
    r: &Regex<A>,
    labels: &mut Vec<Symbol>,
    follow: &mut Vec<BTreeSet<usize>>,
) -> Info {
    match r {
        Regex::Empty => Info {
            nullable: false,
            first: BTreeSet::new(),
            last: BTreeSet::new(),
        },
        Regex::Epsilon => Info {
            nullable: true,
            first: BTreeSet::new(),
            last: BTreeSet::new(),
        },
        Regex::Atom(a) => {
            let p = labels.len();
            labels.push(a.base().clone());
            follow.push(BTreeSet::new());
            Info {
                nullable: false,
                first: BTreeSet::from([p]),
                last: BTreeSet::from([p]),
            }
        }
        Regex::Concat(cs) => {
            let mut acc = Info {
                nullable: true,
                first: BTreeSet::new(),
                last: BTreeSet::new(),
            };
            for c in cs {
                let info = positions(c, labels, follow);
                for &l in &acc.last {
                    follow[l].extend(info.first.iter().copied());
                }
                if acc.nullable {
                    acc.first.extend(info.first.iter().copied());
                }
                if !info.nullable {
                    acc.last.clear();
                }
                acc.last.extend(info.last);
                acc.nullable &= info.nullable;
            }
            acc
        }
        Regex::Disj(cs) => {
            let mut acc = Info {
                nullable: false,
                first: BTreeSet::new(),
                last: BTreeSet::new(),
            };
            for c in cs {
                let info = positions(c, labels, follow);
                acc.nullable |= info.nullable;
                acc.first.extend(info.first);
                acc.last.extend(info.last);
            }
            acc
        }
        Regex::Optional(c) => Info {
            nullable: true,
            ..positions(c, labels, follow)
        },
        Regex::Plus(c) => {
            let info = positions(c, labels, follow);
            for &l in &info.last {
                follow[l].extend(info.first.iter().copied());
            }
            info
        }
    }
}

/// Position automaton of `r`; position `i` is the `i`-th atom from the left.
pub(crate) fn nfa<A: Atom>(r: &Regex<A>) -> Nfa {
    let mut labels = Vec::new();
    let mut follow = Vec::new();
    let info = positions(r, &mut labels, &mut follow);
    let n = labels.len();
    Nfa {
        labels,
        nullable: info.nullable,
        first: info.first.into_iter().collect(),
        last: (0..n).map(|p| info.last.contains(&p)).collect(),
        follow: follow.into_iter().map(|f| f.into_iter().collect()).collect(),
    }
}

/// The Glushkov automaton of `r` as a k-OA. Labelled state `2 + i` stands
/// for the `i`-th atom of `r` from the left.
///
/// Subexpressions denoting the empty language are first removed with
/// [`normalize_thm31`], which can renumber positions.
pub fn glushkov_automaton<A: Atom>(r: &Regex<A>) -> Result<Koa> {
    if r.contains_empty() {
        let n = normalize_thm31(r);
        if n == Regex::Empty {
            return Err(Error::EmptyLanguage);
        }
        return glushkov_automaton(&n);
    }
    Koa::from_nfa(&nfa(r))
}

/// Whether the Glushkov automaton of `r` is deterministic.
pub fn is_deterministic<A: Atom>(r: &Regex<A>) -> bool {
    check_deterministic(r).is_ok()
}

/// Like [`is_deterministic`], but names the offending symbol.
pub fn check_deterministic<A: Atom>(r: &Regex<A>) -> Result<()> {
    let nfa = nfa(r);
    let clash = |ps: &[usize]| {
        let mut seen = BTreeSet::new();
        ps.iter().find(|&&p| !seen.insert(&nfa.labels[p])).copied()
    };
    if let Some(p) = clash(&nfa.first) {
        return Err(Error::NotDeterministic(format!(
            "two initial positions read {}",
            nfa.labels[p]
        )));
    }
    for (q, f) in nfa.follow.iter().enumerate() {
        if let Some(p) = clash(f) {
            return Err(Error::NotDeterministic(format!(
                "two positions read {} after position {} ({})",
                nfa.labels[p],
                q + 1,
                nfa.labels[q]
            )));
        }
    }
    Ok(())
}

/// Whether `w ∈ L(r)`.
pub fn accepts<A: Atom>(r: &Regex<A>, w: &[Symbol]) -> bool {
    nfa(r).accepts(w)
}

/// Number of words of each length `0..=n` accepted by an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthCounts {
    pub counts: Vec<BigUint>,
}

impl LengthCounts {
    /// `|L^{≤n}|`, the number of words of length at most `n`.
    pub fn upto(&self, n: usize) -> BigUint {
        self.counts.iter().take(n + 1).sum()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Running sums `|L^{≤i}|`.
    pub fn cumulative(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.counts
            .iter()
            .map(|c| {
                acc += c;
                acc.clone()
            })
            .collect()
    }
}

impl Serialize for LengthCounts {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.counts.iter().map(|c| c.to_string()))
    }
}

/// Exact per-length word counts of `L(r)` up to length `n`, on the
/// determinized Glushkov automaton.
pub fn count_words<A: Atom>(r: &Regex<A>, n: usize) -> Result<LengthCounts> {
    let nfa = nfa(r);
    let alphabet: Vec<Symbol> = nfa.alphabet().into_iter().collect();
    let dfa = nfa.determinize(&alphabet)?;
    Ok(LengthCounts {
        counts: dfa.count(n),
    })
}

pub(crate) fn search(a: &Nfa, b: &Nfa, bad: impl Fn(bool, bool) -> bool) -> Result<Option<Word>> {
    let alphabet: Vec<Symbol> = a.alphabet().union(&b.alphabet()).cloned().collect();
    let da = a.determinize(&alphabet)?;
    let db = b.determinize(&alphabet)?;
    Ok(product_search(&da, &db, bad))
}

/// Whether `L(r1) = L(r2)`.
pub fn equivalent<A: Atom, B: Atom>(r1: &Regex<A>, r2: &Regex<B>) -> Result<bool> {
    Ok(difference_witness(r1, r2)?.is_none())
}

/// Whether `L(r1) ⊆ L(r2)`.
pub fn included<A: Atom, B: Atom>(r1: &Regex<A>, r2: &Regex<B>) -> Result<bool> {
    Ok(search(&nfa(r1), &nfa(r2), |x, y| x && !y)?.is_none())
}

/// Whether `L(g) ⊆ L(r)`.
pub fn koa_included_in<A: Atom>(g: &Koa, r: &Regex<A>) -> Result<bool> {
    Ok(search(&g.to_nfa(), &nfa(r), |x, y| x && !y)?.is_none())
}

/// Whether `L(g) = L(r)`.
pub fn koa_equivalent_to<A: Atom>(g: &Koa, r: &Regex<A>) -> Result<bool> {
    Ok(search(&g.to_nfa(), &nfa(r), |x, y| x != y)?.is_none())
}

/// A shortest word in exactly one of `L(r1)` and `L(r2)`, if any.
pub fn difference_witness<A: Atom, B: Atom>(r1: &Regex<A>, r2: &Regex<B>) -> Result<Option<Word>> {
    search(&nfa(r1), &nfa(r2), |x, y| x != y)
}
