//! Expression AST over a finite symbol alphabet.
//!
//! Expressions are built from `∅`, `ε`, symbols, n-ary concatenation and
//! disjunction, `?` and `+`. There is no Kleene star: `r*` is represented as
//! `(r+)?`. Concatenation and disjunction are kept flattened, with at least
//! two children, when built through the smart constructors.

mod display;
mod normalize;
mod parse;
mod simplify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use normalize::normalize_thm31;
pub use parse::{parse, parse_marked};
pub use simplify::{canonical, simplify};

/// An alphabet symbol, e.g. an XML element name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        debug_assert!(!name.is_empty() && !name.chars().any(char::is_whitespace));
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The `index`-th copy of a base symbol; rendered as `a#2`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Marked {
    pub base: Symbol,
    pub index: u32,
}

impl Marked {
    pub fn new(base: impl Into<Symbol>, index: u32) -> Self {
        assert!(index >= 1, "marked symbols are indexed from 1");
        Marked {
            base: base.into(),
            index,
        }
    }
}

impl fmt::Display for Marked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.base, self.index)
    }
}

impl fmt::Debug for Marked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Anything that can sit at a leaf of an expression.
pub trait Atom: Clone + Eq + Ord + Hash + fmt::Display + fmt::Debug + Send + Sync {
    /// The unmarked symbol this atom stands for.
    fn base(&self) -> &Symbol;
}

impl Atom for Symbol {
    fn base(&self) -> &Symbol {
        self
    }
}

impl Atom for Marked {
    fn base(&self) -> &Symbol {
        &self.base
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Regex<A = Symbol> {
    Empty,
    Epsilon,
    Atom(A),
    Concat(Vec<Regex<A>>),
    Disj(Vec<Regex<A>>),
    Optional(Box<Regex<A>>),
    Plus(Box<Regex<A>>),
}

impl<A> Regex<A> {
    pub fn atom(a: impl Into<A>) -> Self {
        Regex::Atom(a.into())
    }

    /// Concatenation, flattening nested concatenations. An empty list gives
    /// `ε` and a single child is returned unchanged.
    pub fn concat(children: impl IntoIterator<Item = Regex<A>>) -> Self {
        let mut out = Vec::new();
        for c in children {
            match c {
                Regex::Concat(cs) => out.extend(cs),
                c => out.push(c),
            }
        }
        match out.len() {
            0 => Regex::Epsilon,
            1 => out.pop().unwrap(),
            _ => Regex::Concat(out),
        }
    }

    /// Disjunction, flattening nested disjunctions. An empty list gives `∅`.
    pub fn disj(children: impl IntoIterator<Item = Regex<A>>) -> Self {
        let mut out = Vec::new();
        for c in children {
            match c {
                Regex::Disj(cs) => out.extend(cs),
                c => out.push(c),
            }
        }
        match out.len() {
            0 => Regex::Empty,
            1 => out.pop().unwrap(),
            _ => Regex::Disj(out),
        }
    }

    pub fn opt(self) -> Self {
        Regex::Optional(Box::new(self))
    }

    pub fn plus(self) -> Self {
        Regex::Plus(Box::new(self))
    }

    /// `r*`, encoded as `(r+)?`.
    pub fn star(self) -> Self {
        self.plus().opt()
    }

    pub fn children(&self) -> &[Regex<A>] {
        match self {
            Regex::Concat(cs) | Regex::Disj(cs) => cs,
            Regex::Optional(c) | Regex::Plus(c) => std::slice::from_ref(c),
            _ => &[],
        }
    }

    /// Leaves in left-to-right order.
    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            Regex::Atom(a) => out.push(a),
            _ => self.children().iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Whether `ε ∈ L(r)`.
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Atom(_) => false,
            Regex::Epsilon | Regex::Optional(_) => true,
            Regex::Concat(cs) => cs.iter().all(Regex::nullable),
            Regex::Disj(cs) => cs.iter().any(Regex::nullable),
            Regex::Plus(c) => c.nullable(),
        }
    }

    pub fn contains_empty(&self) -> bool {
        matches!(self, Regex::Empty) || self.children().iter().any(Regex::contains_empty)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Regex::size).sum::<usize>()
    }

    /// Replace every leaf through `f`, rebuilding with the smart constructors.
    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Regex<B> {
        match self {
            Regex::Empty => Regex::Empty,
            Regex::Epsilon => Regex::Epsilon,
            Regex::Atom(a) => Regex::Atom(f(a)),
            Regex::Concat(cs) => Regex::Concat(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Regex::Disj(cs) => Regex::Disj(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Regex::Optional(c) => Regex::Optional(Box::new(c.map_atoms(f))),
            Regex::Plus(c) => Regex::Plus(Box::new(c.map_atoms(f))),
        }
    }

    /// Length of the written form counting every symbol, `ε`, `∅`, operator
    /// (with an explicit concatenation dot) and necessary parenthesis as one.
    /// `(a·b)+? + c` has length 9.
    pub fn length(&self) -> usize {
        fn wrapped<A>(r: &Regex<A>) -> usize {
            match r {
                Regex::Concat(_) | Regex::Disj(_) => r.length() + 2,
                _ => r.length(),
            }
        }
        match self {
            Regex::Empty | Regex::Epsilon | Regex::Atom(_) => 1,
            Regex::Concat(cs) => {
                let inner: usize = cs
                    .iter()
                    .map(|c| match c {
                        Regex::Disj(_) => c.length() + 2,
                        _ => c.length(),
                    })
                    .sum();
                inner + cs.len() - 1
            }
            Regex::Disj(cs) => cs.iter().map(Regex::length).sum::<usize>() + cs.len() - 1,
            Regex::Optional(c) | Regex::Plus(c) => wrapped(c) + 1,
        }
    }
}

impl<A: Atom> Regex<A> {
    /// Number of occurrences of each base symbol.
    pub fn occurrences(&self) -> BTreeMap<Symbol, usize> {
        let mut counts = BTreeMap::new();
        for a in self.atoms() {
            *counts.entry(a.base().clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.atoms().into_iter().map(|a| a.base().clone()).collect()
    }

    pub fn stats(&self) -> ExprStats {
        let counts = self.occurrences();
        ExprStats {
            occ: counts.values().sum(),
            k: counts.values().copied().max().unwrap_or(0),
            alphabet: counts.into_keys().collect(),
        }
    }

    /// Whether every symbol occurs at most `k` times.
    pub fn is_k_ore(&self, k: usize) -> bool {
        self.stats().k <= k
    }
}

/// Occurrence statistics of an expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExprStats {
    /// Total number of symbol occurrences.
    pub occ: usize,
    pub alphabet: BTreeSet<Symbol>,
    /// Largest number of occurrences of a single symbol.
    pub k: usize,
}

impl ExprStats {
    /// Average number of occurrences per alphabet symbol, as a
    /// `(numerator, denominator)` pair. `None` for an empty alphabet.
    pub fn kappa_ratio(&self) -> Option<(usize, usize)> {
        (!self.alphabet.is_empty()).then(|| (self.occ, self.alphabet.len()))
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa_ratio().map(|(n, d)| n as f64 / d as f64)
    }
}

/// Index the i-th left-to-right occurrence of each symbol with `i`.
pub fn mark(r: &Regex<Symbol>) -> Regex<Marked> {
    let mut seen: BTreeMap<Symbol, u32> = BTreeMap::new();
    r.map_atoms(&mut |a| {
        let i = seen.entry(a.clone()).or_insert(0);
        *i += 1;
        Marked::new(a.clone(), *i)
    })
}

pub fn strip<A: Atom>(r: &Regex<A>) -> Regex<Symbol> {
    r.map_atoms(&mut |a| a.base().clone())
}

pub fn strip_word<A: Atom>(w: &[A]) -> Vec<Symbol> {
    w.iter().map(|a| a.base().clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Regex {
        parse(s).unwrap()
    }

    #[test]
    fn stats_counts_occurrences() {
        let s = p("a a? b+").stats();
        assert_eq!(s.occ, 3);
        assert_eq!(s.k, 2);
        assert_eq!(s.alphabet.len(), 2);

        let s = p("a (a|b)+ c a b").stats();
        assert_eq!(s.kappa_ratio(), Some((6, 3)));
        assert_eq!(s.kappa(), Some(2.0));

        let s = Regex::<Symbol>::Epsilon.stats();
        assert_eq!(s.occ, 0);
        assert!(s.alphabet.is_empty());
        assert_eq!(s.kappa(), None);
    }

    #[test]
    fn length_uses_explicit_concatenation() {
        assert_eq!(p("((a b)+)? | c").length(), 9);
        assert_eq!(p("a").length(), 1);
        assert_eq!(p("a a? b+").length(), 7);
    }

    #[test]
    fn mark_indexes_left_to_right() {
        let m = mark(&p("b+ a (b a+)?"));
        assert_eq!(m, parse_marked("b#1+ a#1 (b#2 a#2+)?").unwrap());
        assert_eq!(mark(&p("a a? b+")), parse_marked("a#1 a#2? b#1+").unwrap());
        assert_eq!(mark(&p("a")), parse_marked("a#1").unwrap());
    }

    #[test]
    fn strip_erases_indices() {
        let m = parse_marked("a#1 a#2? b#1+").unwrap();
        assert_eq!(strip(&m), p("a a? b+"));
        assert_eq!(strip(&parse_marked("a#1").unwrap()), p("a"));

        let words = [
            vec![Marked::new("a", 1), Marked::new("a", 2), Marked::new("b", 1)],
            vec![Marked::new("a", 2), Marked::new("a", 2), Marked::new("c", 2)],
        ];
        let stripped: BTreeSet<String> = words
            .iter()
            .map(|w| {
                strip_word(w)
                    .iter()
                    .map(Symbol::as_str)
                    .collect::<String>()
            })
            .collect();
        assert_eq!(
            stripped,
            ["aab", "aac"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn smart_constructors_flatten() {
        let a = || Regex::<Symbol>::atom("a");
        let nested = Regex::concat([Regex::concat([a(), a()]), a()]);
        assert_eq!(nested.children().len(), 3);
        assert_eq!(Regex::<Symbol>::concat([]), Regex::Epsilon);
        assert_eq!(Regex::<Symbol>::disj([]), Regex::Empty);
        assert_eq!(Regex::disj([a()]), a());
    }
}
