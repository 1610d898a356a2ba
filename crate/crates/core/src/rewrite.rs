//! Translation of k-OAs into k-occurrence expressions.
//!
//! The automaton is first made single-occurrence by marking its labels, then
//! rewritten by merging states whose labels are expressions, and finally the
//! marks are stripped. Rewriting is exact whenever the single-occurrence
//! automaton describes a single-occurrence expression; otherwise repair
//! steps add edges, so the result always accepts a superset of the input
//! language.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::koa::{SINK, SRC};
use crate::regex_ast::{simplify, strip, Marked};
use crate::{Koa, Regex, Symbol};

/// Marked labels for the labelled states of `g`, in state order: the
/// `i`-th state labelled `a` gets `a#i`.
pub fn marking(g: &Koa) -> Vec<Marked> {
    let mut seen: BTreeMap<&Symbol, u32> = BTreeMap::new();
    g.labels()
        .iter()
        .map(|a| {
            let i = seen.entry(a).or_insert(0);
            *i += 1;
            Marked::new(a.clone(), *i)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewritten {
    pub expr: Regex<Marked>,
    /// Number of repair steps, each of which may enlarge the language.
    pub repairs: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Graph {
    label: Vec<Option<Regex<Marked>>>,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
}

impl Graph {
    fn new(g: &Koa, marks: &[Marked]) -> Self {
        let n = g.n_states();
        let mut label = vec![None, None];
        label.extend(marks.iter().map(|m| Some(Regex::Atom(m.clone()))));
        let mut graph = Graph {
            label,
            succ: vec![BTreeSet::new(); n],
            pred: vec![BTreeSet::new(); n],
        };
        for (s, t) in g.edges() {
            graph.add(s, t);
        }
        graph
    }

    fn add(&mut self, s: usize, t: usize) {
        self.succ[s].insert(t);
        self.pred[t].insert(s);
    }

    fn remove(&mut self, s: usize, t: usize) {
        self.succ[s].remove(&t);
        self.pred[t].remove(&s);
    }

    fn has(&self, s: usize, t: usize) -> bool {
        self.succ[s].contains(&t)
    }

    fn alive(&self) -> Vec<usize> {
        (2..self.label.len()).filter(|&v| self.label[v].is_some()).collect()
    }

    fn take_label(&mut self, v: usize) -> Regex<Marked> {
        self.label[v].take().expect("live state")
    }

    /// Redirect every edge at `w` to `v`, delete `w` and relabel `v`.
    fn merge(&mut self, v: usize, w: usize, label: Regex<Marked>) {
        for p in std::mem::take(&mut self.pred[w]) {
            self.succ[p].remove(&w);
            self.add(if p == w { v } else { p }, v);
        }
        for s in std::mem::take(&mut self.succ[w]) {
            self.pred[s].remove(&w);
            self.add(v, if s == w { v } else { s });
        }
        self.label[w] = None;
        self.label[v] = Some(label);
    }

    fn result(&self) -> Option<Regex<Marked>> {
        match self.alive()[..] {
            [] => Some(Regex::Epsilon),
            [m] if self.succ[SRC] == BTreeSet::from([m])
                && self.succ[m] == BTreeSet::from([SINK]) =>
            {
                self.label[m].clone()
            }
            _ => None,
        }
    }

    /// Whether `v` may be treated as having a self-loop: a label closed
    /// under concatenation absorbs the loop without changing the language.
    fn looped(&self, v: usize) -> bool {
        fn closed(r: &Regex<Marked>) -> bool {
            match r {
                Regex::Plus(_) => true,
                Regex::Optional(c) => closed(c),
                _ => false,
            }
        }
        self.has(v, v) || self.label[v].as_ref().is_some_and(closed)
    }

    fn has_eff(&self, p: usize, s: usize) -> bool {
        if p == s {
            self.looped(p)
        } else {
            self.has(p, s)
        }
    }

    /// Two states merge when they agree on every outside neighbour and are
    /// either unconnected loop-free states or a pair of looping states with
    /// edges both ways.
    fn disjoinable(&self, v: usize, w: usize) -> bool {
        let outside = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            set.iter().copied().filter(|&x| x != v && x != w).collect()
        };
        if outside(&self.pred[v]) != outside(&self.pred[w])
            || outside(&self.succ[v]) != outside(&self.succ[w])
        {
            return false;
        }
        let (vw, wv) = (self.has(v, w), self.has(w, v));
        (!vw && !wv && !self.has(v, v) && !self.has(w, w))
            || (vw && wv && self.looped(v) && self.looped(w))
    }

    fn disjunction(&mut self) -> bool {
        let alive = self.alive();
        for (i, &v) in alive.iter().enumerate() {
            for &w in &alive[i + 1..] {
                if self.disjoinable(v, w) {
                    let label = Regex::disj([self.take_label(v), self.take_label(w)]);
                    self.merge(v, w, label);
                    return true;
                }
            }
        }
        false
    }

    fn concatenation(&mut self) -> bool {
        for v in self.alive() {
            let &[w] = &self.succ[v].iter().copied().collect::<Vec<_>>()[..] else {
                continue;
            };
            if w != SINK && w != v && self.pred[w].len() == 1 {
                self.remove(v, w);
                let label = Regex::concat([self.take_label(v), self.take_label(w)]);
                self.merge(v, w, label);
                return true;
            }
        }
        false
    }

    fn bypass(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &p in self.pred[v].iter().filter(|&&p| p != v) {
            for &s in self.succ[v].iter().filter(|&&s| s != v) {
                out.push((p, s));
            }
        }
        out
    }

    fn make_optional(&mut self, v: usize) {
        for (p, s) in self.bypass(v) {
            self.remove(p, s);
        }
        let label = self.take_label(v).opt();
        self.label[v] = Some(label);
    }

    fn optional_applies(&self, v: usize) -> bool {
        let bypass = self.bypass(v);
        let nullable = self.label[v].as_ref().is_some_and(Regex::nullable);
        bypass.iter().all(|&(p, s)| self.has_eff(p, s))
            && (!nullable || bypass.iter().any(|&(p, s)| self.has(p, s)))
    }

    fn optional(&mut self) -> bool {
        match self.alive().into_iter().find(|&v| self.optional_applies(v)) {
            Some(v) => {
                self.make_optional(v);
                true
            }
            None => false,
        }
    }

    fn self_loop(&mut self) -> bool {
        for v in self.alive() {
            if self.has(v, v) {
                self.remove(v, v);
                let label = self.take_label(v).plus();
                self.label[v] = Some(label);
                return true;
            }
        }
        false
    }

    /// Apply self-loop, disjunction and concatenation until none applies.
    fn settle(&mut self) {
        while self.self_loop() || self.disjunction() || self.concatenation() {}
    }

    /// Add the fewest edges that let two states merge by disjunction or one
    /// non-nullable state become optional, and apply that rule.
    fn repair(&mut self) {
        #[derive(PartialEq, Eq, PartialOrd, Ord)]
        enum Fix {
            Disj(usize, usize),
            Opt(usize),
        }
        let alive = self.alive();
        let mut best: Option<(usize, Fix)> = None;
        let mut consider = |cost: usize, fix: Fix| {
            if best.as_ref().is_none_or(|b| (cost, &fix) < (b.0, &b.1)) {
                best = Some((cost, fix));
            }
        };
        for (i, &v) in alive.iter().enumerate() {
            for &w in &alive[i + 1..] {
                let missing = self.pred[v].symmetric_difference(&self.pred[w]).count()
                    + self.succ[v].symmetric_difference(&self.succ[w]).count();
                consider(missing, Fix::Disj(v, w));
            }
            if !self.label[v].as_ref().unwrap().nullable() {
                let missing = self.bypass(v).iter().filter(|&&(p, s)| !self.has(p, s)).count();
                consider(missing, Fix::Opt(v));
            }
        }
        match best.expect("a stuck graph has two states or a non-nullable one").1 {
            Fix::Disj(v, w) => {
                for p in self.pred[v].union(&self.pred[w]).copied().collect::<Vec<_>>() {
                    self.add(p, v);
                    self.add(p, w);
                }
                for s in self.succ[v].union(&self.succ[w]).copied().collect::<Vec<_>>() {
                    self.add(v, s);
                    self.add(w, s);
                }
                let label = Regex::disj([self.take_label(v), self.take_label(w)]);
                self.merge(v, w, label);
            }
            Fix::Opt(v) => self.make_optional(v),
        }
    }
}

/// Settle the graph, then branch over every applicable optional step.
/// Returns the first repair-free result found.
fn search(mut g: Graph, seen: &mut HashSet<Graph>, budget: &mut usize) -> Option<Regex<Marked>> {
    g.settle();
    if let Some(r) = g.result() {
        return Some(r);
    }
    if *budget == 0 || !seen.insert(g.clone()) {
        return None;
    }
    *budget -= 1;
    let mut moves: Vec<Graph> = g
        .alive()
        .into_iter()
        .filter(|&v| g.optional_applies(v))
        .map(|v| {
            let mut next = g.clone();
            next.make_optional(v);
            next
        })
        .collect();
    // Steps that immediately unlock a merge are tried first.
    moves.sort_by_key(|m| !m.clone().disjunction() && !m.clone().concatenation());
    moves.into_iter().find_map(|m| search(m, seen, budget))
}

const SEARCH_BUDGET: usize = 20_000;

/// Rewrite a single-occurrence automaton, given by `g` and one distinct
/// mark per labelled state, into a single-occurrence expression over the
/// marks.
///
/// Self-loop, disjunction and concatenation are applied eagerly. Which state
/// to make optional is searched, since a wrong choice can strand a graph that
/// has an exact answer. If the bounded search finds nothing, the first
/// applicable optional step is taken each time and a repair step is made
/// whenever no rule applies.
pub fn soa_to_sore(g: &Koa, marks: &[Marked]) -> Rewritten {
    assert_eq!(marks.len(), g.labels().len(), "one mark per labelled state");
    debug_assert_eq!(marks.iter().collect::<BTreeSet<_>>().len(), marks.len());
    let mut graph = Graph::new(g, marks);
    let mut budget = SEARCH_BUDGET;
    let found = search(graph.clone(), &mut HashSet::new(), &mut budget);
    if let Some(r) = found {
        return Rewritten {
            expr: simplify(&r),
            repairs: 0,
        };
    }
    let mut repairs = 0;
    let budget = 4 * (g.n_states() + g.edge_count()) + 16;
    for _ in 0..budget {
        if let Some(r) = graph.result() {
            return Rewritten {
                expr: simplify(&r),
                repairs,
            };
        }
        graph.settle();
        if graph.result().is_some() {
            continue;
        }
        if !graph.optional() {
            graph.repair();
            repairs += 1;
        }
    }
    unreachable!("rewriting exceeded its step budget of {budget}")
}

/// A k-occurrence expression accepting at least the language of `g`, and
/// exactly it when `g` is the Glushkov automaton of a k-occurrence
/// expression.
pub fn koa_to_kore(g: &Koa) -> Regex {
    koa_to_kore_report(g).0
}

/// [`koa_to_kore`] together with the number of repair steps taken.
pub fn koa_to_kore_report(g: &Koa) -> (Regex, usize) {
    let marks = marking(g);
    let out = soa_to_sore(g, &marks);
    (simplify(&strip(&out.expr)), out.repairs)
}
