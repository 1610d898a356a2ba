//! k-occurrence automata: state-labelled automata with a distinguished
//! source and sink in which every label is carried by at most `k` states.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::automata::Nfa;
use crate::datagen::{gen_sample, SampleGenConfig};
use crate::glushkov::glushkov_automaton;
use crate::sample::render_word;
use crate::{Error, Regex, Result, Sample, Symbol, Word};

pub const SRC: usize = 0;
pub const SINK: usize = 1;

/// A validated k-OA. States `0` and `1` are the source and sink; states
/// `2..` carry labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Koa {
    labels: Vec<Symbol>,
    succ: Vec<BTreeSet<usize>>,
}

impl Koa {
    /// Build and validate: the source has no incoming edges, the sink no
    /// outgoing ones, and every state lies on a walk from source to sink.
    pub fn new(labels: Vec<Symbol>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = labels.len() + 2;
        let mut succ = vec![BTreeSet::new(); n];
        for (s, t) in edges {
            if s >= n || t >= n {
                return Err(Error::InvalidKoa(format!("edge ({s}, {t}) names an unknown state")));
            }
            if t == SRC {
                return Err(Error::InvalidKoa(format!("edge ({s}, src) enters the source")));
            }
            if s == SINK {
                return Err(Error::InvalidKoa(format!("edge (sink, {t}) leaves the sink")));
            }
            succ[s].insert(t);
        }
        let g = Koa { labels, succ };
        let (fwd, bwd) = g.reach();
        if let Some(s) = (0..n).find(|&s| !fwd[s] || !bwd[s]) {
            return Err(Error::InvalidKoa(format!(
                "state {s} is not on a walk from src to sink"
            )));
        }
        Ok(g)
    }

    /// Keep only the states on some source-to-sink walk, renumbering the
    /// survivors in their original order.
    pub fn trimmed(labels: Vec<Symbol>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = labels.len() + 2;
        let mut succ = vec![BTreeSet::new(); n];
        for (s, t) in edges {
            if s < n && t < n && t != SRC && s != SINK {
                succ[s].insert(t);
            }
        }
        let raw = Koa { labels, succ };
        let (fwd, bwd) = raw.reach();
        if !fwd[SINK] {
            return Err(Error::InvalidKoa("the sink is unreachable".into()));
        }
        let keep: Vec<usize> = (0..n).filter(|&s| fwd[s] && bwd[s]).collect();
        let new_id: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let labels = keep[2..].iter().map(|&s| raw.labels[s - 2].clone()).collect();
        let edges: Vec<_> = raw
            .edges()
            .filter_map(|(s, t)| Some((*new_id.get(&s)?, *new_id.get(&t)?)))
            .collect();
        Koa::new(labels, edges)
    }

    pub(crate) fn from_nfa(nfa: &Nfa) -> Result<Self> {
        let mut edges = Vec::new();
        if nfa.nullable {
            edges.push((SRC, SINK));
        }
        edges.extend(nfa.first.iter().map(|&p| (SRC, p + 2)));
        for p in 0..nfa.len() {
            edges.extend(nfa.follow[p].iter().map(|&q| (p + 2, q + 2)));
            if nfa.last[p] {
                edges.push((p + 2, SINK));
            }
        }
        Koa::new(nfa.labels.clone(), edges)
    }

    pub(crate) fn to_nfa(&self) -> Nfa {
        let inner = |s: usize| self.succ[s].iter().filter(|&&t| t != SINK).map(|&t| t - 2);
        Nfa {
            labels: self.labels.clone(),
            nullable: self.has_edge(SRC, SINK),
            first: inner(SRC).collect(),
            last: self.labeled_states().map(|s| self.has_edge(s, SINK)).collect(),
            follow: self.labeled_states().map(|s| inner(s).collect()).collect(),
        }
    }

    /// The complete k-OA over `alphabet`: `k` states per symbol, the source
    /// enters the first copy of every symbol and the sink, and every
    /// labelled state has an edge to every labelled state (itself included)
    /// and to the sink. Symbol `i`'s copy `j` is state `2 + i·k + j`.
    pub fn complete(alphabet: &BTreeSet<Symbol>, k: usize) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        let labels: Vec<Symbol> = alphabet
            .iter()
            .flat_map(|a| std::iter::repeat_n(a.clone(), k))
            .collect();
        let n = labels.len() + 2;
        let mut edges = vec![(SRC, SINK)];
        edges.extend((0..alphabet.len()).map(|i| (SRC, 2 + i * k)));
        for s in 2..n {
            edges.extend((1..n).map(|t| (s, t)));
        }
        Koa::new(labels, edges)
    }

    fn reach(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.n_states();
        let mut pred = vec![Vec::new(); n];
        for (s, t) in self.edges() {
            pred[t].push(s);
        }
        let bfs = |start: usize, next: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                for t in next(s) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen
        };
        let fwd = bfs(SRC, &|s| self.succ[s].iter().copied().collect());
        let bwd = bfs(SINK, &|s| pred[s].clone());
        (fwd, bwd)
    }

    pub fn n_states(&self) -> usize {
        self.labels.len() + 2
    }

    pub fn labeled_states(&self) -> std::ops::Range<usize> {
        2..self.n_states()
    }

    /// Label of a labelled state; `None` for the source and sink.
    pub fn label(&self, s: usize) -> Option<&Symbol> {
        s.checked_sub(2).and_then(|i| self.labels.get(i))
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn succ(&self, s: usize) -> &BTreeSet<usize> {
        &self.succ[s]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.succ[s].contains(&t)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }

    /// Largest number of states sharing a label.
    pub fn k(&self) -> usize {
        let mut counts: BTreeMap<&Symbol, usize> = BTreeMap::new();
        for a in &self.labels {
            *counts.entry(a).or_insert(0) += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.labels.iter().cloned().collect()
    }

    /// Whether no state has two successors with the same label.
    pub fn is_deterministic(&self) -> bool {
        self.succ.iter().all(|ts| {
            let mut seen = BTreeSet::new();
            ts.iter().filter_map(|&t| self.label(t)).all(|a| seen.insert(a))
        })
    }

    fn step(&self, s: usize, a: &Symbol) -> Option<usize> {
        self.succ[s].iter().copied().find(|&t| self.label(t) == Some(a))
    }

    /// Whether some accepting run exists for `w`.
    pub fn accepts(&self, w: &[Symbol]) -> bool {
        self.to_nfa().accepts(w)
    }

    /// The unique accepting run `src, s1, …, sn, sink` of `w`, or `None`
    /// when `w` is rejected. Only defined for deterministic automata.
    pub fn det_run(&self, w: &[Symbol]) -> Result<Option<Vec<usize>>> {
        if !self.is_deterministic() {
            return Err(Error::NondeterministicAutomaton);
        }
        Ok(self.run_unchecked(w))
    }

    fn run_unchecked(&self, w: &[Symbol]) -> Option<Vec<usize>> {
        let mut run = Vec::with_capacity(w.len() + 2);
        run.push(SRC);
        let mut s = SRC;
        for a in w {
            s = self.step(s, a)?;
            run.push(s);
        }
        self.has_edge(s, SINK).then(|| {
            run.push(SINK);
            run
        })
    }

    fn witnessed(&self, sample: &Sample) -> Result<BTreeSet<(usize, usize)>> {
        let mut seen = BTreeSet::new();
        for w in sample.words() {
            let run = self.run_unchecked(w).ok_or_else(|| Error::WordRejected {
                word: render_word(w),
            })?;
            seen.extend(run.windows(2).map(|p| (p[0], p[1])));
        }
        Ok(seen)
    }

    /// Keep only edges traversed by the run of some sample word, then drop
    /// states that no longer lie on a source-to-sink walk.
    pub fn prune(&self, sample: &Sample) -> Result<Koa> {
        if !self.is_deterministic() {
            return Err(Error::NondeterministicAutomaton);
        }
        let keep = self.witnessed(sample)?;
        Koa::trimmed(self.labels.clone(), keep)
    }
}

/// Witnessed and total edge counts of a Glushkov automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub witnessed: usize,
    pub total: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.witnessed as f64 / self.total as f64
        }
    }

    pub fn is_full(&self) -> bool {
        self.witnessed == self.total
    }
}

fn deterministic_glushkov(r: &Regex) -> Result<Koa> {
    let g = glushkov_automaton(r)?;
    if !g.is_deterministic() {
        return Err(Error::NotDeterministic(r.to_string()));
    }
    Ok(g)
}

fn witnessed_by(g: &Koa, words: impl IntoIterator<Item = impl AsRef<[Symbol]>>) -> BTreeSet<(usize, usize)> {
    let mut seen = BTreeSet::new();
    for w in words {
        if let Some(run) = g.run_unchecked(w.as_ref()) {
            seen.extend(run.windows(2).map(|p| (p[0], p[1])));
        }
    }
    seen
}

/// Fraction of the Glushkov automaton edges of `r` traversed by the run of
/// some word of `sample`. Words outside `L(r)` witness nothing.
pub fn coverage(r: &Regex, sample: &Sample) -> Result<Coverage> {
    let g = deterministic_glushkov(r)?;
    Ok(Coverage {
        witnessed: witnessed_by(&g, sample.words()).len(),
        total: g.edge_count(),
    })
}

/// One word per edge of the Glushkov automaton of `r`, each the shortest
/// word whose run uses that edge.
fn edge_witnesses(g: &Koa) -> Vec<Word> {
    let n = g.n_states();
    // Shortest walk from src to each state, as the predecessor on it.
    let mut from_src: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[SRC] = true;
    let mut queue = VecDeque::from([SRC]);
    while let Some(s) = queue.pop_front() {
        for &t in g.succ(s) {
            if !seen[t] {
                seen[t] = true;
                from_src[t] = Some(s);
                queue.push_back(t);
            }
        }
    }
    // Shortest walk from each state to sink, as the successor on it.
    let mut pred = vec![Vec::new(); n];
    for (s, t) in g.edges() {
        pred[t].push(s);
    }
    let mut to_sink: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[SINK] = true;
    let mut queue = VecDeque::from([SINK]);
    while let Some(t) = queue.pop_front() {
        for &s in &pred[t] {
            if !seen[s] {
                seen[s] = true;
                to_sink[s] = Some(t);
                queue.push_back(s);
            }
        }
    }

    let prefix = |mut s: usize| {
        let mut out = Vec::new();
        while s != SRC {
            out.push(g.label(s).unwrap().clone());
            s = from_src[s].unwrap();
        }
        out.reverse();
        out
    };
    let suffix = |mut s: usize| {
        let mut out = Vec::new();
        while s != SINK {
            out.push(g.label(s).unwrap().clone());
            s = to_sink[s].unwrap();
        }
        out
    };
    g.edges()
        .map(|(s, t)| {
            let mut w = prefix(s);
            w.extend(suffix(t));
            w
        })
        .collect()
}

/// A sample witnessing every edge of the Glushkov automaton of `r`: the
/// distinct shortest edge witnesses, padded with random words from `r` up
/// to `size` words in total.
pub fn covering_sample(r: &Regex, size: usize, rng: &mut impl Rng) -> Result<Sample> {
    let g = deterministic_glushkov(r)?;
    let mut sample: Sample = edge_witnesses(&g)
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let missing = size.saturating_sub(sample.len());
    if missing > 0 {
        let extra = gen_sample(r, &SampleGenConfig::with_size(missing), rng)?;
        for (w, n) in extra.iter() {
            sample.insert_n(w.clone(), n);
        }
    }
    Ok(sample)
}

/// A sample of `size` words from `L(r)` whose coverage is as close to
/// `target` as a greedy choice gets without exceeding it.
///
/// Candidate words are the shortest edge witnesses and random draws, taken
/// in random order; a word is kept only if it does not push the coverage
/// above `target`. The remaining slots are filled with words that witness
/// no new edge.
pub fn sample_with_coverage(r: &Regex, target: f64, size: usize, rng: &mut impl Rng) -> Result<Sample> {
    use rand::seq::SliceRandom;

    let g = deterministic_glushkov(r)?;
    let total = g.edge_count() as f64;
    let mut pool: Vec<Word> = edge_witnesses(&g);
    let drawn = gen_sample(r, &SampleGenConfig::with_size(size.max(1) * 4), rng)?;
    for (w, n) in drawn.iter() {
        pool.extend(std::iter::repeat_n(w.clone(), n));
    }
    pool.shuffle(rng);

    let mut covered = BTreeSet::new();
    let mut chosen: Vec<Word> = Vec::new();
    for w in &pool {
        let mut with = covered.clone();
        with.extend(witnessed_by(&g, [w]));
        if with.len() as f64 / total <= target + 1e-12 && chosen.len() < size {
            covered = with;
            chosen.push(w.clone());
        }
    }
    if chosen.is_empty() {
        return Err(Error::Generation(format!(
            "no word of {r} keeps coverage at or below {target}"
        )));
    }
    let mut i = 0;
    while chosen.len() < size {
        let w = chosen[i % chosen.len()].clone();
        chosen.push(w);
        i += 1;
    }
    Ok(chosen.into_iter().collect())
}

#[derive(Serialize, Deserialize)]
struct JsonState {
    id: usize,
    label: Option<Symbol>,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    from: usize,
    to: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonKoa {
    src: usize,
    sink: usize,
    states: Vec<JsonState>,
    edges: Vec<JsonEdge>,
}

impl Serialize for Koa {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JsonKoa {
            src: SRC,
            sink: SINK,
            states: (0..self.n_states())
                .map(|id| JsonState {
                    id,
                    label: self.label(id).cloned(),
                })
                .collect(),
            edges: self.edges().map(|(from, to)| JsonEdge { from, to }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Koa {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = JsonKoa::deserialize(d)?;
        // Accept arbitrary ids and renumber to src, sink, then labelled
        // states in id order.
        let mut order: Vec<usize> = vec![j.src, j.sink];
        let mut labels = Vec::new();
        let mut by_id: BTreeMap<usize, Option<Symbol>> = BTreeMap::new();
        for st in j.states {
            if by_id.insert(st.id, st.label).is_some() {
                return Err(D::Error::custom(format!("duplicate state id {}", st.id)));
            }
        }
        for (&id, label) in &by_id {
            if id == j.src || id == j.sink {
                continue;
            }
            let label = label
                .clone()
                .ok_or_else(|| D::Error::custom(format!("state {id} has no label")))?;
            order.push(id);
            labels.push(label);
        }
        let index: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut edges = Vec::new();
        for e in j.edges {
            let (Some(&s), Some(&t)) = (index.get(&e.from), index.get(&e.to)) else {
                return Err(D::Error::custom(format!("edge ({}, {}) names an unknown state", e.from, e.to)));
            };
            edges.push((s, t));
        }
        Koa::new(labels, edges).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex_ast::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn w(s: &str) -> Word {
        s.chars().map(|c| sym(&c.to_string())).collect()
    }

    fn alpha(s: &str) -> BTreeSet<Symbol> {
        s.chars().map(|c| sym(&c.to_string())).collect()
    }

    fn fig_2a() -> Koa {
        Koa::new(
            vec![sym("a"), sym("a"), sym("b")],
            [(0, 2), (2, 3), (2, 4), (3, 4), (4, 4), (4, 1)],
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_graphs() {
        let a = || vec![sym("a")];
        assert!(Koa::new(a(), [(0, 2), (2, 1), (2, 0)]).is_err());
        assert!(Koa::new(a(), [(0, 2), (2, 1), (1, 2)]).is_err());
        assert!(Koa::new(a(), [(0, 1)]).is_err());
        assert!(Koa::new(a(), [(0, 2), (2, 1), (0, 9)]).is_err());
        assert!(Koa::new(a(), [(0, 2), (2, 1)]).is_ok());
    }

    #[test]
    fn complete_one_symbol() {
        let c = Koa::complete(&alpha("a"), 1).unwrap();
        assert_eq!(
            c.edges().collect::<BTreeSet<_>>(),
            BTreeSet::from([(0, 1), (0, 2), (2, 1), (2, 2)])
        );
    }

    #[test]
    fn complete_two_symbols_two_copies() {
        let c = Koa::complete(&alpha("ab"), 2).unwrap();
        assert_eq!(c.labeled_states().len(), 4);
        assert_eq!(c.k(), 2);
        assert_eq!(c.succ(SRC).len(), 3);
        assert_eq!(c.edge_count(), 3 + 4 * 5);
        assert!(c.accepts(&[]));
        assert!(Koa::complete(&BTreeSet::new(), 1).is_err());
    }

    #[test]
    fn runs_on_fig_2a() {
        let g = fig_2a();
        assert!(g.accepts(&w("aab")));
        assert!(!g.accepts(&w("ba")));
        assert_eq!(g.det_run(&w("aab")).unwrap(), Some(vec![0, 2, 3, 4, 1]));
        assert_eq!(g.det_run(&w("ba")).unwrap(), None);
        let c = Koa::complete(&alpha("a"), 2).unwrap();
        assert_eq!(c.det_run(&w("a")), Err(Error::NondeterministicAutomaton));
    }

    #[test]
    fn prune_keeps_witnessed_edges() {
        let c = Koa::complete(&alpha("a"), 1).unwrap();
        let p = c.prune(&Sample::from_strs(["a"])).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 2), (2, 1)]);

        let p = c.prune(&Sample::from_strs([""])).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(p.n_states(), 2);

        let g = fig_2a();
        assert!(matches!(
            g.prune(&Sample::from_strs(["b"])),
            Err(Error::WordRejected { .. })
        ));
    }

    #[test]
    fn coverage_examples() {
        let r = parse("a a? b+").unwrap();
        let c = coverage(&r, &Sample::from_strs(["a b"])).unwrap();
        assert_eq!((c.witnessed, c.total), (3, 6));
        assert_eq!(c.fraction(), 0.5);
        assert_eq!(coverage(&r, &Sample::new()).unwrap().fraction(), 0.0);
        let full = Sample::from_strs(["a b", "a a b", "a b b"]);
        assert!(coverage(&r, &full).unwrap().is_full());
        assert!(coverage(&parse("(a|b)* a").unwrap(), &full).is_err());
    }

    #[test]
    fn covering_samples_cover() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = parse("a a? b+").unwrap();
        let s = covering_sample(&r, 0, &mut rng).unwrap();
        assert!(coverage(&r, &s).unwrap().is_full());
        assert!(s.distinct() <= 6);

        let s = covering_sample(&parse("a").unwrap(), 0, &mut rng).unwrap();
        assert_eq!(s, Sample::from_strs(["a"]));

        let s = covering_sample(&r, 50, &mut rng).unwrap();
        assert_eq!(s.len(), 50);
        assert!(coverage(&r, &s).unwrap().is_full());
    }

    #[test]
    fn partial_coverage_stays_below_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = parse("(a1 a2 | a3 | a4 | a5)+ a6? (a7 | a8)").unwrap();
        let s = sample_with_coverage(&r, 0.7, 40, &mut rng).unwrap();
        assert_eq!(s.len(), 40);
        let f = coverage(&r, &s).unwrap().fraction();
        assert!(f <= 0.7 && f >= 0.5, "{f}");
    }

    #[test]
    fn json_round_trip() {
        let g = fig_2a();
        let text = serde_json::to_string(&g).unwrap();
        let back: Koa = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}
