mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rexinfer::datagen::{gen_expression, gen_sample, letters, GenConfig, SampleGenConfig};
use rexinfer::driver::{idregex, prefix_tree_expression, InferConfig};
use rexinfer::glushkov::{accepts, count_words, equivalent, glushkov_automaton, is_deterministic};
use rexinfer::koa::{coverage, covering_sample};
use rexinfer::pomm::{Pomm, TrainConfig};
use rexinfer::regex_ast::{mark, normalize_thm31, parse, parse_marked, simplify, strip};
use rexinfer::rewrite::{marking, soa_to_sore};
use rexinfer::select::{language_size, mdl_cost};
use rexinfer::{Koa, Regex, Sample, Symbol};

use common::{naive_accepts, syms, words_upto};

fn regex(sigma: usize) -> impl Strategy<Value = Regex> {
    let alphabet = syms(sigma);
    let leaf = prop_oneof![
        1 => Just(Regex::Epsilon),
        6 => proptest::sample::select(alphabet).prop_map(Regex::Atom),
    ];
    leaf.prop_recursive(4, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Regex::concat),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Regex::disj),
            inner.clone().prop_map(Regex::opt),
            inner.prop_map(Regex::plus),
        ]
    })
}

fn small_regex() -> impl Strategy<Value = Regex> {
    (1..=3usize).prop_flat_map(regex)
}

/// A deterministic k-ORE drawn by the generator, k ≤ 2, |Σ| ≤ 3.
fn det_regex() -> impl Strategy<Value = Regex> {
    (1..=3usize, prop::collection::vec(1..=2usize, 3), any::<u64>()).prop_map(|(sigma, occ, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gen_expression(&GenConfig::new(letters(sigma), occ[..sigma].to_vec()), &mut rng).unwrap()
    })
}

/// Whether the states of `small` map in order onto same-labelled states of
/// `big` so that every edge of `small` is an edge of `big`.
fn embeds(small: &Koa, big: &Koa, next: usize, map: &mut Vec<usize>) -> bool {
    if map.len() == small.n_states() {
        return small.edges().all(|(a, b)| big.has_edge(map[a], map[b]));
    }
    let s = map.len();
    for t in next..big.n_states() {
        if small.label(s) == big.label(t) {
            map.push(t);
            if embeds(small, big, t + 1, map) {
                return true;
            }
            map.pop();
        }
    }
    false
}

fn same_language(r: &Regex, s: &Regex, n: usize) -> bool {
    let alphabet: Vec<Symbol> = r.alphabet().union(&s.alphabet()).cloned().collect();
    words_upto(&alphabet, n)
        .iter()
        .all(|w| naive_accepts(r, w) == naive_accepts(s, w))
}

proptest! {
    #[test]
    fn parse_inverts_display(r in small_regex()) {
        prop_assert_eq!(parse(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn marked_parse_inverts_display(r in small_regex()) {
        let m = mark(&r);
        prop_assert_eq!(parse_marked(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn strip_inverts_mark(r in small_regex()) {
        prop_assert_eq!(strip(&mark(&r)), r);
    }

    #[test]
    fn simplify_preserves_language(r in small_regex()) {
        prop_assert!(same_language(&r, &simplify(&r), 7));
    }

    #[test]
    fn simplify_is_idempotent(r in small_regex()) {
        let once = simplify(&r);
        prop_assert_eq!(simplify(&once), once);
    }

    #[test]
    fn normalize_preserves_language(r in small_regex()) {
        prop_assert!(same_language(&r, &normalize_thm31(&r), 7));
    }

    #[test]
    fn normalize_respects_length_bound(r in small_regex()) {
        let n = normalize_thm31(&r);
        if !matches!(n, Regex::Empty | Regex::Epsilon) {
            let k = n.stats().k;
            let sigma = n.alphabet().len();
            prop_assert!(n.length() <= 10 * k * sigma, "{} has length {}", n, n.length());
        }
    }

    #[test]
    fn accepts_agrees_with_naive_matcher(r in small_regex()) {
        let alphabet: Vec<Symbol> = r.alphabet().into_iter().collect();
        for w in words_upto(&alphabet, 6) {
            prop_assert_eq!(accepts(&r, &w), naive_accepts(&r, &w), "{} on {:?}", r, w);
        }
    }

    #[test]
    fn glushkov_automaton_has_the_same_language(r in small_regex()) {
        if let Ok(g) = glushkov_automaton(&r) {
            let alphabet: Vec<Symbol> = r.alphabet().into_iter().collect();
            for w in words_upto(&alphabet, 6) {
                prop_assert_eq!(g.accepts(&w), naive_accepts(&r, &w));
            }
        }
    }

    #[test]
    fn deterministic_expressions_give_deterministic_automata(r in small_regex()) {
        if let Ok(g) = glushkov_automaton(&r) {
            if is_deterministic(&r) {
                for s in 0..g.n_states() {
                    let labels: Vec<_> = g.succ(s).iter().filter_map(|&t| g.label(t)).collect();
                    let distinct: BTreeSet<_> = labels.iter().collect();
                    prop_assert_eq!(labels.len(), distinct.len());
                }
            }
        }
    }

    #[test]
    fn counts_are_cumulatively_monotone(r in small_regex(), n in 0..10usize) {
        let counts = count_words(&r, n).unwrap();
        let cumulative = counts.cumulative();
        prop_assert!(cumulative.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn equivalence_is_reflexive(r in small_regex()) {
        prop_assert!(equivalent(&r, &r).unwrap());
    }

    #[test]
    fn equivalence_is_symmetric_and_matches_enumeration(r in regex(2), s in regex(2)) {
        let forward = equivalent(&r, &s).unwrap();
        prop_assert_eq!(forward, equivalent(&s, &r).unwrap());
        let bound = 2 * (r.atoms().len() + s.atoms().len()) + 1;
        prop_assert_eq!(forward, same_language(&r, &s, bound.min(9)));
    }

    #[test]
    fn sample_text_round_trips(words in prop::collection::vec(prop::collection::vec(0..3usize, 0..5), 1..10)) {
        let alphabet = syms(3);
        let sample: Sample = words
            .iter()
            .map(|w| w.iter().map(|&i| alphabet[i].clone()).collect::<Vec<_>>())
            .collect();
        prop_assert_eq!(Sample::parse_lines(&sample.to_lines()).unwrap(), sample);
    }

    #[test]
    fn prefix_tree_is_exact(words in prop::collection::vec(prop::collection::vec(0..2usize, 0..5), 1..8)) {
        let alphabet = syms(2);
        let sample: Sample = words
            .iter()
            .map(|w| w.iter().map(|&i| alphabet[i].clone()).collect::<Vec<_>>())
            .collect();
        let r = prefix_tree_expression(&sample).unwrap();
        prop_assert!(is_deterministic(&r));
        for w in words_upto(&alphabet, 6) {
            prop_assert_eq!(naive_accepts(&r, &w), sample.multiplicity(&w) > 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complete_koa_accepts_everything(sigma in 1..=2usize, k in 1..=3usize) {
        let alphabet: BTreeSet<Symbol> = syms(sigma).into_iter().collect();
        let g = Koa::complete(&alphabet, k).unwrap();
        let list: Vec<Symbol> = alphabet.into_iter().collect();
        prop_assert!(words_upto(&list, 6).iter().all(|w| g.accepts(w)));
    }

    #[test]
    fn generated_expressions_are_deterministic_koes(r in det_regex()) {
        prop_assert!(is_deterministic(&r));
        prop_assert!(r.is_k_ore(2));
    }

    #[test]
    fn generated_samples_are_in_the_language(r in det_regex(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen_sample(&r, &SampleGenConfig::with_size(30), &mut rng).unwrap();
        prop_assert_eq!(s.len(), 30);
        prop_assert!(s.words().all(|w| naive_accepts(&r, w)));
    }

    #[test]
    fn prune_keeps_exactly_the_witnessed_edges(r in det_regex(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen_sample(&r, &SampleGenConfig::with_size(5), &mut rng).unwrap();
        let g = glushkov_automaton(&r).unwrap();
        let pruned = g.prune(&s).unwrap();
        let mut used = BTreeSet::new();
        for w in s.words() {
            let run = g.det_run(w).unwrap().expect("sample word accepted");
            used.extend(run.windows(2).map(|p| (p[0], p[1])));
            prop_assert!(pruned.accepts(w));
        }
        // Trimming renumbers the surviving states in order.
        let alive: Vec<usize> = used.iter().flat_map(|&(a, b)| [a, b]).filter(|&v| v > 1).collect::<BTreeSet<_>>().into_iter().collect();
        let rank = |v: usize| if v < 2 { v } else { 2 + alive.iter().position(|&x| x == v).unwrap() };
        let expected: BTreeSet<_> = used.iter().map(|&(a, b)| (rank(a), rank(b))).collect();
        let kept: BTreeSet<_> = pruned.edges().collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn full_coverage_means_every_edge_is_witnessed(r in det_regex(), seed in any::<u64>(), size in 1..15usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen_sample(&r, &SampleGenConfig::with_size(size), &mut rng).unwrap();
        let g = glushkov_automaton(&r).unwrap();
        let mut used = BTreeSet::new();
        for w in s.words() {
            let run = g.det_run(w).unwrap().unwrap();
            used.extend(run.windows(2).map(|p| (p[0], p[1])));
        }
        let covers = used.len() == g.edge_count();
        prop_assert_eq!(coverage(&r, &s).unwrap().is_full(), covers);
        let full = covering_sample(&r, size, &mut rng).unwrap();
        prop_assert!(coverage(&r, &full).unwrap().is_full());
    }

    #[test]
    fn rewrite_output_is_single_occurrence(r in det_regex()) {
        let g = glushkov_automaton(&r).unwrap();
        let out = soa_to_sore(&g, &marking(&g));
        let atoms = out.expr.atoms();
        let distinct: BTreeSet<_> = atoms.iter().collect();
        prop_assert_eq!(atoms.len(), distinct.len());
    }

    #[test]
    fn language_size_ignores_simplification(r in small_regex()) {
        prop_assume!(!r.contains_empty() && is_deterministic(&r));
        prop_assert_eq!(language_size(&r).unwrap(), language_size(&simplify(&r)).unwrap());
    }

    #[test]
    fn disambiguation_yields_a_deterministic_subgraph(r in det_regex(), seed in any::<u64>(), k in 1..=3usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen_sample(&r, &SampleGenConfig::with_size(20), &mut rng).unwrap();
        let mut p = Pomm::init(k, &s, &mut rng).unwrap();
        p.baum_welch(&s, &TrainConfig::iterations(5)).unwrap();
        prop_assert!(p.max_row_error() < 1e-9);
        let before = p.graph().unwrap();
        if let Ok(g) = p.disambiguate(&s, Some(2)) {
            prop_assert!(g.is_deterministic());
            prop_assert!(s.words().all(|w| g.accepts(w)));
            prop_assert!(embeds(&g, &before, 2, &mut vec![0, 1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inference_is_sound_and_reproducible(r in det_regex(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen_sample(&r, &SampleGenConfig::with_size(25), &mut rng).unwrap();
        let cfg = InferConfig {
            kmax: 2,
            restarts: 3,
            seed,
            ..InferConfig::default()
        };
        let a = idregex(&s, &cfg).unwrap();
        prop_assert!(s.words().all(|w| naive_accepts(&a.best.expr, w)));
        prop_assert!(is_deterministic(&a.best.expr));
        let b = idregex(&s, &cfg).unwrap();
        prop_assert_eq!(&a.best.expr, &b.best.expr);
        let render = |o: &rexinfer::driver::Outcome| serde_json::to_string(&o.runs).unwrap();
        prop_assert_eq!(render(&a), render(&b));
    }
}

#[test]
fn mdl_binomial_part_vanishes_when_every_length_is_exhausted() {
    let r = parse("a b?").unwrap();
    let s = Sample::from_strs(["a", "a b"]);
    // Only the length code 2·log₂ 1 + 2·log₂ 2 remains.
    assert_eq!(mdl_cost(&r, &s).unwrap().data, 2.0);
    let r = parse("a (b | c) d?").unwrap();
    let s = Sample::from_strs(["a b", "a c", "a b d", "a c d"]);
    assert_eq!(mdl_cost(&r, &s).unwrap().data, 2.0 + 2.0 * 3f64.log2());
}
