use super::simplify::fixpoint;
use super::Regex;

/// Rewrite `r` to the normal form used by the enumerative learner.
///
/// ```text
/// (s?)+ -> (s+)?    s?? -> s?     (s+)+ -> s+
/// s | ε -> s?       s ε -> s      ε? -> ε      ε+ -> ε
/// s | ∅ -> s        s ∅ -> ∅      ∅? -> ε      ∅+ -> ∅
/// ```
///
/// Each rule preserves language and determinism and never duplicates a
/// subexpression. The result is `∅`, `ε`, or free of both.
pub fn normalize_thm31<A: Clone + PartialEq>(r: &Regex<A>) -> Regex<A> {
    fixpoint(r, rewrite_node)
}

fn rewrite_node<A>(r: Regex<A>) -> Regex<A> {
    match r {
        Regex::Optional(c) => match *c {
            inner @ Regex::Optional(_) => inner,
            Regex::Epsilon | Regex::Empty => Regex::Epsilon,
            c => c.opt(),
        },
        Regex::Plus(c) => match *c {
            inner @ (Regex::Plus(_) | Regex::Epsilon | Regex::Empty) => inner,
            Regex::Optional(inner) => inner.plus().opt(),
            c => c.plus(),
        },
        Regex::Concat(cs) => {
            if cs.iter().any(|c| matches!(c, Regex::Empty)) {
                Regex::Empty
            } else {
                Regex::concat(cs.into_iter().filter(|c| !matches!(c, Regex::Epsilon)))
            }
        }
        Regex::Disj(cs) => {
            let before = cs.len();
            let mut had_eps = false;
            let rest: Vec<_> = cs
                .into_iter()
                .filter(|c| match c {
                    Regex::Empty => false,
                    Regex::Epsilon => {
                        had_eps = true;
                        false
                    }
                    _ => true,
                })
                .collect();
            match (had_eps, rest.is_empty()) {
                (false, true) => Regex::Empty,
                (true, true) => Regex::Epsilon,
                (true, false) => Regex::disj(rest).opt(),
                (false, false) if rest.len() == before => Regex::Disj(rest),
                (false, false) => Regex::disj(rest),
            }
        }
        r => r,
    }
}
