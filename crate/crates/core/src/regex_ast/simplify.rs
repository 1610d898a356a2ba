use super::Regex;

/// Syntactic simplification applied to generated and inferred expressions.
///
/// Rules, applied innermost-first until nothing changes:
///
/// ```text
/// r??              -> r?
/// (r+)+            -> r+
/// (r?)+            -> (r+)?
/// (r1? r2? ...)?   -> r1? r2? ...
/// (r1 | r2+)+      -> (r1 | r2)+
/// (r1 r2+ r3)+     -> (r1 r2 r3)+      if r1 and r3 are nullable
/// r1 | r2?         -> (r1 | r2)?
/// ```
///
/// Associativity is handled by the flattening constructors and `r*` never
/// occurs in the AST. The rewriting preserves the language, never adds a
/// symbol occurrence, and maps deterministic expressions to deterministic
/// expressions.
pub fn simplify<A: Clone + PartialEq>(r: &Regex<A>) -> Regex<A> {
    fixpoint(r, rewrite_node)
}

pub(super) fn fixpoint<A: Clone + PartialEq>(
    r: &Regex<A>,
    node: fn(Regex<A>) -> Regex<A>,
) -> Regex<A> {
    let mut cur = r.clone();
    loop {
        let next = pass(&cur, node);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn pass<A: Clone>(r: &Regex<A>, node: fn(Regex<A>) -> Regex<A>) -> Regex<A> {
    let rebuilt = match r {
        Regex::Concat(cs) => Regex::concat(cs.iter().map(|c| pass(c, node))),
        Regex::Disj(cs) => Regex::disj(cs.iter().map(|c| pass(c, node))),
        Regex::Optional(c) => pass(c, node).opt(),
        Regex::Plus(c) => pass(c, node).plus(),
        leaf => leaf.clone(),
    };
    node(rebuilt)
}

fn rewrite_node<A>(r: Regex<A>) -> Regex<A> {
    match r {
        Regex::Optional(c) => match *c {
            inner @ Regex::Optional(_) => inner,
            Regex::Concat(cs) if cs.iter().all(|c| matches!(c, Regex::Optional(_))) => {
                Regex::Concat(cs)
            }
            c => c.opt(),
        },
        Regex::Plus(c) => match *c {
            inner @ Regex::Plus(_) => inner,
            Regex::Optional(inner) => inner.plus().opt(),
            Regex::Disj(cs) if cs.iter().any(|c| matches!(c, Regex::Plus(_))) => {
                Regex::disj(cs.into_iter().map(|c| match c {
                    Regex::Plus(inner) => *inner,
                    c => c,
                }))
                .plus()
            }
            Regex::Concat(mut cs) => {
                let nullable: Vec<bool> = cs.iter().map(Regex::nullable).collect();
                let blocking = nullable.iter().filter(|n| !**n).count();
                for (i, c) in cs.iter_mut().enumerate() {
                    if blocking > usize::from(!nullable[i]) {
                        continue;
                    }
                    *c = match std::mem::replace(c, Regex::Epsilon) {
                        Regex::Plus(inner) => *inner,
                        Regex::Optional(o) => match *o {
                            Regex::Plus(inner) => inner.opt(),
                            o => o.opt(),
                        },
                        other => other,
                    };
                }
                Regex::Concat(cs).plus()
            }
            c => c.plus(),
        },
        Regex::Disj(cs) if cs.iter().any(|c| matches!(c, Regex::Optional(_))) => {
            Regex::disj(cs.into_iter().map(|c| match c {
                Regex::Optional(inner) => *inner,
                c => c,
            }))
            .opt()
        }
        r => r,
    }
}

/// Sort the operands of every disjunction, giving one representative per
/// commutativity class.
pub fn canonical<A: Clone + Ord>(r: &Regex<A>) -> Regex<A> {
    match r {
        Regex::Concat(cs) => Regex::Concat(cs.iter().map(canonical).collect()),
        Regex::Disj(cs) => {
            let mut cs: Vec<_> = cs.iter().map(canonical).collect();
            cs.sort();
            Regex::Disj(cs)
        }
        Regex::Optional(c) => canonical(c).opt(),
        Regex::Plus(c) => canonical(c).plus(),
        leaf => leaf.clone(),
    }
}
