//! Scoring of candidate expressions and choice of the best one.

use std::cmp::Ordering;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::glushkov::{check_deterministic, count_words};
use crate::{Error, Regex, Result, Sample};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Fewest words up to length `2·occ + 1`.
    #[default]
    Size,
    /// Smallest model length plus data encoding cost.
    Mdl,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(Measure::Size),
            "mdl" => Ok(Measure::Mdl),
            _ => Err(Error::InvalidConfig(format!("unknown measure {s:?}, expected size or mdl"))),
        }
    }
}

/// The length bound `2·occ(r) + 1` at which `r` is measured.
pub fn size_bound(r: &Regex) -> usize {
    2 * r.stats().occ + 1
}

/// `|L(r)^{≤n}|` with `n = 2·occ(r) + 1`.
pub fn language_size(r: &Regex) -> Result<BigUint> {
    check_deterministic(r)?;
    Ok(count_words(r, size_bound(r))?.total())
}

fn log2_big(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() => f.log2(),
        _ => {
            let shift = x.bits().saturating_sub(64);
            (x >> shift).to_f64().unwrap().log2() + shift as f64
        }
    }
}

/// `log₂ C(n, k)` for `k ≤ n`, summed term by term.
fn log2_binomial(n: &BigUint, k: usize) -> f64 {
    (0..k)
        .map(|j| log2_big(&(n - BigUint::from(j))) - ((j + 1) as f64).log2())
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MdlCost {
    pub data: f64,
    pub model: f64,
}

impl MdlCost {
    pub fn total(&self) -> f64 {
        self.data + self.model
    }
}

/// Model cost (the expression length) and data cost
/// `Σ_i 2·log₂ i + log₂ C(|L^{=i}(r)|, |S^{=i}|)` over the lengths `i` with
/// at least one distinct sample word. The sum runs up to `2·occ(r) + 1`, or
/// the longest sample word if that is longer; `2·log₂ 0` is taken as 0.
pub fn mdl_cost(r: &Regex, sample: &Sample) -> Result<MdlCost> {
    let n = size_bound(r).max(sample.max_len());
    let counts = count_words(r, n)?;
    let mut per_len = vec![0usize; n + 1];
    for w in sample.words() {
        per_len[w.len()] += 1;
    }
    let mut data = 0.0;
    for (i, &k) in per_len.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let l = &counts.counts[i];
        if BigUint::from(k) > *l {
            return Err(Error::LengthClassOverflow {
                length: i,
                sample: k,
                language: l.to_string(),
            });
        }
        data += 2.0 * (i.max(1) as f64).log2() + log2_binomial(l, k);
    }
    Ok(MdlCost {
        data,
        model: r.length() as f64,
    })
}

fn big_string<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn serialize_display<S: Serializer>(r: &Regex, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// A deterministic expression with its scores.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    #[serde(serialize_with = "serialize_display")]
    pub expr: Regex,
    pub k: usize,
    #[serde(serialize_with = "big_string")]
    pub language_size: BigUint,
    pub mdl: MdlCost,
    pub length: usize,
}

impl Candidate {
    pub fn new(expr: Regex, sample: &Sample) -> Result<Self> {
        Ok(Candidate {
            k: expr.stats().k,
            language_size: language_size(&expr)?,
            mdl: mdl_cost(&expr, sample)?,
            length: expr.length(),
            expr,
        })
    }

    /// Order by the measure, then length, then rendered form.
    pub fn cmp_by(&self, other: &Self, measure: Measure) -> Ordering {
        let primary = match measure {
            Measure::Size => self.language_size.cmp(&other.language_size),
            Measure::Mdl => self.mdl.total().total_cmp(&other.mdl.total()),
        };
        primary
            .then(self.length.cmp(&other.length))
            .then_with(|| self.expr.to_string().cmp(&other.expr.to_string()))
    }
}

/// The best candidate under `measure`.
pub fn best(candidates: &[Candidate], measure: Measure) -> Result<&Candidate> {
    candidates
        .iter()
        .min_by(|a, b| a.cmp_by(b, measure))
        .ok_or(Error::NoCandidates)
}
