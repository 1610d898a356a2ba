//! Inference of concise deterministic regular expressions from positive
//! example words.
//!
//! The pipeline learns, for increasing occurrence bounds `k`, a
//! deterministic k-occurrence automaton from a sample by training a
//! partially observable Markov model and pruning it, rewrites each automaton
//! into a k-occurrence regular expression, keeps the deterministic results
//! and returns the candidate that describes the sample best.
//!
//! ```
//! use rexinfer::{driver::{idregex, InferConfig}, Sample};
//!
//! let sample = Sample::parse_lines("a b\na a b\na b b\n").unwrap();
//! let outcome = idregex(&sample, &InferConfig::default()).unwrap();
//! assert!(sample.words().all(|w| rexinfer::glushkov::accepts(&outcome.best.expr, w)));
//! ```

pub mod datagen;
pub mod driver;
mod automata;
mod error;
pub mod glushkov;
pub mod koa;
pub mod oracle;
pub mod pomm;
pub mod regex_ast;
pub mod rewrite;
mod sample;
pub mod select;

pub use error::{Error, Result};
pub use koa::Koa;
pub use regex_ast::{Marked, Regex, Symbol};
pub use sample::{Sample, Word};
