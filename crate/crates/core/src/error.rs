use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("expression is not single-occurrence: {0} occurs more than once")]
    NotSingleOccurrence(String),

    #[error("the empty-set expression is not accepted here")]
    EmptyLanguage,

    #[error("expression is not deterministic: {0}")]
    NotDeterministic(String),

    #[error("subset construction exceeded {0} states")]
    StateExplosion(usize),

    #[error("invalid automaton: {0}")]
    InvalidKoa(String),

    #[error("automaton is not deterministic")]
    NondeterministicAutomaton,

    #[error("sample word {word:?} is rejected by the automaton")]
    WordRejected { word: String },

    #[error("sample word {word:?} has zero probability under the model")]
    ZeroProbability { word: String },

    #[error("empty sample")]
    EmptySample,

    #[error("empty alphabet")]
    EmptyAlphabet,

    #[error("sample has {sample} words of length {length} but the language only has {language}")]
    LengthClassOverflow {
        length: usize,
        sample: usize,
        language: String,
    },

    #[error("empty candidate set")]
    NoCandidates,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("enumeration limit exceeded: {0}")]
    Enumeration(String),

    #[error("sample format error on line {line}: {msg}")]
    SampleFormat { line: usize, msg: String },
}
