//! Combinatorics of unavoidable (Zimin) words: encounter testing, exhaustive
//! avoidance search, exact word densities, guaranteed-precision asymptotic
//! instance probabilities, and de Bruijn-graph density heuristics.
//!
//! Letters are small integer codes; the CLI maps the text alphabet `0-9a-z`
//! onto codes. All arithmetic that feeds a reported bound is exact
//! (big integers / big rationals); floats appear only at serialization.

pub mod cli;
pub mod debruijn;
pub mod density;
pub mod packed;
pub mod patterns;
pub mod search;
pub mod series;
pub mod words;

use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: [{i}, {j}) not within word of length {len}")]
    IndexOutOfRange { i: usize, j: usize, len: usize },
    #[error("operation requires a nonempty word")]
    EmptyWord,
    #[error("letter code {code} exceeds alphabet size {q}")]
    LetterOutOfAlphabet { code: u8, q: u8 },
    #[error("alphabet size {0} not supported (need 1 <= q <= 36)")]
    BadAlphabet(u64),
    #[error("enumeration of {count} words exceeds budget {budget}")]
    EnumerationBudget { count: u128, budget: u128 },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
    #[error("unavoidability deciders disagree on {0:?}: zimin={1}, bem={2}")]
    DeciderDisagreement(String, bool, bool),
    #[error("{0}")]
    InvalidInput(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("alternating-series monotonicity violated at term {0}")]
    MonotonicityViolated(usize),
    #[error("singular stationary system: {0}")]
    SingularSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
