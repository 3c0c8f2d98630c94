//! Pregroup type system and lexicon-driven sentence reduction.
//!
//! A word's grammatical role is a [`PregroupType`]: a sequence of atoms
//! (`n` for nouns, `s` for sentences) decorated with adjoint orders. A string
//! of words is grammatical when the concatenation of its types contracts down
//! to a single `s` via the rules `a^l . a -> 1` and `a . a^r -> 1`; the
//! contraction structure is recorded as a [`Derivation`] whose cups later
//! become wire bends in the circuit compiler.
//!
//! Coverage is a deliberately restricted English fragment (nouns, adjectives,
//! determiners, transitive/intransitive verbs, sentence-final adverbs) driven
//! entirely by a [`Lexicon`]; there is no statistical parsing.

mod lexicon;
mod reduce;
mod types;

pub use lexicon::{assign_types, tokenize, Lexicon};
pub use reduce::{reduce, replay_contractions, Derivation};
pub use types::{parse_type, Atom, PregroupType, SimpleType};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GrammarError {
    #[error("type expression syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("not a sentence: best residue `{best_residue}`")]
    NotASentence { best_residue: String },
    #[error("lexicon line {line}: {message}")]
    LexiconFormat { line: usize, message: String },
    #[error("adjoint order {0} out of supported range [-2, 2]")]
    AdjointOutOfRange(i32),
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, GrammarError>;
