//! Compositional sentence circuits: diagrams, rewrites and compilation.
//!
//! A reduced sentence becomes a string diagram: one state box per word with
//! one wire per simple type, cups joining contracted positions, and a single
//! open sentence wire. [`bend_rewrite`] folds single-wire noun states into
//! effects on their cup partners (the shape that minimizes qubit count), and
//! [`compile`] lowers either form onto the simulator's gate set:
//!
//! * a 1-qubit word box is the Euler embedding `RX RZ RX`;
//! * a d-qubit word box is d entangling layers (Hadamards, then a chain of
//!   parameterized CRZ gates over neighbouring qubits);
//! * an effect box is the transposed word unitary followed by post-selecting
//!   its qubits to `|0>`;
//! * a surviving cup is a Bell effect per qubit pair (CNOT, H on the left,
//!   post-select both).
//!
//! Every gate in the word-box gate set has a symmetric matrix, so the
//! transpose of a box circuit is exactly its gate list reversed. Compiling an
//! effect this way makes the bent and unbent forms of a diagram agree on the
//! conditional sentiment distribution identically, not just approximately.
//!
//! Parameters are scoped per (word, pregroup type), so every occurrence of a
//! word across the corpus shares one embedding.

mod compile;
mod diagram;

pub use compile::{
    compile, compile_sentence, discocat_grad, discocat_loss, sentiment_prob, CompiledBox,
    CompiledSentence, SentenceError, SentimentEval,
};
pub use diagram::{build_diagram, bend_rewrite, BoxKind, Diagram, WordBox};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::Atom;

/// Binary cross-entropy probability clamp.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiscocatError {
    #[error("derivation residue is not a single sentence wire")]
    NotASentenceDerivation,
    #[error("no qubit count configured for atom `{0}`")]
    MissingAnsatz(Atom),
    #[error("sentiment readout needs exactly one sentence qubit, got {0}")]
    NonBinarySentenceSpace(usize),
    #[error(transparent)]
    Sim(#[from] crate::qsim::QsimError),
}

pub type Result<T> = std::result::Result<T, DiscocatError>;

/// Qubit widths per wire atom.
///
/// `noun_qubits` is the dimension exponent of the noun space and drives the
/// post-selection cost; the default keeps both spaces at one qubit, which is
/// the binary-classification setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub noun_qubits: usize,
    pub sentence_qubits: usize,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        AnsatzConfig {
            noun_qubits: 1,
            sentence_qubits: 1,
        }
    }
}

impl AnsatzConfig {
    pub fn qubits_for(&self, atom: Atom) -> Result<usize> {
        let count = match atom {
            Atom::N => self.noun_qubits,
            Atom::S => self.sentence_qubits,
        };
        if count == 0 {
            return Err(DiscocatError::MissingAnsatz(atom));
        }
        Ok(count)
    }

    /// Entangling depth of a word box: one layer per qubit it spans.
    pub fn iqp_layers(&self, box_qubits: usize) -> usize {
        box_qubits
    }
}
