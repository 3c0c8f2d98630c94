//! Recurrent sequence classifiers: a quantum LSTM whose six gate networks
//! are variational circuits, and the classical LSTM baseline.
//!
//! The quantum cell follows the usual LSTM wiring with each dense gate
//! network replaced by a circuit evaluation: inputs are angle-encoded
//! (`RY(arctan x)`, `RZ(arctan x^2)` after a Hadamard layer), entangled by
//! cyclic CNOT rings, rotated by trainable `RY`s and read out as Pauli-Z
//! expectations. Classical linear maps surround the circuits to adapt
//! dimensions between the embedding, the hidden state and the class logits.
//!
//! Everything is trained by explicit backpropagation through time; circuit
//! Jacobians come from the exact parameter-shift rule.

mod cell;
mod classical;
mod model;
mod qnn;

pub use cell::{qlstm_cell_step, qlstm_cell_step_with, CellState, GateOverrides, QlstmParams};
pub use classical::{ClassicalLstm, LstmConfig};
pub use model::{QlstmConfig, QlstmModel};
pub use qnn::{qnn_forward, qnn_jacobians, QnnConfig, QnnJacobians};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QlstmError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty token sequence")]
    EmptySequence,
    #[error("token id {id} out of range for vocabulary of {vocab}")]
    UnknownToken { id: usize, vocab: usize },
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, QlstmError>;

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
