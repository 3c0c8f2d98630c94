//! Quantum natural language processing toolkit for sentiment classification.
//!
//! Two model families are implemented end to end, together with everything
//! needed to train and compare them on small financial-sentiment datasets:
//!
//! * **Grammar-compiled circuits**: sentences are parsed with a pregroup
//!   lexicon ([`grammar`]), turned into string diagrams and compiled into
//!   post-selected parameterized quantum circuits ([`discocat`]).
//! * **Quantum LSTM**: a recurrent cell whose gate networks are variational
//!   quantum circuits, plus a classical LSTM baseline ([`qlstm`]).
//!
//! Both run on the exact dense statevector simulator in [`qsim`], which also
//! provides parameter-shift gradients. [`data`] generates and loads labelled
//! sentence datasets, and [`train`] holds the losses, the Adam optimizer and
//! the training loop.

pub mod data;
pub mod discocat;
pub mod grammar;
pub mod qlstm;
pub mod qsim;
pub mod train;
