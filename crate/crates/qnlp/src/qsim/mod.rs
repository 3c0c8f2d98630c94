//! Exact dense statevector simulation of parameterized circuits.
//!
//! Conventions (fixed, and relied on by the circuit JSON format):
//!
//! * Qubit `i` is bit `i` of the basis-state index, qubit 0 least significant.
//! * `RX(t) = exp(-i t X / 2)`, `RY(t) = exp(-i t Y / 2)`,
//!   `RZ(t) = exp(-i t Z / 2)`.
//! * `CRZ(t) = diag(1, 1, 1, e^{i t})` in control (x) target ordering, i.e. the
//!   phase applies when control and target are both `|1>`.
//!
//! Rotation gates may carry either a literal angle or a symbolic reference
//! into a [`ParamStore`]; symbolic circuits are what the gradient engine in
//! [`grad`] differentiates.

mod circuit;
mod gradient;
mod state;

pub mod dense;

pub use circuit::{Circuit, Gate, GateKind, Param};
pub use gradient::{param_shift_grad, param_shift_grad_vec};
pub use state::{expectation_z, postselect, StateVector};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Success probability below which a post-selection is considered degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QsimError {
    #[error("unresolved parameter `{0}`")]
    UnresolvedParam(String),
    #[error("invalid target qubit {target} for {n_qubits}-qubit state")]
    InvalidTarget { target: usize, n_qubits: usize },
    #[error("gate targets must be distinct")]
    DuplicateTargets,
    #[error("gate {kind:?} expects {expected} target(s), got {got}")]
    WrongArity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate {0:?} does not take a parameter")]
    UnexpectedParam(GateKind),
    #[error("gate {0:?} requires a parameter")]
    MissingParam(GateKind),
    #[error("post-selection pattern is degenerate (success probability {success_prob:e})")]
    DegeneratePostselection { success_prob: f64 },
    #[error("post-selection bit for qubit {0} must be 0 or 1")]
    InvalidPatternBit(usize),
    #[error("circuit JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, QsimError>;

/// Named angle table shared by every circuit that references its symbols.
///
/// One store holds the trainable embedding angles for a whole model; circuits
/// only carry symbolic references, so updating the store between optimizer
/// steps retunes every compiled sentence at once.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamStore {
    values: BTreeMap<String, f64>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| QsimError::UnresolvedParam(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    /// Inserts `name` with a value drawn from `init` unless already present.
    pub fn ensure(&mut self, name: &str, init: impl FnOnce() -> f64) {
        if !self.values.contains_key(name) {
            self.values.insert(name.to_string(), init());
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Names in sorted order; the canonical flattening used by the optimizer.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Values in name-sorted order.
    pub fn to_vec(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }

    /// Overwrites values in name-sorted order; lengths must match.
    pub fn assign_from_vec(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.values.len(), "parameter count mismatch");
        for (slot, v) in self.values.values_mut().zip(flat) {
            *slot = *v;
        }
    }
}

/// Applies a single gate, returning the new state.
pub fn apply_gate(state: &StateVector, gate: &Gate, params: &ParamStore) -> Result<StateVector> {
    let mut out = state.clone();
    circuit::apply_gate_in_place(&mut out, gate, params)?;
    Ok(out)
}

/// Runs a circuit left to right. `initial` defaults to `|0...0>`.
pub fn run_circuit(
    circuit: &Circuit,
    params: &ParamStore,
    initial: Option<&StateVector>,
) -> Result<StateVector> {
    let mut state = match initial {
        Some(s) => {
            if s.n_qubits() != circuit.n_qubits {
                return Err(QsimError::InvalidTarget {
                    target: circuit.n_qubits,
                    n_qubits: s.n_qubits(),
                });
            }
            s.clone()
        }
        None => StateVector::zero_state(circuit.n_qubits),
    };
    for gate in &circuit.gates {
        circuit::apply_gate_in_place(&mut state, gate, params)?;
    }
    Ok(state)
}
