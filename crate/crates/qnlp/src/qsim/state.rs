use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{QsimError, Result, DEGENERACY_THRESHOLD};

/// Normalized complex amplitudes over the 2^n computational basis states.
///
/// Basis index bit `i` is the state of qubit `i` (qubit 0 = least significant
/// bit).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Builds a state from raw amplitudes. Length must be a power of two;
    /// the caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two(), "length must be a power of two");
        let n_qubits = amps.len().trailing_zeros() as usize;
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of measuring `qubit` as 1.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(QsimError::InvalidTarget {
                target: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

/// Pauli-Z expectation of one qubit: `P(0) - P(1)`.
pub fn expectation_z(state: &StateVector, qubit: usize) -> Result<f64> {
    let p1 = state.prob_one(qubit)?;
    Ok(1.0 - 2.0 * p1)
}

/// Projects designated qubits onto required bits and renormalizes the rest.
///
/// Returns the success probability together with the conditional state over
/// the unconstrained qubits (which keep their relative order). A pattern with
/// success probability below [`DEGENERACY_THRESHOLD`] yields
/// [`QsimError::DegeneratePostselection`], carrying the probability so the
/// caller can decide policy.
pub fn postselect(
    state: &StateVector,
    pattern: &BTreeMap<usize, u8>,
) -> Result<(f64, StateVector)> {
    let n = state.n_qubits();
    let mut required_mask = 0usize;
    let mut required_bits = 0usize;
    for (&qubit, &bit) in pattern {
        if qubit >= n {
            return Err(QsimError::InvalidTarget {
                target: qubit,
                n_qubits: n,
            });
        }
        if bit > 1 {
            return Err(QsimError::InvalidPatternBit(qubit));
        }
        required_mask |= 1 << qubit;
        required_bits |= (bit as usize) << qubit;
    }

    let kept: Vec<usize> = (0..n).filter(|q| required_mask & (1 << q) == 0).collect();
    let mut success = 0.0;
    let mut conditional = vec![Complex64::new(0.0, 0.0); 1 << kept.len()];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if idx & required_mask != required_bits {
            continue;
        }
        success += amp.norm_sqr();
        let mut out_idx = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            out_idx |= ((idx >> q) & 1) << pos;
        }
        conditional[out_idx] = *amp;
    }

    if success < DEGENERACY_THRESHOLD {
        return Err(QsimError::DegeneratePostselection {
            success_prob: success,
        });
    }

    let scale = 1.0 / success.sqrt();
    for a in &mut conditional {
        *a *= scale;
    }
    Ok((success, StateVector::from_amplitudes(conditional)))
}
