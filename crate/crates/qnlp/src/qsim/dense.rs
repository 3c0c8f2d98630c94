//! Dense 2^n x 2^n matrix semantics of gates and circuits.
//!
//! Built by explicit Kronecker embedding and matrix products, deliberately
//! sharing no code with the in-place kernels in the simulator. Tests use this
//! module as the independent oracle for `run_circuit`; it is exponential in
//! qubit count and meant for small circuits only.

use num_complex::Complex64;

use super::circuit::single_qubit_matrix;
use super::{Circuit, Gate, GateKind, ParamStore, Result, StateVector};

/// Row-major square matrix over `dim = 2^n` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, entries }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for row in 0..dim {
            for k in 0..dim {
                let a = self.get(row, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..dim {
                    entries[row * dim + col] += a * other.get(k, col);
                }
            }
        }
        DenseMatrix { dim, entries }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|row| {
                (0..self.dim)
                    .map(|col| self.get(row, col) * v[col])
                    .sum()
            })
            .collect()
    }
}

/// Full-space unitary of one gate, built entry by entry from the gate's
/// action on basis-state bits.
pub fn gate_unitary(gate: &Gate, n_qubits: usize, params: &ParamStore) -> Result<DenseMatrix> {
    gate.validate(n_qubits)?;
    let angle = match &gate.param {
        Some(p) => p.resolve(params)?,
        None => 0.0,
    };
    let dim = 1usize << n_qubits;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut entries = vec![zero; dim * dim];

    match gate.kind {
        GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ => {
            let m = single_qubit_matrix(gate.kind, angle);
            let t = gate.targets[0];
            for col in 0..dim {
                let cb = (col >> t) & 1;
                for rb in 0..2 {
                    let row = (col & !(1 << t)) | (rb << t);
                    entries[row * dim + col] = m[rb][cb];
                }
            }
        }
        GateKind::CNOT => {
            let (c, t) = (gate.targets[0], gate.targets[1]);
            for col in 0..dim {
                let row = if (col >> c) & 1 == 1 { col ^ (1 << t) } else { col };
                entries[row * dim + col] = one;
            }
        }
        GateKind::CRZ => {
            let (c, t) = (gate.targets[0], gate.targets[1]);
            let phase = Complex64::from_polar(1.0, angle);
            for col in 0..dim {
                let both = (col >> c) & 1 == 1 && (col >> t) & 1 == 1;
                entries[col * dim + col] = if both { phase } else { one };
            }
        }
    }
    Ok(DenseMatrix { dim, entries })
}

/// Product of all gate unitaries, later gates multiplied on the left.
pub fn circuit_unitary(circuit: &Circuit, params: &ParamStore) -> Result<DenseMatrix> {
    let mut acc = DenseMatrix::identity(1 << circuit.n_qubits);
    for gate in &circuit.gates {
        let u = gate_unitary(gate, circuit.n_qubits, params)?;
        acc = u.matmul(&acc);
    }
    Ok(acc)
}

/// Runs a circuit by full matrix products: the reference implementation.
pub fn run_circuit_dense(
    circuit: &Circuit,
    params: &ParamStore,
    initial: Option<&StateVector>,
) -> Result<StateVector> {
    let u = circuit_unitary(circuit, params)?;
    let input = match initial {
        Some(s) => s.amplitudes().to_vec(),
        None => StateVector::zero_state(circuit.n_qubits).amplitudes().to_vec(),
    };
    Ok(StateVector::from_amplitudes(u.matvec(&input)))
}
