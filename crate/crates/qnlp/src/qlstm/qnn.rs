use serde::{Deserialize, Serialize};

use super::{QlstmError, Result};
use crate::qsim::{expectation_z, run_circuit, Circuit, Gate, Param};

/// Shape of one gate network's circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QnnConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    /// Cyclic CNOT strides: for each `k`, qubit `i` controls `(i + k) mod n`.
    pub cnot_offsets: Vec<usize>,
}

impl Default for QnnConfig {
    fn default() -> Self {
        QnnConfig {
            n_qubits: 4,
            n_layers: 1,
            cnot_offsets: vec![1, 2],
        }
    }
}

impl QnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(QlstmError::BadConfig("need at least 2 qubits".into()));
        }
        if self.n_layers == 0 {
            return Err(QlstmError::BadConfig("need at least one layer".into()));
        }
        if self.cnot_offsets.iter().any(|&k| k % self.n_qubits == 0) {
            return Err(QlstmError::BadConfig(
                "cnot offsets must be nonzero mod n_qubits".into(),
            ));
        }
        Ok(())
    }

    /// Trainable rotation count: one RY per qubit per layer.
    pub fn n_angles(&self) -> usize {
        self.n_layers * self.n_qubits
    }
}

/// Builds the circuit with literal angles, remembering which gate index holds
/// each shiftable rotation.
struct BuiltQnn {
    circuit: Circuit,
    enc_ry: Vec<usize>,
    enc_rz: Vec<usize>,
    trainable: Vec<usize>,
}

fn build_qnn(config: &QnnConfig, angles: &[f64], x: &[f64]) -> BuiltQnn {
    let n = config.n_qubits;
    let mut circuit = Circuit::new(n);
    let mut enc_ry = Vec::with_capacity(n);
    let mut enc_rz = Vec::with_capacity(n);
    let mut trainable = Vec::with_capacity(config.n_angles());

    for q in 0..n {
        circuit.push(Gate::h(q));
    }
    for (q, &xq) in x.iter().enumerate() {
        enc_ry.push(circuit.gates.len());
        circuit.push(Gate::ry(q, Param::Lit(xq.atan())));
    }
    for (q, &xq) in x.iter().enumerate() {
        enc_rz.push(circuit.gates.len());
        circuit.push(Gate::rz(q, Param::Lit((xq * xq).atan())));
    }
    for layer in 0..config.n_layers {
        for &k in &config.cnot_offsets {
            for q in 0..n {
                circuit.push(Gate::cnot(q, (q + k) % n));
            }
        }
        for q in 0..n {
            trainable.push(circuit.gates.len());
            circuit.push(Gate::ry(q, Param::Lit(angles[layer * n + q])));
        }
    }
    BuiltQnn {
        circuit,
        enc_ry,
        enc_rz,
        trainable,
    }
}

fn all_z(circuit: &Circuit) -> Vec<f64> {
    let state = run_circuit(circuit, &crate::qsim::ParamStore::new(), None)
        .expect("literal-angle circuit always runs");
    (0..circuit.n_qubits)
        .map(|q| expectation_z(&state, q).expect("qubit in range"))
        .collect()
}

fn check_dims(config: &QnnConfig, angles: &[f64], x: &[f64]) -> Result<()> {
    config.validate()?;
    if x.len() != config.n_qubits {
        return Err(QlstmError::DimensionMismatch(format!(
            "input length {} vs {} qubits",
            x.len(),
            config.n_qubits
        )));
    }
    if angles.len() != config.n_angles() {
        return Err(QlstmError::DimensionMismatch(format!(
            "angle count {} vs expected {}",
            angles.len(),
            config.n_angles()
        )));
    }
    Ok(())
}

/// One gate-network evaluation: encodes `x`, applies the variational layers
/// and returns every qubit's Z expectation (all components in [-1, 1]).
pub fn qnn_forward(config: &QnnConfig, angles: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_dims(config, angles, x)?;
    Ok(all_z(&build_qnn(config, angles, x).circuit))
}

/// Output Jacobians of one gate network.
#[derive(Debug, Clone)]
pub struct QnnJacobians {
    /// Forward outputs, reused by callers.
    pub output: Vec<f64>,
    /// `d output[row] / d x[col]`, including the arctan encoding chain.
    pub d_x: Vec<Vec<f64>>,
    /// `d output[row] / d angles[col]`.
    pub d_angles: Vec<Vec<f64>>,
}

/// Forward pass plus exact derivatives via the parameter-shift rule applied
/// to every rotation (trainable and encoding alike; the arctan chain rule is
/// folded into the input Jacobian).
pub fn qnn_jacobians(config: &QnnConfig, angles: &[f64], x: &[f64]) -> Result<QnnJacobians> {
    check_dims(config, angles, x)?;
    let n = config.n_qubits;
    let mut built = build_qnn(config, angles, x);
    let output = all_z(&built.circuit);

    let mut shift_column = |gate_idx: usize| -> Vec<f64> {
        let original = built.circuit.gates[gate_idx].param.clone();
        let Some(Param::Lit(base)) = original else {
            unreachable!("qnn gates carry literal angles")
        };
        let half_pi = std::f64::consts::FRAC_PI_2;
        built.circuit.gates[gate_idx].param = Some(Param::Lit(base + half_pi));
        let plus = all_z(&built.circuit);
        built.circuit.gates[gate_idx].param = Some(Param::Lit(base - half_pi));
        let minus = all_z(&built.circuit);
        built.circuit.gates[gate_idx].param = Some(Param::Lit(base));
        plus.iter().zip(&minus).map(|(p, m)| 0.5 * (p - m)).collect()
    };

    let mut d_x = vec![vec![0.0; n]; n];
    for col in 0..n {
        let ry_col = shift_column(built.enc_ry[col]);
        let rz_col = shift_column(built.enc_rz[col]);
        let xq = x[col];
        let d_atan = 1.0 / (1.0 + xq * xq);
        let d_atan_sq = 2.0 * xq / (1.0 + xq.powi(4));
        for row in 0..n {
            d_x[row][col] = ry_col[row] * d_atan + rz_col[row] * d_atan_sq;
        }
    }

    let n_angles = config.n_angles();
    let mut d_angles = vec![vec![0.0; n_angles]; n];
    for col in 0..n_angles {
        let shift_col = shift_column(built.trainable[col]);
        for row in 0..n {
            d_angles[row][col] = shift_col[row];
        }
    }

    Ok(QnnJacobians {
        output,
        d_x,
        d_angles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::dense::run_circuit_dense;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_inputs_and_angles_give_unbiased_outputs() {
        let config = QnnConfig::default();
        let out = qnn_forward(&config, &vec![0.0; 4], &vec![0.0; 4]).unwrap();
        for z in out {
            assert!(z.abs() < 1e-10, "expected unbiased output, got {z}");
        }
    }

    #[test]
    fn outputs_bounded_by_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = QnnConfig::default();
        for _ in 0..10 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let angles: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..6.28)).collect();
            for z in qnn_forward(&config, &angles, &x).unwrap() {
                assert!((-1.0..=1.0).contains(&z));
            }
        }
    }

    #[test]
    fn two_qubit_network_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let config = QnnConfig {
            n_qubits: 2,
            n_layers: 1,
            cnot_offsets: vec![1],
        };
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let angles: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..6.28)).collect();
        let out = qnn_forward(&config, &angles, &x).unwrap();

        let built = super::build_qnn(&config, &angles, &x);
        let state = run_circuit_dense(&built.circuit, &crate::qsim::ParamStore::new(), None).unwrap();
        for (q, &z) in out.iter().enumerate() {
            let expected = crate::qsim::expectation_z(&state, q).unwrap();
            assert!((z - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = QnnConfig::default();
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let angles: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..6.28)).collect();
        let jac = qnn_jacobians(&config, &angles, &x).unwrap();
        let h = 1e-6;

        for col in 0..4 {
            let mut xp = x.clone();
            xp[col] += h;
            let mut xm = x.clone();
            xm[col] -= h;
            let fp = qnn_forward(&config, &angles, &xp).unwrap();
            let fm = qnn_forward(&config, &angles, &xm).unwrap();
            for row in 0..4 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                assert!((jac.d_x[row][col] - fd).abs() < 1e-6, "d_x[{row}][{col}]");
            }
        }
        for col in 0..4 {
            let mut ap = angles.clone();
            ap[col] += h;
            let mut am = angles.clone();
            am[col] -= h;
            let fp = qnn_forward(&config, &ap, &x).unwrap();
            let fm = qnn_forward(&config, &am, &x).unwrap();
            for row in 0..4 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                assert!((jac.d_angles[row][col] - fd).abs() < 1e-6, "d_angles[{row}][{col}]");
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let config = QnnConfig::default();
        assert!(matches!(
            qnn_forward(&config, &vec![0.0; 4], &vec![0.0; 3]),
            Err(QlstmError::DimensionMismatch(_))
        ));
        assert!(matches!(
            qnn_forward(&config, &vec![0.0; 5], &vec![0.0; 4]),
            Err(QlstmError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn invalid_offsets_rejected() {
        let config = QnnConfig {
            n_qubits: 4,
            n_layers: 1,
            cnot_offsets: vec![4],
        };
        assert!(config.validate().is_err());
    }
}
