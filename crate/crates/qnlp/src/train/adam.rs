//! Adam optimizer over a flat parameter vector.

use serde::{Deserialize, Serialize};

use super::{Result, TrainError};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

/// First/second moment estimates plus the step counter for bias correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One Adam update, in place. Rejects non-finite gradients.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut [f64],
    grads: &[f64],
    learning_rate: f64,
) -> Result<()> {
    assert_eq!(params.len(), grads.len(), "gradient length mismatch");
    assert_eq!(params.len(), state.m.len(), "optimizer state length mismatch");
    if let Some(idx) = grads.iter().position(|g| !g.is_finite()) {
        return Err(TrainError::NonFiniteGradient(idx));
    }

    state.step += 1;
    let t = state.step as i32;
    let m_corr = 1.0 - BETA1.powi(t);
    let v_corr = 1.0 - BETA2.powi(t);
    for i in 0..params.len() {
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * grads[i];
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * grads[i] * grads[i];
        let m_hat = state.m[i] / m_corr;
        let v_hat = state.v[i] / v_corr;
        params[i] -= learning_rate * m_hat / (v_hat.sqrt() + EPSILON);
    }
    Ok(())
}
