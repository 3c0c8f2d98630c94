use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cell::{step_backward, step_forward, CellState, GateOverrides, QlstmParams, StepTrace,
    StepUpstream};
use super::qnn::QnnConfig;
use super::{QlstmError, Result};
use crate::train::{categorical_cross_entropy, categorical_cross_entropy_grad};

/// Dimensions of the quantum sequence classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlstmConfig {
    pub qnn: QnnConfig,
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    pub classes: usize,
    /// When set, `y_t = h_t` (requires `classes == hidden`).
    pub collapse_output: bool,
}

impl QlstmConfig {
    /// Paper-shaped defaults: four qubits, one layer, offsets {1, 2}, hidden
    /// size equal to the qubit count, three classes, embedding width 5.
    pub fn defaults(vocab_size: usize) -> Self {
        QlstmConfig {
            qnn: QnnConfig::default(),
            vocab_size,
            embed_dim: 5,
            hidden: 4,
            classes: 3,
            collapse_output: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.qnn.validate()?;
        if self.vocab_size == 0 || self.embed_dim == 0 || self.hidden == 0 || self.classes == 0 {
            return Err(QlstmError::BadConfig("all dimensions must be positive".into()));
        }
        if self.collapse_output && self.classes != self.hidden {
            return Err(QlstmError::BadConfig(
                "collapsed output requires classes == hidden".into(),
            ));
        }
        Ok(())
    }
}

/// The quantum LSTM classifier: embedding, recurrent quantum cell, and the
/// final step's output as class logits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlstmModel {
    pub config: QlstmConfig,
    pub params: QlstmParams,
}

impl QlstmModel {
    pub fn new(config: QlstmConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = QlstmParams::init(&config, &mut rng);
        Ok(QlstmModel { config, params })
    }

    fn check_tokens(&self, token_ids: &[usize]) -> Result<()> {
        if token_ids.is_empty() {
            return Err(QlstmError::EmptySequence);
        }
        if let Some(&id) = token_ids.iter().find(|&&id| id >= self.config.vocab_size) {
            return Err(QlstmError::UnknownToken {
                id,
                vocab: self.config.vocab_size,
            });
        }
        Ok(())
    }

    fn embed(&self, token_id: usize) -> &[f64] {
        let e = self.config.embed_dim;
        &self.params.embedding[token_id * e..(token_id + 1) * e]
    }

    fn run_sequence(&self, token_ids: &[usize]) -> Result<(Vec<f64>, Vec<StepTrace>)> {
        self.check_tokens(token_ids)?;
        let mut state = CellState::zeros(self.config.hidden);
        let mut traces = Vec::with_capacity(token_ids.len());
        let mut y = Vec::new();
        for &id in token_ids {
            let x = self.embed(id).to_vec();
            let (next, y_t, trace) =
                step_forward(&self.config, &self.params, &state, &x, &GateOverrides::default())?;
            traces.push(trace);
            state = next;
            y = y_t;
        }
        Ok((y, traces))
    }

    /// Final-step output as class logits.
    pub fn sequence_forward(&self, token_ids: &[usize]) -> Result<Vec<f64>> {
        Ok(self.run_sequence(token_ids)?.0)
    }

    pub fn predict(&self, token_ids: &[usize]) -> Result<usize> {
        let logits = self.sequence_forward(token_ids)?;
        Ok(argmax(&logits))
    }

    pub fn loss(&self, token_ids: &[usize], label: u8) -> Result<f64> {
        let logits = self.sequence_forward(token_ids)?;
        categorical_cross_entropy(&logits, label)
            .map_err(|e| QlstmError::BadConfig(e.to_string()))
    }

    /// Cross-entropy loss and its gradient over the canonical flat parameter
    /// vector, by backpropagation through time.
    pub fn loss_and_grad(&self, token_ids: &[usize], label: u8) -> Result<(f64, Vec<f64>)> {
        let (logits, traces) = self.run_sequence(token_ids)?;
        let loss = categorical_cross_entropy(&logits, label)
            .map_err(|e| QlstmError::BadConfig(e.to_string()))?;
        let dy_last = categorical_cross_entropy_grad(&logits, label)
            .map_err(|e| QlstmError::BadConfig(e.to_string()))?;

        let mut grads = QlstmParams::zeros(&self.config);
        let mut dh = vec![0.0; self.config.hidden];
        let mut dc = vec![0.0; self.config.hidden];
        let empty: Vec<f64> = Vec::new();
        for (t, trace) in traces.iter().enumerate().rev() {
            let dy = if t + 1 == traces.len() { &dy_last } else { &empty };
            let down = step_backward(
                &self.config,
                &self.params,
                trace,
                &StepUpstream {
                    dh: &dh,
                    dc: &dc,
                    dy,
                },
                &mut grads,
            )?;
            // Token embedding rows receive the input gradient.
            let e = self.config.embed_dim;
            let row = token_ids[t] * e;
            for (j, d) in down.dx.iter().enumerate() {
                grads.embedding[row + j] += d;
            }
            dh = down.dh_prev;
            dc = down.dc_prev;
        }
        Ok((loss, grads.flatten()))
    }

    pub fn n_params(&self) -> usize {
        self.params.n_params()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        self.params.flatten()
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) {
        self.params.assign_flat(flat);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: QlstmModel =
            serde_json::from_str(text).map_err(|e| QlstmError::Checkpoint(e.to_string()))?;
        model.config.validate()?;
        let expected = QlstmParams::zeros(&model.config).n_params();
        if model.params.n_params() != expected {
            return Err(QlstmError::Checkpoint(format!(
                "parameter count {} does not match config ({expected})",
                model.params.n_params()
            )));
        }
        Ok(model)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests;
