use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cell::Linear;
use super::model::argmax;
use super::{sigmoid, QlstmError, Result};
use crate::train::{categorical_cross_entropy, categorical_cross_entropy_grad};

/// Classical baseline dimensions. The defaults mirror the low-complexity
/// tuning: embedding width 5, one LSTM layer, a ReLU layer of size 8 and no
/// dropout; the moderate preset doubles the widths and uses dropout 0.1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    pub fc_dim: usize,
    pub classes: usize,
    pub dropout: f64,
}

impl LstmConfig {
    pub fn defaults(vocab_size: usize) -> Self {
        LstmConfig {
            vocab_size,
            embed_dim: 5,
            hidden: 8,
            fc_dim: 8,
            classes: 3,
            dropout: 0.0,
        }
    }

    pub fn moderate(vocab_size: usize) -> Self {
        LstmConfig {
            vocab_size,
            embed_dim: 10,
            hidden: 16,
            fc_dim: 16,
            classes: 3,
            dropout: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vocab_size == 0
            || self.embed_dim == 0
            || self.hidden == 0
            || self.fc_dim == 0
            || self.classes == 0
        {
            return Err(QlstmError::BadConfig("all dimensions must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(QlstmError::BadConfig("dropout must be in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LstmParams {
    embedding: Vec<f64>,
    w_f: Linear,
    w_i: Linear,
    w_g: Linear,
    w_o: Linear,
    fc: Linear,
    out: Linear,
}

impl LstmParams {
    fn init(config: &LstmConfig, rng: &mut impl Rng) -> Self {
        let concat = config.hidden + config.embed_dim;
        let embed_bound = 1.0 / (config.embed_dim as f64).sqrt();
        LstmParams {
            embedding: (0..config.vocab_size * config.embed_dim)
                .map(|_| rng.gen_range(-embed_bound..embed_bound))
                .collect(),
            w_f: Linear::init(config.hidden, concat, rng),
            w_i: Linear::init(config.hidden, concat, rng),
            w_g: Linear::init(config.hidden, concat, rng),
            w_o: Linear::init(config.hidden, concat, rng),
            fc: Linear::init(config.fc_dim, config.hidden, rng),
            out: Linear::init(config.classes, config.fc_dim, rng),
        }
    }

    fn zeros(config: &LstmConfig) -> Self {
        let concat = config.hidden + config.embed_dim;
        LstmParams {
            embedding: vec![0.0; config.vocab_size * config.embed_dim],
            w_f: Linear::zeros(config.hidden, concat),
            w_i: Linear::zeros(config.hidden, concat),
            w_g: Linear::zeros(config.hidden, concat),
            w_o: Linear::zeros(config.hidden, concat),
            fc: Linear::zeros(config.fc_dim, config.hidden),
            out: Linear::zeros(config.classes, config.fc_dim),
        }
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![
            &self.embedding,
            &self.w_f.w,
            &self.w_f.b,
            &self.w_i.w,
            &self.w_i.b,
            &self.w_g.w,
            &self.w_g.b,
            &self.w_o.w,
            &self.w_o.b,
            &self.fc.w,
            &self.fc.b,
            &self.out.w,
            &self.out.b,
        ]
    }

    fn blocks_mut(&mut self) -> Vec<&mut Vec<f64>> {
        vec![
            &mut self.embedding,
            &mut self.w_f.w,
            &mut self.w_f.b,
            &mut self.w_i.w,
            &mut self.w_i.b,
            &mut self.w_g.w,
            &mut self.w_g.b,
            &mut self.w_o.w,
            &mut self.w_o.b,
            &mut self.fc.w,
            &mut self.fc.b,
            &mut self.out.w,
            &mut self.out.b,
        ]
    }

    fn flatten(&self) -> Vec<f64> {
        self.blocks().concat()
    }

    fn assign_flat(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for block in self.blocks_mut() {
            let len = block.len();
            block.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }
}

struct ClassicalTrace {
    v: Vec<f64>,
    f: Vec<f64>,
    i: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c_prev: Vec<f64>,
    tc: Vec<f64>,
}

/// Unidirectional LSTM with a ReLU layer and dropout before the class logits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLstm {
    pub config: LstmConfig,
    params: LstmParams,
}

impl ClassicalLstm {
    pub fn new(config: LstmConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = LstmParams::init(&config, &mut rng);
        Ok(ClassicalLstm { config, params })
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

    fn cell_steps(&self, token_ids: &[usize]) -> (Vec<f64>, Vec<ClassicalTrace>) {
        let hidden = self.config.hidden;
        let mut h = vec![0.0; hidden];
        let mut c = vec![0.0; hidden];
        let mut traces = Vec::with_capacity(token_ids.len());
        for &id in token_ids {
            let mut v = h.clone();
            v.extend_from_slice(self.embed(id));
            let f: Vec<f64> = self.params.w_f.apply(&v).iter().map(|&a| sigmoid(a)).collect();
            let i: Vec<f64> = self.params.w_i.apply(&v).iter().map(|&a| sigmoid(a)).collect();
            let g: Vec<f64> = self.params.w_g.apply(&v).iter().map(|&a| a.tanh()).collect();
            let o: Vec<f64> = self.params.w_o.apply(&v).iter().map(|&a| sigmoid(a)).collect();
            let c_next: Vec<f64> = (0..hidden).map(|j| f[j] * c[j] + i[j] * g[j]).collect();
            let tc: Vec<f64> = c_next.iter().map(|&x| x.tanh()).collect();
            let h_next: Vec<f64> = (0..hidden).map(|j| o[j] * tc[j]).collect();
            traces.push(ClassicalTrace {
                v,
                f,
                i,
                g,
                o,
                c_prev: c,
                tc,
            });
            c = c_next;
            h = h_next;
        }
        (h, traces)
    }

    fn dropout_mask(&self, train_mode: bool, noise_seed: u64) -> Vec<f64> {
        let rate = self.config.dropout;
        if !train_mode || rate == 0.0 {
            return vec![1.0; self.config.fc_dim];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        let keep = 1.0 - rate;
        (0..self.config.fc_dim)
            .map(|_| if rng.gen_bool(keep) { 1.0 / keep } else { 0.0 })
            .collect()
    }

    fn head(&self, h_last: &[f64], mask: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let r = self.params.fc.apply(h_last);
        let activated: Vec<f64> = r
            .iter()
            .zip(mask)
            .map(|(&x, &m)| x.max(0.0) * m)
            .collect();
        let logits = self.params.out.apply(&activated);
        (r, activated, logits)
    }

    /// Evaluation-mode logits (dropout off).
    pub fn sequence_forward(&self, token_ids: &[usize]) -> Result<Vec<f64>> {
        self.check_tokens(token_ids)?;
        let (h_last, _) = self.cell_steps(token_ids);
        let mask = vec![1.0; self.config.fc_dim];
        Ok(self.head(&h_last, &mask).2)
    }

    /// Training-mode logits; `noise_seed` fixes the dropout mask.
    pub fn sequence_forward_train(&self, token_ids: &[usize], noise_seed: u64) -> Result<Vec<f64>> {
        self.check_tokens(token_ids)?;
        let (h_last, _) = self.cell_steps(token_ids);
        let mask = self.dropout_mask(true, noise_seed);
        Ok(self.head(&h_last, &mask).2)
    }

    pub fn predict(&self, token_ids: &[usize]) -> Result<usize> {
        Ok(argmax(&self.sequence_forward(token_ids)?))
    }

    pub fn loss(&self, token_ids: &[usize], label: u8) -> Result<f64> {
        let logits = self.sequence_forward(token_ids)?;
        categorical_cross_entropy(&logits, label)
            .map_err(|e| QlstmError::BadConfig(e.to_string()))
    }

    /// Training loss and flat-parameter gradient; dropout (if configured) is
    /// resampled from `noise_seed` and shared between the forward and
    /// backward pass.
    pub fn loss_and_grad(
        &self,
        token_ids: &[usize],
        label: u8,
        noise_seed: u64,
    ) -> Result<(f64, Vec<f64>)> {
        self.check_tokens(token_ids)?;
        let hidden = self.config.hidden;
        let (h_last, traces) = self.cell_steps(token_ids);
        let mask = self.dropout_mask(true, noise_seed);
        let (r, activated, logits) = self.head(&h_last, &mask);
        let loss = categorical_cross_entropy(&logits, label)
            .map_err(|e| QlstmError::BadConfig(e.to_string()))?;
        let dlogits = categorical_cross_entropy_grad(&logits, label)
            .map_err(|e| QlstmError::BadConfig(e.to_string()))?;

        let mut grads = LstmParams::zeros(&self.config);

        let dactivated = self.params.out.backprop_input(&dlogits);
        self.params.out.accumulate_grad(&mut grads.out, &dlogits, &activated);
        let dr: Vec<f64> = (0..self.config.fc_dim)
            .map(|j| if r[j] > 0.0 { dactivated[j] * mask[j] } else { 0.0 })
            .collect();
        let mut dh = self.params.fc.backprop_input(&dr);
        self.params.fc.accumulate_grad(&mut grads.fc, &dr, &h_last);

        let mut dc = vec![0.0; hidden];
        for (t, trace) in traces.iter().enumerate().rev() {
            let do_: Vec<f64> = (0..hidden).map(|j| dh[j] * trace.tc[j]).collect();
            for j in 0..hidden {
                dc[j] += dh[j] * trace.o[j] * (1.0 - trace.tc[j] * trace.tc[j]);
            }
            let df: Vec<f64> = (0..hidden).map(|j| dc[j] * trace.c_prev[j]).collect();
            let di: Vec<f64> = (0..hidden).map(|j| dc[j] * trace.g[j]).collect();
            let dg: Vec<f64> = (0..hidden).map(|j| dc[j] * trace.i[j]).collect();
            for j in 0..hidden {
                dc[j] *= trace.f[j];
            }

            let da_f: Vec<f64> =
                (0..hidden).map(|j| df[j] * trace.f[j] * (1.0 - trace.f[j])).collect();
            let da_i: Vec<f64> =
                (0..hidden).map(|j| di[j] * trace.i[j] * (1.0 - trace.i[j])).collect();
            let da_g: Vec<f64> =
                (0..hidden).map(|j| dg[j] * (1.0 - trace.g[j] * trace.g[j])).collect();
            let da_o: Vec<f64> =
                (0..hidden).map(|j| do_[j] * trace.o[j] * (1.0 - trace.o[j])).collect();

            let mut dv = self.params.w_f.backprop_input(&da_f);
            for (slot, d) in dv.iter_mut().zip(self.params.w_i.backprop_input(&da_i)) {
                *slot += d;
            }
            for (slot, d) in dv.iter_mut().zip(self.params.w_g.backprop_input(&da_g)) {
                *slot += d;
            }
            for (slot, d) in dv.iter_mut().zip(self.params.w_o.backprop_input(&da_o)) {
                *slot += d;
            }
            self.params.w_f.accumulate_grad(&mut grads.w_f, &da_f, &trace.v);
            self.params.w_i.accumulate_grad(&mut grads.w_i, &da_i, &trace.v);
            self.params.w_g.accumulate_grad(&mut grads.w_g, &da_g, &trace.v);
            self.params.w_o.accumulate_grad(&mut grads.w_o, &da_o, &trace.v);

            let e = self.config.embed_dim;
            let row = token_ids[t] * e;
            for j in 0..e {
                grads.embedding[row + j] += dv[hidden + j];
            }
            dh = dv[..hidden].to_vec();
        }

        Ok((loss, grads.flatten()))
    }

    pub fn n_params(&self) -> usize {
        self.params.flatten().len()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        self.params.flatten()
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) {
        self.params.assign_flat(flat);
    }

    /// Zeroes every weight; logits then equal the output bias.
    pub fn zero_all_params(&mut self) {
        self.params = LstmParams::zeros(&self.config);
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.params.out.b
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ClassicalLstm =
            serde_json::from_str(text).map_err(|e| QlstmError::Checkpoint(e.to_string()))?;
        model.config.validate()?;
        Ok(model)
    }
}
