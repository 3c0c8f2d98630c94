use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{adam_step, split_dataset, AdamState, EpochRecord, Result, TrainConfig, TrainError};
use crate::data::{build_vocab, binarize, Dataset, Sentence, Vocab};
use crate::discocat::{
    compile_sentence, discocat_grad, discocat_loss, AnsatzConfig, CompiledSentence,
};
use crate::grammar::Lexicon;
use crate::qlstm::{ClassicalLstm, LstmConfig, QlstmConfig, QlstmModel};
use crate::qsim::ParamStore;

/// Which model to train. Sequence-model configs carry a placeholder
/// vocabulary size; the trainer replaces it with the size of the vocabulary
/// built from the train split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Lstm(LstmConfig),
    Qlstm(QlstmConfig),
    Discocat(AnsatzConfig),
}

impl ModelKind {
    pub fn lstm_defaults() -> Self {
        ModelKind::Lstm(LstmConfig::defaults(0))
    }

    pub fn qlstm_defaults() -> Self {
        ModelKind::Qlstm(QlstmConfig::defaults(0))
    }

    pub fn discocat_defaults() -> Self {
        ModelKind::Discocat(AnsatzConfig::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Lstm(_) => "lstm",
            ModelKind::Qlstm(_) => "qlstm",
            ModelKind::Discocat(_) => "discocat",
        }
    }
}

/// A trained model together with everything needed to evaluate it later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Lstm { model: ClassicalLstm, vocab: Vocab },
    Qlstm { model: QlstmModel, vocab: Vocab },
    Discocat {
        ansatz: AnsatzConfig,
        params: ParamStore,
        lexicon_tsv: String,
    },
}

impl TrainedModel {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TrainedModel::Lstm { .. } => "lstm",
            TrainedModel::Qlstm { .. } => "qlstm",
            TrainedModel::Discocat { .. } => "discocat",
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::Lstm { model, .. } => model.config.classes,
            TrainedModel::Qlstm { model, .. } => model.config.classes,
            TrainedModel::Discocat { .. } => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| TrainError::Model(format!("checkpoint: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Evaluates on a dataset. Ternary data is binarized automatically for
    /// the sentence-circuit model; unparseable sentences are counted and
    /// skipped rather than failing the run.
    pub fn evaluate_dataset(&self, dataset: &Dataset) -> Result<EvalReport> {
        match self {
            TrainedModel::Lstm { model, vocab } => {
                let samples = encode_split(&dataset.sentences, vocab);
                evaluate_samples(self.n_classes(), &samples, 0, |tokens, label| {
                    let loss = model
                        .loss(tokens, label)
                        .map_err(|e| TrainError::Model(e.to_string()))?;
                    let pred = model
                        .predict(tokens)
                        .map_err(|e| TrainError::Model(e.to_string()))?;
                    Ok((loss, pred))
                })
            }
            TrainedModel::Qlstm { model, vocab } => {
                let samples = encode_split(&dataset.sentences, vocab);
                evaluate_samples(self.n_classes(), &samples, 0, |tokens, label| {
                    let loss = model
                        .loss(tokens, label)
                        .map_err(|e| TrainError::Model(e.to_string()))?;
                    let pred = model
                        .predict(tokens)
                        .map_err(|e| TrainError::Model(e.to_string()))?;
                    Ok((loss, pred))
                })
            }
            TrainedModel::Discocat {
                ansatz,
                params,
                lexicon_tsv,
            } => {
                let lexicon = Lexicon::from_tsv_str(lexicon_tsv)
                    .map_err(|e| TrainError::Model(e.to_string()))?
                    .with_fallback();
                let binary = if dataset.n_classes == 3 { binarize(dataset) } else { dataset.clone() };
                let (compiled, skipped) = compile_split(&binary.sentences, &lexicon, ansatz);
                evaluate_compiled(&compiled, params, skipped)
            }
        }
    }
}

/// Loss, accuracy and per-class confusion counts over one split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub loss: f64,
    pub accuracy: f64,
    /// `confusion[true_label][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Records dropped before evaluation (unparseable sentences).
    pub skipped: usize,
}

fn encode_split(sentences: &[Sentence], vocab: &Vocab) -> Vec<(Vec<usize>, u8)> {
    sentences
        .iter()
        .map(|s| (s.token_ids(vocab), s.label))
        .collect()
}

fn compile_split(
    sentences: &[Sentence],
    lexicon: &Lexicon,
    ansatz: &AnsatzConfig,
) -> (Vec<(CompiledSentence, u8)>, usize) {
    let mut compiled = Vec::new();
    let mut skipped = 0usize;
    for s in sentences {
        match compile_sentence(&s.text, lexicon, ansatz, true) {
            Ok(c) => compiled.push((c, s.label)),
            Err(_) => skipped += 1,
        }
    }
    (compiled, skipped)
}

fn evaluate_samples<S>(
    n_classes: usize,
    samples: &[(S, u8)],
    skipped: usize,
    mut eval_one: impl FnMut(&S, u8) -> Result<(f64, usize)>,
) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(TrainError::EmptySplit);
    }
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (sample, label) in samples {
        let (loss, pred) = eval_one(sample, *label)?;
        loss_sum += loss;
        if pred == usize::from(*label) {
            correct += 1;
        }
        confusion[usize::from(*label)][pred.min(n_classes - 1)] += 1;
    }
    Ok(EvalReport {
        n: samples.len(),
        loss: loss_sum / samples.len() as f64,
        accuracy: correct as f64 / samples.len() as f64,
        confusion,
        skipped,
    })
}

fn evaluate_compiled(
    compiled: &[(CompiledSentence, u8)],
    params: &ParamStore,
    skipped: usize,
) -> Result<EvalReport> {
    evaluate_samples(2, compiled, skipped, |sentence, label| {
        let (loss, _, eval) =
            discocat_loss(sentence, params, label).map_err(|e| TrainError::Model(e.to_string()))?;
        let pred = if eval.degenerate {
            // Degenerate sentences count as wrong: report the opposite class.
            usize::from(label == 1)
        } else {
            usize::from(eval.p_positive > 0.5)
        };
        Ok((loss, pred))
    })
}

/// Spec'd evaluation entry point: metrics of a trained model on a dataset.
pub fn evaluate(model: &TrainedModel, dataset: &Dataset) -> Result<EvalReport> {
    model.evaluate_dataset(dataset)
}

/// Everything a training run produces.
#[derive(Debug)]
pub struct TrainOutcome {
    pub records: Vec<EpochRecord>,
    pub test: EvalReport,
    pub model: TrainedModel,
    pub curve_csv: String,
    /// Sentences dropped from (train, val, test) because they failed to
    /// parse; always zero for the sequence models.
    pub skipped: (usize, usize, usize),
}

/// Per-sample deterministic noise stream id.
fn noise_seed(seed: u64, epoch: usize, sample: usize) -> u64 {
    let mut x = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(epoch as u64)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9)
        .wrapping_add(sample as u64);
    x ^= x >> 31;
    x.wrapping_mul(0x94D0_49BB_1331_11EB)
}

/// The model-agnostic side of training: prepared samples in, curve out.
trait Trainee: Sync {
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, flat: &[f64]);
    fn train_len(&self) -> usize;
    fn loss_grad(&self, idx: usize, noise_seed: u64) -> Result<(f64, Vec<f64>)>;
    /// Eval-mode loss and correctness on train (false) or val (true) split.
    fn eval_one(&self, val: bool, idx: usize) -> Result<(f64, bool)>;
    fn split_len(&self, val: bool) -> usize;
}

fn epoch_metrics<T: Trainee>(trainee: &T, val: bool) -> Result<(f64, f64)> {
    let n = trainee.split_len(val);
    if n == 0 {
        return Ok((f64::NAN, f64::NAN));
    }
    let results: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| trainee.eval_one(val, i))
        .collect::<Result<Vec<_>>>()?;
    let loss: f64 = results.iter().map(|(l, _)| l).sum::<f64>() / n as f64;
    let acc = results.iter().filter(|(_, c)| *c).count() as f64 / n as f64;
    Ok((loss, acc))
}

fn run_training<T: Trainee>(
    trainee: &mut T,
    config: &TrainConfig,
    mut csv_sink: Option<&mut dyn Write>,
) -> Result<(Vec<EpochRecord>, String)> {
    let mut params = trainee.params();
    let mut adam = AdamState::new(params.len());
    let mut records = Vec::with_capacity(config.epochs);
    let mut csv = String::from(EpochRecord::CSV_HEADER);
    csv.push('\n');
    if let Some(sink) = csv_sink.as_deref_mut() {
        writeln!(sink, "{}", EpochRecord::CSV_HEADER)?;
    }

    let mut best_val = f64::INFINITY;
    let mut since_best = 0usize;

    for epoch in 1..=config.epochs {
        let started = Instant::now();
        let mut order: Vec<usize> = (0..trainee.train_len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed(config.seed, epoch, usize::MAX));
        order.shuffle(&mut rng);

        for batch in order.chunks(config.batch_size) {
            let results: Vec<(f64, Vec<f64>)> = batch
                .par_iter()
                .map(|&i| trainee.loss_grad(i, noise_seed(config.seed, epoch, i)))
                .collect::<Result<Vec<_>>>()?;
            let scale = 1.0 / results.len() as f64;
            let mut grad = vec![0.0; params.len()];
            for (_, g) in &results {
                for (slot, value) in grad.iter_mut().zip(g) {
                    *slot += value * scale;
                }
            }
            adam_step(&mut adam, &mut params, &grad, config.learning_rate)?;
            trainee.set_params(&params);
        }

        let (train_loss, train_acc) = epoch_metrics(trainee, false)?;
        let (val_loss, val_acc) = epoch_metrics(trainee, true)?;
        let record = EpochRecord {
            epoch,
            train_loss,
            val_loss,
            train_acc,
            val_acc,
            wallclock_s: started.elapsed().as_secs_f64(),
        };
        csv.push_str(&record.to_csv_row());
        csv.push('\n');
        if let Some(sink) = csv_sink.as_deref_mut() {
            writeln!(sink, "{}", record.to_csv_row())?;
            sink.flush()?;
        }
        records.push(record);

        if let Some(patience) = config.early_stop_patience {
            if val_loss < best_val {
                best_val = val_loss;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > patience {
                    break;
                }
            }
        }
    }
    Ok((records, csv))
}

struct SeqTrainee<M> {
    model: M,
    train: Vec<(Vec<usize>, u8)>,
    val: Vec<(Vec<usize>, u8)>,
    loss_grad_fn: fn(&M, &[usize], u8, u64) -> Result<(f64, Vec<f64>)>,
    eval_fn: fn(&M, &[usize], u8) -> Result<(f64, bool)>,
    params_fn: fn(&M) -> Vec<f64>,
    set_params_fn: fn(&mut M, &[f64]),
}

impl<M: Sync> Trainee for SeqTrainee<M> {
    fn params(&self) -> Vec<f64> {
        (self.params_fn)(&self.model)
    }

    fn set_params(&mut self, flat: &[f64]) {
        (self.set_params_fn)(&mut self.model, flat)
    }

    fn train_len(&self) -> usize {
        self.train.len()
    }

    fn loss_grad(&self, idx: usize, noise_seed: u64) -> Result<(f64, Vec<f64>)> {
        let (tokens, label) = &self.train[idx];
        (self.loss_grad_fn)(&self.model, tokens, *label, noise_seed)
    }

    fn eval_one(&self, val: bool, idx: usize) -> Result<(f64, bool)> {
        let (tokens, label) = if val { &self.val[idx] } else { &self.train[idx] };
        (self.eval_fn)(&self.model, tokens, *label)
    }

    fn split_len(&self, val: bool) -> usize {
        if val {
            self.val.len()
        } else {
            self.train.len()
        }
    }
}

struct DiscocatTrainee {
    ansatz: AnsatzConfig,
    params: ParamStore,
    train: Vec<(CompiledSentence, u8)>,
    val: Vec<(CompiledSentence, u8)>,
}

impl Trainee for DiscocatTrainee {
    fn params(&self) -> Vec<f64> {
        self.params.to_vec()
    }

    fn set_params(&mut self, flat: &[f64]) {
        self.params.assign_from_vec(flat);
    }

    fn train_len(&self) -> usize {
        self.train.len()
    }

    fn loss_grad(&self, idx: usize, _noise_seed: u64) -> Result<(f64, Vec<f64>)> {
        let (sentence, label) = &self.train[idx];
        let (loss, _, _) = discocat_loss(sentence, &self.params, *label)
            .map_err(|e| TrainError::Model(e.to_string()))?;
        let grads = discocat_grad(sentence, &self.params, *label)
            .map_err(|e| TrainError::Model(e.to_string()))?;
        let flat = self
            .params
            .names()
            .map(|name| grads.get(name).copied().unwrap_or(0.0))
            .collect();
        Ok((loss, flat))
    }

    fn eval_one(&self, val: bool, idx: usize) -> Result<(f64, bool)> {
        let (sentence, label) = if val { &self.val[idx] } else { &self.train[idx] };
        let (loss, correct, _) = discocat_loss(sentence, &self.params, *label)
            .map_err(|e| TrainError::Model(e.to_string()))?;
        Ok((loss, correct))
    }

    fn split_len(&self, val: bool) -> usize {
        if val {
            self.val.len()
        } else {
            self.train.len()
        }
    }
}

fn dataset_of(sentences: Vec<Sentence>, n_classes: u8) -> Dataset {
    Dataset::new(sentences, n_classes)
}

/// Trains a model on a dataset: seeded split, minibatch Adam with averaged
/// gradients, one metrics record per epoch, final test evaluation.
///
/// `out_dir`, when given, receives an incrementally written `curve.csv`.
/// The sentence-circuit model requires binary labels (run [`binarize`]
/// first); unparseable sentences are dropped and counted.
pub fn train_model(
    kind: &ModelKind,
    dataset: &Dataset,
    config: &TrainConfig,
    lexicon: &Lexicon,
    out_dir: Option<&Path>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if matches!(kind, ModelKind::Discocat(_)) && dataset.n_classes != 2 {
        return Err(TrainError::BadConfig(
            "sentence-circuit training needs binary labels; binarize the dataset first".into(),
        ));
    }
    let (train_s, val_s, test_s) = split_dataset(&dataset.sentences, config)?;

    let mut csv_file = match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Some(std::fs::File::create(dir.join("curve.csv"))?)
        }
        None => None,
    };
    let csv_sink: Option<&mut dyn Write> = csv_file.as_mut().map(|f| f as &mut dyn Write);

    match kind {
        ModelKind::Lstm(base) => {
            let train_ds = dataset_of(train_s, dataset.n_classes);
            let vocab = build_vocab(&train_ds, 1).map_err(|e| TrainError::Model(e.to_string()))?;
            let mut cfg = base.clone();
            cfg.vocab_size = vocab.size();
            let model = ClassicalLstm::new(cfg, config.seed)
                .map_err(|e| TrainError::Model(e.to_string()))?;
            let mut trainee = SeqTrainee {
                model,
                train: encode_split(&train_ds.sentences, &vocab),
                val: encode_split(&val_s, &vocab),
                loss_grad_fn: |m, t, l, ns| {
                    m.loss_and_grad(t, l, ns).map_err(|e| TrainError::Model(e.to_string()))
                },
                eval_fn: |m, t, l| {
                    let loss = m.loss(t, l).map_err(|e| TrainError::Model(e.to_string()))?;
                    let pred = m.predict(t).map_err(|e| TrainError::Model(e.to_string()))?;
                    Ok((loss, pred == usize::from(l)))
                },
                params_fn: |m| m.params_flat(),
                set_params_fn: |m, p| m.set_params_flat(p),
            };
            let (records, curve_csv) = run_training(&mut trainee, config, csv_sink)?;
            let trained = TrainedModel::Lstm {
                model: trainee.model,
                vocab,
            };
            let test = trained.evaluate_dataset(&dataset_of(test_s, dataset.n_classes))?;
            Ok(TrainOutcome {
                records,
                test,
                model: trained,
                curve_csv,
                skipped: (0, 0, 0),
            })
        }
        ModelKind::Qlstm(base) => {
            let train_ds = dataset_of(train_s, dataset.n_classes);
            let vocab = build_vocab(&train_ds, 1).map_err(|e| TrainError::Model(e.to_string()))?;
            let mut cfg = base.clone();
            cfg.vocab_size = vocab.size();
            let model =
                QlstmModel::new(cfg, config.seed).map_err(|e| TrainError::Model(e.to_string()))?;
            let mut trainee = SeqTrainee {
                model,
                train: encode_split(&train_ds.sentences, &vocab),
                val: encode_split(&val_s, &vocab),
                loss_grad_fn: |m, t, l, _ns| {
                    m.loss_and_grad(t, l).map_err(|e| TrainError::Model(e.to_string()))
                },
                eval_fn: |m, t, l| {
                    let loss = m.loss(t, l).map_err(|e| TrainError::Model(e.to_string()))?;
                    let pred = m.predict(t).map_err(|e| TrainError::Model(e.to_string()))?;
                    Ok((loss, pred == usize::from(l)))
                },
                params_fn: |m| m.params_flat(),
                set_params_fn: |m, p| m.set_params_flat(p),
            };
            let (records, curve_csv) = run_training(&mut trainee, config, csv_sink)?;
            let trained = TrainedModel::Qlstm {
                model: trainee.model,
                vocab,
            };
            let test = trained.evaluate_dataset(&dataset_of(test_s, dataset.n_classes))?;
            Ok(TrainOutcome {
                records,
                test,
                model: trained,
                curve_csv,
                skipped: (0, 0, 0),
            })
        }
        ModelKind::Discocat(ansatz) => {
            let (train_c, skipped_train) = compile_split(&train_s, lexicon, ansatz);
            let (val_c, skipped_val) = compile_split(&val_s, lexicon, ansatz);
            if train_c.is_empty() {
                return Err(TrainError::EmptySplit);
            }
            let mut params = ParamStore::new();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for (sentence, _) in train_c.iter().chain(&val_c) {
                sentence.register_params(&mut params, &mut rng);
            }
            // Test-split words must resolve too; register them from the same
            // stream so evaluation never hits missing symbols.
            let (test_c, skipped_test) = compile_split(&test_s, lexicon, ansatz);
            for (sentence, _) in &test_c {
                sentence.register_params(&mut params, &mut rng);
            }
            let mut trainee = DiscocatTrainee {
                ansatz: *ansatz,
                params,
                train: train_c,
                val: val_c,
            };
            let (records, curve_csv) = run_training(&mut trainee, config, csv_sink)?;
            let test = evaluate_compiled(&test_c, &trainee.params, skipped_test)?;
            let trained = TrainedModel::Discocat {
                ansatz: trainee.ansatz,
                params: trainee.params,
                lexicon_tsv: lexicon.to_tsv_string(),
            };
            Ok(TrainOutcome {
                records,
                test,
                model: trained,
                curve_csv,
                skipped: (skipped_train, skipped_val, skipped_test),
            })
        }
    }
}

#[cfg(test)]
mod tests;
