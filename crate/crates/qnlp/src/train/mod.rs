//! Losses, optimizer, dataset splitting, and the training loop.

mod adam;
mod losses;
mod runner;
mod split;

pub use adam::{adam_step, AdamState};
pub use losses::{
    binary_cross_entropy, categorical_cross_entropy, categorical_cross_entropy_grad, softmax,
};
pub use runner::{evaluate, train_model, EvalReport, ModelKind, TrainOutcome, TrainedModel};
pub use split::split_dataset;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TrainError {
    #[error("label {0} invalid for this model")]
    InvalidLabel(u8),
    #[error("dataset too small to split: {0} records (need at least 10)")]
    TooSmall(usize),
    #[error("split fractions must sum to 1, got {0}")]
    BadSplit(f64),
    #[error("non-finite gradient for parameter index {0}")]
    NonFiniteGradient(usize),
    #[error("empty split")]
    EmptySplit,
    #[error("config: {0}")]
    BadConfig(String),
    #[error("model: {0}")]
    Model(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for TrainError {
    fn from(e: std::io::Error) -> Self {
        TrainError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, TrainError>;

/// Training hyperparameters. Fractions are train/validation/test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub split: (f64, f64, f64),
    pub early_stop_patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 16,
            learning_rate: 0.01,
            seed: 0,
            split: (0.8, 0.1, 0.1),
            early_stop_patience: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = self.split;
        let total = a + b + c;
        if (total - 1.0).abs() > 1e-9 {
            return Err(TrainError::BadSplit(total));
        }
        if a <= 0.0 || b <= 0.0 || c <= 0.0 {
            return Err(TrainError::BadConfig("split fractions must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::BadConfig("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(TrainError::BadConfig("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// One row of the training curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
    pub wallclock_s: f64,
}

impl EpochRecord {
    pub const CSV_HEADER: &'static str = "epoch,train_loss,val_loss,train_acc,val_acc,wallclock_s";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.epoch, self.train_loss, self.val_loss, self.train_acc, self.val_acc,
            self.wallclock_s
        )
    }
}
