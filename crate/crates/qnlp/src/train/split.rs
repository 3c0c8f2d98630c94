use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Result, TrainConfig, TrainError};

/// Seeded shuffle followed by contiguous slicing into train/validation/test.
///
/// Deterministic for a given seed; the three parts are disjoint and cover the
/// input. Train and validation sizes are the rounded fractions, test takes
/// the remainder.
pub fn split_dataset<T: Clone>(
    items: &[T],
    config: &TrainConfig,
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    config.validate()?;
    let n = items.len();
    if n < 10 {
        return Err(TrainError::TooSmall(n));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    order.shuffle(&mut rng);

    let (f_train, f_val, _) = config.split;
    let n_train = ((n as f64) * f_train).round() as usize;
    let n_val = (((n as f64) * f_val).round() as usize).min(n - n_train.min(n));
    let n_train = n_train.min(n);

    let take = |range: std::ops::Range<usize>| -> Vec<T> {
        order[range].iter().map(|&i| items[i].clone()).collect()
    };
    Ok((
        take(0..n_train),
        take(n_train..n_train + n_val),
        take(n_train + n_val..n),
    ))
}
