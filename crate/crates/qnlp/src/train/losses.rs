//! Cross-entropy losses. Binary form for the single-probability sentence
//! classifier, categorical form for the 3-class sequence models.

/// `-[y ln p + (1-y) ln(1-p)]` with `p` clamped away from 0 and 1.
pub fn binary_cross_entropy(p: f64, label: u8) -> f64 {
    let p = p.clamp(crate::discocat::PROB_CLAMP, 1.0 - crate::discocat::PROB_CLAMP);
    let y = f64::from(label);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `-ln softmax(logits)[label]`.
pub fn categorical_cross_entropy(logits: &[f64], label: u8) -> crate::train::Result<f64> {
    let label = usize::from(label);
    if label >= logits.len() {
        return Err(crate::train::TrainError::InvalidLabel(label as u8));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln() + max;
    Ok(log_sum - logits[label])
}

/// Gradient of the categorical cross entropy w.r.t. the logits:
/// `softmax(logits) - onehot(label)`.
pub fn categorical_cross_entropy_grad(logits: &[f64], label: u8) -> crate::train::Result<Vec<f64>> {
    let label = usize::from(label);
    if label >= logits.len() {
        return Err(crate::train::TrainError::InvalidLabel(label as u8));
    }
    let mut grad = softmax(logits);
    grad[label] -= 1.0;
    Ok(grad)
}
