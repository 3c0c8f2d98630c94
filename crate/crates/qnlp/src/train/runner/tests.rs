use super::*;
use crate::data::{generate_synthetic, stats, vocab::standard_lexicon, GenConfig};
use crate::train::TrainConfig;

fn mini_config(epochs: usize, seed: u64) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 8,
        learning_rate: 0.01,
        seed,
        split: (0.8, 0.1, 0.1),
        early_stop_patience: None,
    }
}

#[test]
fn zero_epochs_yields_untrained_checkpoint() {
    let dataset = generate_synthetic(&GenConfig::low(40, 1)).unwrap();
    let outcome = train_model(
        &ModelKind::lstm_defaults(),
        &dataset,
        &mini_config(0, 1),
        &standard_lexicon(),
        None,
    )
    .unwrap();
    assert!(outcome.records.is_empty());
    assert_eq!(outcome.curve_csv.lines().count(), 1);
    assert!(matches!(outcome.model, TrainedModel::Lstm { .. }));
}

#[test]
fn lstm_smoke_training_improves_loss() {
    let dataset = generate_synthetic(&GenConfig::low(60, 2)).unwrap();
    let outcome = train_model(
        &ModelKind::lstm_defaults(),
        &dataset,
        &mini_config(5, 2),
        &standard_lexicon(),
        None,
    )
    .unwrap();
    assert_eq!(outcome.records.len(), 5);
    assert!(outcome.records[4].train_loss < outcome.records[0].train_loss);
    for r in &outcome.records {
        assert!(r.train_acc >= 0.0 && r.train_acc <= 1.0);
        assert!(r.train_loss >= 0.0);
    }
}

#[test]
fn identical_seeds_reproduce_learning_columns() {
    let dataset = generate_synthetic(&GenConfig::low(40, 3)).unwrap();
    let run = || {
        train_model(
            &ModelKind::lstm_defaults(),
            &dataset,
            &mini_config(3, 7),
            &standard_lexicon(),
            None,
        )
        .unwrap()
    };
    let a = run();
    let b = run();
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert_eq!(ra.train_loss, rb.train_loss);
        assert_eq!(ra.val_loss, rb.val_loss);
        assert_eq!(ra.train_acc, rb.train_acc);
        assert_eq!(ra.val_acc, rb.val_acc);
    }
}

#[test]
fn discocat_requires_binary_labels() {
    let dataset = generate_synthetic(&GenConfig::low(40, 4)).unwrap();
    let err = train_model(
        &ModelKind::discocat_defaults(),
        &dataset,
        &mini_config(1, 4),
        &standard_lexicon(),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, TrainError::BadConfig(_)));
}

#[test]
fn discocat_smoke_training_runs_and_checkpoints() {
    let dataset = crate::data::binarize(&generate_synthetic(&GenConfig::low(40, 5)).unwrap());
    let outcome = train_model(
        &ModelKind::discocat_defaults(),
        &dataset,
        &mini_config(2, 5),
        &standard_lexicon(),
        None,
    )
    .unwrap();
    assert_eq!(outcome.records.len(), 2);
    assert_eq!(outcome.skipped, (0, 0, 0));

    let json = outcome.model.to_json();
    let back = TrainedModel::from_json(&json).unwrap();
    let report = back.evaluate_dataset(&dataset).unwrap();
    assert!(report.accuracy >= 0.0 && report.accuracy <= 1.0);
    assert_eq!(report.n, dataset.len());
}

#[test]
fn qlstm_smoke_training_runs() {
    let dataset = generate_synthetic(&GenConfig::low(30, 6)).unwrap();
    let mut kind = ModelKind::qlstm_defaults();
    if let ModelKind::Qlstm(cfg) = &mut kind {
        cfg.qnn.n_qubits = 2;
        cfg.qnn.cnot_offsets = vec![1];
        cfg.hidden = 2;
        cfg.embed_dim = 2;
    }
    let outcome = train_model(
        &kind,
        &dataset,
        &mini_config(2, 6),
        &standard_lexicon(),
        None,
    )
    .unwrap();
    assert_eq!(outcome.records.len(), 2);
    assert!(outcome.records.iter().all(|r| r.train_loss.is_finite()));
}

#[test]
fn evaluation_constant_predictor_matches_class_share() {
    // An untrained all-zero LSTM predicts a constant class; its accuracy is
    // that class's share of the split.
    let dataset = generate_synthetic(&GenConfig::low(100, 8)).unwrap();
    let vocab = crate::data::build_vocab(&dataset, 1).unwrap();
    let mut model =
        crate::qlstm::ClassicalLstm::new(crate::qlstm::LstmConfig::defaults(vocab.size()), 0)
            .unwrap();
    model.zero_all_params();
    let trained = TrainedModel::Lstm { model, vocab };
    let report = trained.evaluate_dataset(&dataset).unwrap();
    let shares = stats(&dataset).unwrap().class_shares;
    // All-zero logits: argmax ties resolve to the last class (2, the 48%
    // positive class), so accuracy equals that share.
    assert!((report.accuracy - shares[2]).abs() < 1e-12);
}

#[test]
fn confusion_rows_sum_to_class_counts() {
    let dataset = generate_synthetic(&GenConfig::low(60, 9)).unwrap();
    let outcome = train_model(
        &ModelKind::lstm_defaults(),
        &dataset,
        &mini_config(1, 9),
        &standard_lexicon(),
        None,
    )
    .unwrap();
    let report = outcome.model.evaluate_dataset(&dataset).unwrap();
    let shares = stats(&dataset).unwrap();
    for (label, row) in report.confusion.iter().enumerate() {
        let row_sum: usize = row.iter().sum();
        let expected = (shares.class_shares[label] * dataset.len() as f64).round() as usize;
        assert_eq!(row_sum, expected);
    }
}

#[test]
fn accuracy_invariant_under_split_permutation() {
    let dataset = generate_synthetic(&GenConfig::low(50, 10)).unwrap();
    let outcome = train_model(
        &ModelKind::lstm_defaults(),
        &dataset,
        &mini_config(1, 10),
        &standard_lexicon(),
        None,
    )
    .unwrap();
    let mut reversed = dataset.clone();
    reversed.sentences.reverse();
    let a = outcome.model.evaluate_dataset(&dataset).unwrap();
    let b = outcome.model.evaluate_dataset(&reversed).unwrap();
    assert_eq!(a.accuracy, b.accuracy);
    assert!((a.loss - b.loss).abs() < 1e-12);
}

#[test]
fn curve_csv_written_to_out_dir() {
    let dataset = generate_synthetic(&GenConfig::low(40, 11)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome = train_model(
        &ModelKind::lstm_defaults(),
        &dataset,
        &mini_config(2, 11),
        &standard_lexicon(),
        Some(dir.path()),
    )
    .unwrap();
    let on_disk = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(on_disk, outcome.curve_csv);
    assert!(on_disk.starts_with(EpochRecord::CSV_HEADER));
    assert_eq!(on_disk.lines().count(), 3);
}

#[test]
fn early_stopping_truncates_run() {
    let dataset = generate_synthetic(&GenConfig::low(40, 12)).unwrap();
    let mut config = mini_config(30, 12);
    config.early_stop_patience = Some(0);
    let outcome = train_model(
        &ModelKind::lstm_defaults(),
        &dataset,
        &config,
        &standard_lexicon(),
        None,
    )
    .unwrap();
    assert!(outcome.records.len() <= 30);
}
