use super::*;

fn dataset_from(records: &[(&str, u8)]) -> Dataset {
    let sentences = records
        .iter()
        .map(|&(text, label)| Sentence::new(text, label).unwrap())
        .collect();
    Dataset::new(sentences, 3)
}

#[test]
fn load_jsonl_parses_valid_lines() {
    let content = r#"{"text":"Apple reports record profits","label":2}
{"text":"Inflation fears rattle markets","label":0}
"#;
    let (dataset, report) = load_jsonl_str(content).unwrap();
    assert_eq!(dataset.len(), 2);
    assert_eq!(report.loaded, 2);
    assert!(report.skipped.is_empty());
    assert_eq!(dataset.sentences[0].tokens.len(), 4);
    assert_eq!(dataset.sentences[0].label, 2);
}

#[test]
fn load_jsonl_reports_malformed_lines() {
    let content = r#"{"text":"Markets rally","label":2}
not json at all
{"text":"Bad label","label":7}
{"text":"...","label":1}
"#;
    let (dataset, report) = load_jsonl_str(content).unwrap();
    assert_eq!(dataset.len(), 1);
    assert_eq!(report.skipped.len(), 3);
    let lines: Vec<usize> = report.skipped.iter().map(|(l, _)| *l).collect();
    assert_eq!(lines, vec![2, 3, 4]);
}

#[test]
fn empty_file_is_all_invalid() {
    assert_eq!(load_jsonl_str("").unwrap_err(), DataError::AllRecordsInvalid);
    assert_eq!(
        load_jsonl_str("garbage\n").unwrap_err(),
        DataError::AllRecordsInvalid
    );
}

#[test]
fn jsonl_round_trip_preserves_text_and_labels() {
    let dataset = generate_synthetic(&GenConfig::low(30, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.jsonl");
    save_jsonl(&dataset, &path).unwrap();
    let (back, report) = load_jsonl(&path).unwrap();
    assert!(report.skipped.is_empty());
    assert_eq!(back.sentences, dataset.sentences);
}

#[test]
fn stats_hand_countable_example() {
    let dataset = dataset_from(&[
        ("alpha beta gamma", 0),
        ("delta epsilon zeta eta", 1),
        ("theta iota kappa lambda mu", 2),
    ]);
    let stats = stats(&dataset).unwrap();
    assert_eq!(stats.class_shares, vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    assert!((stats.mean_word_count - 4.0).abs() < 1e-12);
    assert_eq!(stats.vocab_size, 12);
}

#[test]
fn stats_invariant_under_duplication() {
    let base = dataset_from(&[("markets rally", 2), ("stocks crash", 0)]);
    let mut doubled = base.clone();
    doubled.sentences.extend(base.sentences.clone());
    let a = stats(&base).unwrap();
    let b = stats(&doubled).unwrap();
    assert_eq!(a.class_shares, b.class_shares);
    assert_eq!(a.mean_word_count, b.mean_word_count);
    assert_eq!(a.vocab_size, b.vocab_size);
}

#[test]
fn stats_empty_dataset_errors() {
    let dataset = Dataset::new(vec![], 3);
    assert_eq!(stats(&dataset).unwrap_err(), DataError::EmptyDataset);
}

#[test]
fn binarize_drops_neutral_and_remaps() {
    let dataset = dataset_from(&[
        ("bad news", 0),
        ("steady day", 1),
        ("good news", 2),
        ("more good news", 2),
    ]);
    let binary = binarize(&dataset);
    assert_eq!(binary.len(), 3);
    assert_eq!(binary.n_classes, 2);
    let labels: Vec<u8> = binary.sentences.iter().map(|s| s.label).collect();
    assert_eq!(labels, vec![0, 1, 1]);
    assert_eq!(binary.original_labels, Some(vec![0, 2, 2]));
}

#[test]
fn binarize_share_arithmetic() {
    let dataset = generate_synthetic(&GenConfig::low(1000, 13)).unwrap();
    let before = stats(&dataset).unwrap();
    let binary = binarize(&dataset);
    let after = stats(&binary).unwrap();
    let non_neutral = before.class_shares[0] + before.class_shares[2];
    assert!((after.class_shares[0] - before.class_shares[0] / non_neutral).abs() < 1e-9);
    assert!((after.class_shares[1] - before.class_shares[2] / non_neutral).abs() < 1e-9);
}

#[test]
fn binarize_is_idempotent() {
    let dataset = dataset_from(&[("bad", 0), ("flat", 1), ("good", 2)]);
    let once = binarize(&dataset);
    let twice = binarize(&once);
    assert_eq!(once, twice);
}

#[test]
fn binarize_all_neutral_gives_empty() {
    let dataset = dataset_from(&[("flat day", 1), ("steady hour", 1)]);
    assert!(binarize(&dataset).is_empty());
}

#[test]
fn vocab_frequency_and_tie_break() {
    let dataset = dataset_from(&[("a b", 0), ("a b", 1), ("a b c", 2)]);
    let vocab = build_vocab(&dataset, 2).unwrap();
    assert_eq!(vocab.id_of("a"), 1);
    assert_eq!(vocab.id_of("b"), 2);
    assert_eq!(vocab.id_of("c"), Vocab::UNK);
    assert_eq!(vocab.size(), 3);
}

#[test]
fn vocab_is_deterministic() {
    let dataset = generate_synthetic(&GenConfig::low(100, 21)).unwrap();
    let a = build_vocab(&dataset, 1).unwrap();
    let b = build_vocab(&dataset, 1).unwrap();
    assert_eq!(a, b);
}

#[test]
fn out_of_vocabulary_tokens_encode_to_unk() {
    let train = dataset_from(&[("markets rally", 2)]);
    let vocab = build_vocab(&train, 1).unwrap();
    let unseen = Sentence::new("markets stumble", 0).unwrap();
    let ids = unseen.token_ids(&vocab);
    assert_eq!(ids[0], vocab.id_of("markets"));
    assert_eq!(ids[1], Vocab::UNK);
}

#[test]
fn sentence_deserialization_rebuilds_tokens() {
    let s: Sentence = serde_json::from_str(r#"{"text":"Markets rally today","label":2}"#).unwrap();
    assert_eq!(s.tokens, vec!["markets", "rally", "today"]);
}
