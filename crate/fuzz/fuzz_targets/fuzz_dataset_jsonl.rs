#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((dataset, report)) = qnlp::data::load_jsonl_str(text) {
            assert!(!dataset.is_empty());
            assert_eq!(report.loaded, dataset.len());
            for s in &dataset.sentences {
                assert!(s.label <= 2);
                assert!(!s.tokens.is_empty());
            }
        }
    }
});
