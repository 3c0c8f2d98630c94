#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let (sentences, _unparseable) = qnlp::data::llm::parse_reply_lines(text);
        for s in sentences {
            assert!(s.label <= 2);
            assert!(!s.tokens.is_empty());
        }
    }
});
