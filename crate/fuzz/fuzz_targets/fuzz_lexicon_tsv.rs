#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(lexicon) = qnlp::grammar::Lexicon::from_tsv_str(text) {
            // A loadable lexicon must survive its own TSV dump.
            let dumped = lexicon.to_tsv_string();
            let back = qnlp::grammar::Lexicon::from_tsv_str(&dumped)
                .expect("dumped lexicon must re-load");
            assert_eq!(back.len(), lexicon.len());
        }
    }
});
