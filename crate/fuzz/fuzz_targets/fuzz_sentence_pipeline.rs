#![no_main]

use libfuzzer_sys::fuzz_target;
use qnlp::data::vocab::standard_lexicon;
use qnlp::discocat::{bend_rewrite, build_diagram, compile, AnsatzConfig};
use qnlp::grammar::{assign_types, reduce, tokenize};

// End-to-end robustness: arbitrary text through the whole grammar-to-circuit
// pipeline must never panic; failures surface as typed errors.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let lexicon = standard_lexicon();
    let tokens = tokenize(text);
    // Keep the reducer's backtracking bounded: real sentences are short.
    if tokens.len() > 8 {
        return;
    }
    let Ok(typed) = assign_types(&tokens, &lexicon) else { return };
    let Ok(derivation) = reduce(&typed) else { return };
    let Ok(diagram) = build_diagram(&derivation) else { return };
    let bent = bend_rewrite(&diagram);
    let ansatz = AnsatzConfig::default();
    let _ = compile(&bent, &ansatz);
    let _ = compile(&diagram, &ansatz);
});
