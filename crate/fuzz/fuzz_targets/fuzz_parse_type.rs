#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // Parsing either succeeds or reports a structured error; on success
        // the printed form must re-parse to the same type.
        if let Ok(ty) = qnlp::grammar::parse_type(text) {
            let printed = ty.to_string();
            let back = qnlp::grammar::parse_type(&printed).expect("printed type must re-parse");
            assert_eq!(back, ty, "print/parse round trip diverged");
        }
    }
});
