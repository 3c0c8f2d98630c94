#![no_main]

use libfuzzer_sys::fuzz_target;
use qnlp::qsim::Circuit;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(circuit) = Circuit::from_json(text) {
            // Accepted circuits are valid and round-trip losslessly.
            let json = circuit.to_json();
            let back = Circuit::from_json(&json).expect("exported circuit must re-import");
            assert_eq!(back, circuit, "circuit JSON round trip diverged");
        }
    }
});
