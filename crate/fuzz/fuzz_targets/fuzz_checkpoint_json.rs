#![no_main]

use libfuzzer_sys::fuzz_target;
use qnlp::train::TrainedModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = TrainedModel::from_json(text) {
            // Decoded checkpoints re-encode and decode to the same model.
            let json = model.to_json();
            let back = TrainedModel::from_json(&json).expect("exported checkpoint must re-import");
            assert_eq!(back.kind_name(), model.kind_name());
        }
    }
});
