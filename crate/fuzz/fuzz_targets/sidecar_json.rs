#![no_main]

use libfuzzer_sys::fuzz_target;
use relieflab::io::{parse_sidecar, MAX_SYMBOLS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(schema) = parse_sidecar(text) {
        assert!((1..=MAX_SYMBOLS).contains(&schema.n_classes));
    }
});
