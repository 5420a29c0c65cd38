#![no_main]

use libfuzzer_sys::fuzz_target;
use relieflab::experiment::{parse_records, render_records};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(records) = parse_records(text) {
        let rendered = render_records(&records, true).expect("records render");
        let again = parse_records(&rendered).expect("rendered records parse");
        assert_eq!(records.len(), again.len());
        assert!(records.iter().zip(&again).all(|(a, b)| a.same_outcome(b)));
    }
});
