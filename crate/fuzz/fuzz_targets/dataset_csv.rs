#![no_main]

use libfuzzer_sys::fuzz_target;
use relieflab::io::{parse_dataset, render_csv, render_sidecar};

// Input layout: `<csv>\0<sidecar json>`.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((csv_text, json)) = text.split_once('\0') else { return };
    if let Ok(ds) = parse_dataset(csv_text, json) {
        let again = parse_dataset(&render_csv(&ds).unwrap(), &render_sidecar(&ds))
            .expect("rendered dataset parses");
        assert_eq!(ds, again);
    }
});
