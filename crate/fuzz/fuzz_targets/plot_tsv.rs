#![no_main]

use libfuzzer_sys::fuzz_target;
use relieflab::plot::{render_svg, PlotData};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(plot) = PlotData::from_tsv(text) {
        let again = PlotData::from_tsv(&plot.to_tsv()).expect("rendered data parses");
        assert_eq!(plot.to_tsv(), again.to_tsv());
        let _ = render_svg(&plot, 640, 480);
    }
});
