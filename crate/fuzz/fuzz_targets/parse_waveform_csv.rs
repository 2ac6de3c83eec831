#![no_main]

use libfuzzer_sys::fuzz_target;
use slowlight::waveform::parse_waveform_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(w) = parse_waveform_csv(text) {
            assert!(w.dt() > 0.0 && w.dt().is_finite());
            assert!(w.samples().iter().all(|v| v.is_finite()));
        }
    }
});
