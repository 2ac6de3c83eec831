#![no_main]

use libfuzzer_sys::fuzz_target;
use slowlight::config::{parse_config, to_toml_string};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(text) {
            // anything accepted must serialize and parse back to the same value
            let canonical = to_toml_string(&cfg).expect("serialize accepted config");
            let again = parse_config(&canonical).expect("reparse canonical config");
            assert_eq!(again, cfg);
        }
    }
});
