#![no_main]

use libfuzzer_sys::fuzz_target;

use stratlab::harness::config::ConfigDoc;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut doc = ConfigDoc::default();
    // overrides on arbitrary input must either apply cleanly or error out
    let _ = doc.apply_override(text);
    let _ = doc.to_text();
});
