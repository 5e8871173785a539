#![no_main]

use libfuzzer_sys::fuzz_target;

use stratlab::harness::csvio::{read_ledger_csv, read_series};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = read_ledger_csv(text);
    let _ = read_series(text, "E");
});
