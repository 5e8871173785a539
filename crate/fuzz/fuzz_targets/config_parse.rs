#![no_main]

use libfuzzer_sys::fuzz_target;

use stratlab::harness::config::ConfigDoc;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // must never panic on arbitrary text; a successful parse must
    // round-trip through the canonical form
    if let Ok(doc) = ConfigDoc::parse(text) {
        let canonical = doc.to_text();
        let reparsed = ConfigDoc::parse(&canonical).expect("canonical form must reparse");
        assert_eq!(doc, reparsed, "canonical round trip changed the document");
    }
});
