#![no_main]

use libfuzzer_sys::fuzz_target;

use stratlab::spectral::decode_snapshot;

fuzz_target!(|data: &[u8]| {
    // decoding untrusted bytes must never panic or overallocate; any
    // accepted field must carry finite coefficients only
    if let Ok(field) = decode_snapshot(data) {
        assert!(field.t.is_finite());
        assert!(field
            .omega
            .iter()
            .chain(&field.theta)
            .all(|v| v.re.is_finite() && v.im.is_finite()));
    }
});
