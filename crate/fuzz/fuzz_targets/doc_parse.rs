#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing and validating an untrusted document must never panic; every
// malformed input is a structured error.
fuzz_target!(|data: &[u8]| {
    let _ = anskit::format::Document::validate(data);
});
