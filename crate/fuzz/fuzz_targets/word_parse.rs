#![no_main]

use libfuzzer_sys::fuzz_target;

use anskit::numeration::{ab_star, MultiAns};
use std::sync::OnceLock;

static SYSTEM: OnceLock<MultiAns> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let multi = SYSTEM.get_or_init(|| {
            let s = ab_star();
            MultiAns::new(vec![s.clone(), s]).unwrap()
        });
        if let Ok(word) = multi.parse_word(text) {
            let _ = multi.val(&word);
        }
    }
});
