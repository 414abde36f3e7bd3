#![no_main]

use libfuzzer_sys::fuzz_target;

use anskit::semiring::SemiringTag;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Some((tag, value)) = text.split_once(' ') {
            if let Ok(tag) = SemiringTag::parse_tag(tag) {
                let _ = tag.parse_value(value);
            }
        } else {
            let _ = SemiringTag::parse_tag(text);
        }
    }
});
