#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = cayleylab::Presentation::parse_file(s) {
            for r in p.relators() {
                let _ = p.normal_form(r);
            }
        }
    }
});
