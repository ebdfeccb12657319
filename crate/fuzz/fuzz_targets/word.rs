#![no_main]

use cayleylab::Presentation;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    // Keep the normal-form work bounded; the parser itself sees everything.
    for p in [Presentation::free(3), Presentation::free_abelian(3), Presentation::heisenberg()] {
        if let Ok(w) = p.parse_word(s) {
            if w.len() <= 256 {
                let nf = p.normal_form(&w).unwrap();
                assert_eq!(p.normal_form(&nf).unwrap(), nf);
            }
        }
    }
});
