#![no_main]

use cayleylab::qi::MapRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = MapRecord::from_json(s) {
        assert_eq!(MapRecord::from_json(&r.to_json()).unwrap(), r);
    }
});
