#![no_main]
//! Run files: parsing must never panic, and anything accepted must
//! survive a write/read cycle unchanged.

use libfuzzer_sys::fuzz_target;
use nestprox_cli::spec::parse_run_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_run_spec(text) {
        let again = parse_run_spec(&spec.to_json()).expect("serialized spec re-parses");
        assert_eq!(again, spec);
    }
});
