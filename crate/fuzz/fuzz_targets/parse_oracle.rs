#![no_main]
use libfuzzer_sys::fuzz_target;
use nestprox_cli::spec::parse_oracle;

fuzz_target!(|data: &[u8]| {
    if let Ok(u) = parse_oracle(data) {
        assert!(u.is_finite());
    }
});
