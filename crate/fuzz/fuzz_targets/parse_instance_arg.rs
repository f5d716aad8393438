#![no_main]
use libfuzzer_sys::fuzz_target;
use nestprox_cli::spec::parse_instance_arg;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = parse_instance_arg(text) {
            // Accepted specs name a shipped instance.
            assert!(parse_instance_arg(spec.name()).is_ok());
        }
    }
});
