#![no_main]
//! Trace CSV reader: no panics, and re-serializing a parsed trace is a
//! fixed point byte for byte.

use libfuzzer_sys::fuzz_target;
use nestprox::SolveTrace;

fuzz_target!(|data: &[u8]| {
    let Ok(trace) = SolveTrace::read_csv(data) else { return };
    let text = trace.to_csv_string();
    let again = SolveTrace::from_csv_str(&text).expect("written trace re-parses");
    assert_eq!(again.to_csv_string(), text);
});
