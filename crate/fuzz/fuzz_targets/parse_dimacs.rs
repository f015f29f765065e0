#![no_main]

use libfuzzer_sys::fuzz_target;
use resreg_core::{parse_dimacs, write_dimacs};

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = parse_dimacs(data) {
        let text = write_dimacs(&f);
        let again = parse_dimacs(text.as_bytes()).expect("writer output parses");
        assert_eq!(again, f);
        assert_eq!(write_dimacs(&again), text);
    }
});
