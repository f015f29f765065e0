#![no_main]

use libfuzzer_sys::fuzz_target;
use resreg_core::{parse_substitution, write_substitution};

fuzz_target!(|data: &[u8]| {
    if let Ok(sigma) = parse_substitution(data) {
        let again = parse_substitution(write_substitution(&sigma).as_bytes()).expect("writer output parses");
        assert_eq!(again, sigma);
    }
});
