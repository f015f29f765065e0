//! Input: a DIMACS formula and a trace separated by a line holding `%%`.

#![no_main]

use libfuzzer_sys::fuzz_target;
use resreg_core::{parse_dimacs, parse_trace, verify_proof, write_trace};

fn split(data: &[u8]) -> Option<(&[u8], &[u8])> {
    let at = data.windows(4).position(|w| w == b"\n%%\n")?;
    Some((&data[..at + 1], &data[at + 4..]))
}

fuzz_target!(|data: &[u8]| {
    let Some((cnf, trace)) = split(data) else { return };
    let Ok(f) = parse_dimacs(cnf) else { return };
    if let Ok(p) = parse_trace(trace, &f) {
        // Whatever the parser accepts is a valid derivation.
        verify_proof(&f, &p).expect("parsed traces verify");
        let again = parse_trace(write_trace(&p).as_bytes(), &f).expect("writer output parses");
        assert_eq!(again, p);
    }
});
