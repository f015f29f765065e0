//! Parses a formula and trace (separated by `%%`) and, for small
//! refutations, runs regularization and maps the result back.

#![no_main]

use libfuzzer_sys::fuzz_target;
use resreg_core::regularize::{canonical_sigma, regularize};
use resreg_core::restrict::restrict_proof_with_vars;
use resreg_core::{is_regular, parse_dimacs, parse_trace, verify_proof};

fuzz_target!(|data: &[u8]| {
    let Some(at) = data.windows(4).position(|w| w == b"\n%%\n") else { return };
    let Ok(f) = parse_dimacs(&data[..at + 1]) else { return };
    let Ok(p) = parse_trace(&data[at + 4..], &f) else { return };
    if f.num_vars() > 8 || p.size() > 40 || !p.is_refutation() {
        return;
    }
    let reg = regularize(&f, &p).expect("valid refutations regularize");
    assert!(verify_proof(&reg.formula, &reg.proof).unwrap().is_refutation);
    assert!(is_regular(&reg.proof).is_regular());
    let back = restrict_proof_with_vars(&reg.formula, &reg.proof, &canonical_sigma(&reg.scheme), f.num_vars())
        .expect("canonical restriction succeeds");
    assert!(verify_proof(&f, &back.proof).unwrap().is_refutation);
});
