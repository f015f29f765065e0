//! Prints summary statistics of a generated corpus.

use std::time::Instant;

use resreg_core::oracle::corpus;
use resreg_core::proof::{height, is_regular};
use resreg_core::regularize::regularize;

fn main() {
    let start = Instant::now();
    let entries = corpus(2024, 220, 10, 40);
    let generated = start.elapsed();
    let irregular = entries.iter().filter(|e| !is_regular(&e.proof).is_regular()).count();
    let max_h = entries.iter().map(|e| height(&e.proof)).max().unwrap_or(0);
    let max_s = entries.iter().map(|e| e.proof.size()).max().unwrap_or(0);
    let start = Instant::now();
    let mut worst = 0f64;
    for e in &entries {
        let r = regularize(&e.formula, &e.proof).expect("regularize");
        worst = worst.max(r.report.size as f64 / r.report.size_bound as f64);
    }
    println!(
        "entries={} irregular={} max_height={} max_size={} gen={:?} regularize={:?} worst_size_ratio={:.3}",
        entries.len(),
        irregular,
        max_h,
        max_s,
        generated,
        start.elapsed(),
        worst
    );
}
