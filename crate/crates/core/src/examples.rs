//! The small running example: the four 2-clauses over x1, x2 and an
//! irregular eight-node refutation of them.

use crate::dimacs::parse_dimacs;
use crate::formula::CnfFormula;
use crate::proof::Proof;
use crate::trace::parse_trace;

pub const GAMMA_EX_CNF: &str = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n";

/// Resolves x1 on the path 1→5→6→7→8 twice (and x2 twice).
pub const EX1_TRACE: &str = "\
1 1 2 0 0
2 -1 2 0 0
3 1 -2 0 0
4 -1 -2 0 0
5 2 0 1 2 0
6 1 0 3 5 0
7 -2 0 6 4 0
8 0 7 5 0
";

pub fn gamma_ex() -> CnfFormula {
    parse_dimacs(GAMMA_EX_CNF.as_bytes()).expect("valid DIMACS")
}

pub fn ex1() -> Proof {
    parse_trace(EX1_TRACE.as_bytes(), &gamma_ex()).expect("valid trace")
}
