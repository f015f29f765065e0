//! DIMACS CNF reading/writing and the line-based substitution file format.
//!
//! The writer is canonical: `p cnf <n> <m>`, one clause per line with sorted
//! literals and a `0` terminator, newline-terminated. Parsing the written text
//! gives back the same formula.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Clause, CnfFormula, Literal, SubstValue, Substitution, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("line {line}: malformed header, expected `p cnf <vars> <clauses>`")]
    BadHeader { line: usize },
    #[error("line {line}: data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("no `p cnf` header found")]
    NoHeader,
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds the declared {num_vars} variables")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("line {line}: tautological clause (contains {lit} and its negation)")]
    Tautology { line: usize, lit: i64 },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
}

/// Parses a DIMACS CNF file. Clauses may span lines; lines starting with
/// `c` are comments and a line starting with `%` ends the clause section.
pub fn parse_dimacs(input: &[u8]) -> Result<CnfFormula, DimacsError> {
    let text = std::str::from_utf8(input).map_err(|_| DimacsError::Utf8)?;
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MissingHeader { line: line_no })?;
        for token in line.split_whitespace() {
            let code: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if code == 0 {
                let clause = Clause::new(current.drain(..)).map_err(|t| DimacsError::Tautology {
                    line: current_line,
                    lit: t.0.to_dimacs(),
                })?;
                clauses.push(clause);
                continue;
            }
            if code.unsigned_abs() > u64::from(num_vars) {
                return Err(DimacsError::LiteralOutOfRange {
                    line: line_no,
                    lit: code,
                    num_vars,
                });
            }
            if current.is_empty() {
                current_line = line_no;
            }
            current.push(Literal::from_dimacs(code).expect("nonzero"));
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::NoHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses).expect("literals were range-checked"))
}

fn parse_header(line: &str, line_no: usize) -> Result<(u32, usize), DimacsError> {
    let bad = || DimacsError::BadHeader { line: line_no };
    let mut parts = line.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("cnf") {
        return Err(bad());
    }
    let n = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    let m = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((n, m))
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.len()).unwrap();
    for c in formula.clauses() {
        out.push_str(&c.to_dimacs_line());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("line {line}: expected `<var> -> <lit|T|F>`")]
    Syntax { line: usize },
    #[error("line {line}: variable {var} is mapped twice")]
    Duplicate { line: usize, var: u32 },
}

/// Parses substitution lines of the form `5 -> 1`, `6 -> -2`, `7 -> T`.
pub fn parse_substitution(input: &[u8]) -> Result<Substitution, SubstitutionError> {
    let text = std::str::from_utf8(input).map_err(|_| SubstitutionError::Utf8)?;
    let mut sigma = Substitution::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = || SubstitutionError::Syntax { line: line_no };
        let (lhs, rhs) = line.split_once("->").ok_or_else(syntax)?;
        let var = lhs
            .trim()
            .parse::<u32>()
            .ok()
            .and_then(Variable::try_new)
            .ok_or_else(syntax)?;
        let value = match rhs.trim() {
            "T" => SubstValue::True,
            "F" => SubstValue::False,
            other => SubstValue::Lit(
                other
                    .parse::<i64>()
                    .ok()
                    .and_then(Literal::from_dimacs)
                    .ok_or_else(syntax)?,
            ),
        };
        if sigma.insert(var, value).is_some() {
            return Err(SubstitutionError::Duplicate {
                line: line_no,
                var: var.id(),
            });
        }
    }
    Ok(sigma)
}

pub fn write_substitution(sigma: &Substitution) -> String {
    let mut out = String::new();
    for (var, value) in sigma.iter() {
        let rhs = match value {
            SubstValue::True => "T".to_string(),
            SubstValue::False => "F".to_string(),
            SubstValue::Lit(l) => l.to_dimacs().to_string(),
        };
        writeln!(out, "{} -> {}", var.id(), rhs).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GAMMA_EX: &str = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n";

    #[test]
    fn single_clause() {
        let f = parse_dimacs(b"p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1, -2])]);
    }

    #[test]
    fn gamma_ex_reserializes_verbatim() {
        let f = parse_dimacs(GAMMA_EX.as_bytes()).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(write_dimacs(&f), GAMMA_EX);
    }

    #[test]
    fn rejects_tautology() {
        assert_eq!(
            parse_dimacs(b"p cnf 1 1\n1 -1 0"),
            Err(DimacsError::Tautology { line: 2, lit: 1 })
        );
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse_dimacs(b"p cnf x 1\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse_dimacs(b"p dnf 1 1\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse_dimacs(b"1 0\n"), Err(DimacsError::MissingHeader { .. })));
        assert_eq!(parse_dimacs(b""), Err(DimacsError::NoHeader));
        assert!(matches!(
            parse_dimacs(b"p cnf 2 1\n3 0\n"),
            Err(DimacsError::LiteralOutOfRange { lit: 3, .. })
        ));
        assert_eq!(
            parse_dimacs(b"p cnf 2 2\n1 0\n"),
            Err(DimacsError::ClauseCount { declared: 2, found: 1 })
        );
        assert_eq!(parse_dimacs(b"p cnf 2 1\n1 2\n"), Err(DimacsError::Unterminated));
        assert!(matches!(parse_dimacs(b"p cnf 2 1\n1 a 0\n"), Err(DimacsError::BadToken { .. })));
        assert_eq!(parse_dimacs(&[0xff, 0xfe]), Err(DimacsError::Utf8));
    }

    #[test]
    fn comments_multiline_clauses_and_empty_clause() {
        let f = parse_dimacs(b"c hello\np cnf 3 2\n1 2\n 3 0 0\n").unwrap();
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1, 2, 3]), Clause::empty()]);
        assert_eq!(write_dimacs(&f), "p cnf 3 2\n1 2 3 0\n0\n");
    }

    #[test]
    fn duplicate_literals_collapse() {
        let f = parse_dimacs(b"p cnf 2 1\n2 1 2 0\n").unwrap();
        assert_eq!(f.clauses()[0].literals().len(), 2);
    }

    #[test]
    fn substitution_file() {
        let s = parse_substitution(b"# header\n5 -> 1\n 6->-2  # trailing\n7 -> T\n8 -> F\n").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(
            s.get(Variable::new(6)),
            Some(SubstValue::Lit(Literal::from_dimacs(-2).unwrap()))
        );
        assert_eq!(s.get(Variable::new(7)), Some(SubstValue::True));
        assert_eq!(parse_substitution(write_substitution(&s).as_bytes()).unwrap(), s);
        assert!(matches!(parse_substitution(b"5 1\n"), Err(SubstitutionError::Syntax { .. })));
        assert!(matches!(parse_substitution(b"0 -> 1\n"), Err(SubstitutionError::Syntax { .. })));
        assert!(matches!(parse_substitution(b"1 -> 0\n"), Err(SubstitutionError::Syntax { .. })));
        assert!(matches!(
            parse_substitution(b"1 -> 2\n1 -> T\n"),
            Err(SubstitutionError::Duplicate { var: 1, .. })
        ));
    }

    fn arb_formula() -> impl Strategy<Value = (u32, Vec<Vec<i64>>)> {
        (1u32..8).prop_flat_map(|n| {
            let lit = (1..=i64::from(n), any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            (Just(n), prop::collection::vec(prop::collection::vec(lit, 0..5), 0..10))
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_parse_is_stable((n, raw) in arb_formula()) {
            let mut text = format!("p cnf {} {}\n", n, raw.len());
            for c in &raw {
                for l in c {
                    text.push_str(&format!("{l} "));
                }
                text.push_str("0\n");
            }
            if let Ok(first) = parse_dimacs(text.as_bytes()) {
                let written = write_dimacs(&first);
                let second = parse_dimacs(written.as_bytes()).unwrap();
                prop_assert_eq!(&first, &second);
                prop_assert_eq!(write_dimacs(&second), written);
            }
        }
    }
}
