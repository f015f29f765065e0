//! Text format for resolution traces, one node per line:
//!
//! ```text
//! <id> <lit>* 0 0              input clause
//! <id> <lit>* 0 <a> <b> 0      resolvent of nodes a and b
//! ```
//!
//! Pivots are not written. The reader infers each pivot as the unique
//! variable occurring with opposite signs in the two premises, and stores
//! the premise holding it positively first.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Clause, CnfFormula, Literal};
use crate::proof::{NodeId, NodeKind, Proof, ProofNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: &'static str },
    #[error("line {line}: id {id} is not greater than the previous id")]
    NonAscending { line: usize, id: u32 },
    #[error("line {line}, node {node}: unknown premise id {id}")]
    UnknownPremise { line: usize, node: u32, id: u32 },
    #[error("line {line}: clause is tautological")]
    Tautology { line: usize },
    #[error("line {line}: literal {lit} exceeds the formula's {num_vars} variables")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("line {line}, node {node}: input clause {clause} does not occur in the formula")]
    InputNotInFormula { line: usize, node: u32, clause: Clause },
    #[error("line {line}, node {node}: premises clash on {count} variables, expected exactly one")]
    NoUniquePivot { line: usize, node: u32, count: usize },
    #[error("line {line}, node {node}: stated clause {stated} differs from the resolvent {computed}")]
    ResolventMismatch {
        line: usize,
        node: u32,
        stated: Clause,
        computed: Clause,
    },
}

impl TraceError {
    /// The offending node, for errors where the trace is well formed but
    /// the derivation is wrong.
    pub fn node(&self) -> Option<u32> {
        match *self {
            TraceError::UnknownPremise { node, .. }
            | TraceError::InputNotInFormula { node, .. }
            | TraceError::NoUniquePivot { node, .. }
            | TraceError::ResolventMismatch { node, .. } => Some(node),
            _ => None,
        }
    }
}

fn int(token: &str, line: usize) -> Result<i64, TraceError> {
    token.parse().map_err(|_| TraceError::Syntax {
        line,
        msg: "expected an integer",
    })
}

/// Parses a trace and checks it against `formula`.
pub fn parse_trace(input: &[u8], formula: &CnfFormula) -> Result<Proof, TraceError> {
    let text = std::str::from_utf8(input).map_err(|_| TraceError::Utf8)?;
    let inputs = formula.clause_set();
    let mut nodes: Vec<ProofNode> = Vec::new();
    let mut by_id: HashMap<u32, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('c') {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let id = int(tokens.next().expect("line is not blank"), line)?;
        let id = u32::try_from(id)
            .ok()
            .filter(|&v| v >= 1)
            .ok_or(TraceError::Syntax {
                line,
                msg: "node id must be a positive integer",
            })?;
        if nodes.last().is_some_and(|n| n.id.get() >= id) {
            return Err(TraceError::NonAscending { line, id });
        }

        let mut lits = Vec::new();
        let mut terminated = false;
        for t in tokens.by_ref() {
            let code = int(t, line)?;
            if code == 0 {
                terminated = true;
                break;
            }
            if code.unsigned_abs() > u64::from(formula.num_vars()) {
                return Err(TraceError::LiteralOutOfRange {
                    line,
                    lit: code,
                    num_vars: formula.num_vars(),
                });
            }
            lits.push(Literal::from_dimacs(code).expect("nonzero"));
        }
        if !terminated {
            return Err(TraceError::Syntax {
                line,
                msg: "clause is not terminated by 0",
            });
        }
        let clause = Clause::new(lits).map_err(|_| TraceError::Tautology { line })?;

        let mut premises = Vec::new();
        let mut terminated = false;
        for t in tokens.by_ref() {
            let v = int(t, line)?;
            if v == 0 {
                terminated = true;
                break;
            }
            let p = u32::try_from(v).map_err(|_| TraceError::Syntax {
                line,
                msg: "premise id must be positive",
            })?;
            premises.push(p);
        }
        if !terminated {
            return Err(TraceError::Syntax {
                line,
                msg: "premise list is not terminated by 0",
            });
        }
        if tokens.next().is_some() {
            return Err(TraceError::Syntax {
                line,
                msg: "trailing tokens after the premise list",
            });
        }

        let kind = match premises.as_slice() {
            [] => {
                if !inputs.contains(&clause) {
                    return Err(TraceError::InputNotInFormula { line, node: id, clause });
                }
                NodeKind::Input
            }
            &[a, b] => {
                let lookup = |p: u32| {
                    by_id
                        .get(&p)
                        .copied()
                        .ok_or(TraceError::UnknownPremise { line, node: id, id: p })
                };
                let (ia, ib) = (lookup(a)?, lookup(b)?);
                let (ca, cb) = (&nodes[ia].clause, &nodes[ib].clause);
                let clashes = ca.clashing_vars(cb);
                let &[pivot] = clashes.as_slice() else {
                    return Err(TraceError::NoUniquePivot {
                        line,
                        node: id,
                        count: clashes.len(),
                    });
                };
                let (left, right) = if ca.contains(pivot.positive()) { (ia, ib) } else { (ib, ia) };
                let computed = nodes[left]
                    .clause
                    .resolve(&nodes[right].clause, pivot)
                    .expect("a single clash never yields a tautology");
                if computed != clause {
                    return Err(TraceError::ResolventMismatch {
                        line,
                        node: id,
                        stated: clause,
                        computed,
                    });
                }
                NodeKind::Resolvent {
                    left: nodes[left].id,
                    right: nodes[right].id,
                    pivot,
                }
            }
            _ => {
                return Err(TraceError::Syntax {
                    line,
                    msg: "a node has either zero or two premises",
                })
            }
        };
        by_id.insert(id, nodes.len());
        nodes.push(ProofNode {
            id: NodeId::new(id),
            clause,
            kind,
        });
    }
    Ok(Proof::new(nodes).expect("ids ascend and premises were resolved against earlier nodes"))
}

pub fn write_trace(proof: &Proof) -> String {
    let mut out = String::new();
    for node in proof.nodes() {
        write!(out, "{} ", node.id).unwrap();
        for l in node.clause.literals() {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        match node.kind {
            NodeKind::Input => out.push_str("0 0\n"),
            NodeKind::Resolvent { left, right, .. } => {
                writeln!(out, "0 {left} {right} 0").unwrap();
            }
        }
    }
    out
}
