//! Restriction of resolution refutations by substitutions.
//!
//! A refutation of Γ is turned into a refutation of Γ|σ by a single pass in
//! topological order. Each node C receives either `True` (σ(C) is
//! tautological) or a clause D ⊆ σ(C) \ {False} that is derivable from Γ|σ.
//! The ⊥ node therefore restricts to ⊥. Each node of the input contributes at
//! most one node to the output, so size never grows.

use thiserror::Error;

use crate::formula::{
    apply_substitution, apply_substitution_with_vars, Clause, CnfFormula, Restricted, SubstValue,
    Substitution,
};
use crate::proof::{
    merge_duplicates, prune_to_root, verify_proof, DedupMode, NodeId, NodeKind, Proof,
    ProofBuilder, PruneError, VerifyError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictError {
    #[error("input proof does not verify: {0}")]
    InvalidInput(#[from] VerifyError),
    #[error("input proof is not a refutation")]
    NotRefutation,
    #[error(transparent)]
    Prune(#[from] PruneError),
    #[error("internal invariant violated at node {node}: {msg}")]
    Internal { node: u32, msg: String },
}

/// Per-node result of restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    True,
    Clause(NodeId),
}

/// Restricts `proof` (a refutation of `formula`) by `sigma`, returning Γ|σ
/// and a verified refutation of it. Γ|σ keeps the original variable count.
pub fn restrict_proof(
    formula: &CnfFormula,
    proof: &Proof,
    sigma: &Substitution,
) -> Result<RestrictOutcome, RestrictError> {
    let restricted_formula = apply_substitution(formula, sigma);
    restrict_into(formula, proof, sigma, restricted_formula)
}

/// As [`restrict_proof`], declaring `num_vars` variables for Γ|σ.
pub fn restrict_proof_with_vars(
    formula: &CnfFormula,
    proof: &Proof,
    sigma: &Substitution,
    num_vars: u32,
) -> Result<RestrictOutcome, RestrictError> {
    let restricted_formula = apply_substitution_with_vars(formula, sigma, num_vars).map_err(|e| {
        RestrictError::Internal {
            node: 0,
            msg: e.to_string(),
        }
    })?;
    restrict_into(formula, proof, sigma, restricted_formula)
}

#[derive(Clone, Debug)]
pub struct RestrictOutcome {
    pub formula: CnfFormula,
    pub proof: Proof,
}

/// Whether every literal of `d` is the image of some literal of `c`.
fn within_image(d: &Clause, c: &Clause, sigma: &Substitution) -> bool {
    d.literals().iter().all(|&l| {
        c.literals()
            .iter()
            .any(|&p| sigma.apply_lit(p) == SubstValue::Lit(l))
    })
}

fn restrict_into(
    formula: &CnfFormula,
    proof: &Proof,
    sigma: &Substitution,
    restricted_formula: CnfFormula,
) -> Result<RestrictOutcome, RestrictError> {
    if !verify_proof(formula, proof)?.is_refutation {
        return Err(RestrictError::NotRefutation);
    }
    let mut builder = ProofBuilder::new();
    let mut states: Vec<State> = Vec::with_capacity(proof.size());
    let index = |id: NodeId| proof.index_of(id).expect("verified proof");

    for node in proof.nodes() {
        let state = match node.kind {
            NodeKind::Input => match sigma.restrict_clause(&node.clause) {
                Restricted::True => State::True,
                Restricted::Clause(d) => State::Clause(builder.input(d)),
            },
            NodeKind::Resolvent { left, right, pivot } => {
                let (mut pos, mut neg) = (index(left), index(right));
                if !proof.nodes()[pos].clause.contains(pivot.positive()) {
                    std::mem::swap(&mut pos, &mut neg);
                }
                let (pos_state, neg_state) = (states[pos], states[neg]);
                let side_tautological = |i: usize| {
                    let rest = proof.nodes()[i].clause.literals().iter().copied().filter(|l| l.var() != pivot);
                    let rest = Clause::new(rest).expect("subclause of a clause");
                    sigma.restrict_clause(&rest) == Restricted::True
                };
                match sigma.apply_var(pivot) {
                    SubstValue::True => neg_state,
                    SubstValue::False => pos_state,
                    SubstValue::Lit(lit) => match (pos_state, neg_state) {
                        (State::Clause(a), State::Clause(b)) => {
                            if !builder.clause(a).contains(lit) {
                                State::Clause(a)
                            } else if !builder.clause(b).contains(!lit) {
                                State::Clause(b)
                            } else {
                                match builder.resolve(a, b, lit.var()) {
                                    Ok(id) => State::Clause(id),
                                    Err(_) => State::True,
                                }
                            }
                        }
                        (State::True, State::Clause(b)) => {
                            if side_tautological(pos) {
                                State::True
                            } else {
                                State::Clause(b)
                            }
                        }
                        (State::Clause(a), State::True) => {
                            if side_tautological(neg) {
                                State::True
                            } else {
                                State::Clause(a)
                            }
                        }
                        (State::True, State::True) => State::True,
                    },
                }
            }
        };
        // state = True ⟹ C|σ = True; otherwise state ⊆ C|σ.
        let ok = match state {
            State::True => sigma.restrict_clause(&node.clause) == Restricted::True,
            State::Clause(d) => within_image(builder.clause(d), &node.clause, sigma),
        };
        if !ok {
            return Err(RestrictError::Internal {
                node: node.id.get(),
                msg: format!("state {:?} is not within σ({})", state, node.clause),
            });
        }
        states.push(state);
    }

    let root = proof.root().expect("refutation");
    match states[index(root)] {
        State::Clause(d) if builder.clause(d).is_empty() => {}
        other => {
            return Err(RestrictError::Internal {
                node: root.get(),
                msg: format!("empty clause restricted to {other:?}"),
            })
        }
    }
    let raw = builder.finish();
    let pruned = prune_to_root(&raw)?;
    let deduped = merge_duplicates(&pruned, DedupMode::SameClause);
    let out = prune_to_root(&deduped)?;
    let verified = verify_proof(&restricted_formula, &out).map_err(|e| RestrictError::Internal {
        node: e.node,
        msg: format!("output does not verify: {e}"),
    })?;
    if !verified.is_refutation || out.size() > proof.size() {
        return Err(RestrictError::Internal {
            node: 0,
            msg: "output is not a refutation no larger than the input".into(),
        });
    }
    Ok(RestrictOutcome {
        formula: restricted_formula,
        proof: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{ex1, gamma_ex};
    use crate::formula::Variable;
    use crate::regularize::{canonical_sigma, regularize};

    fn cnf(n: u32, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(n, clauses.iter().map(|c| Clause::from_dimacs(c)).collect()).unwrap()
    }

    #[test]
    fn empty_substitution_is_identity() {
        let out = restrict_proof(&gamma_ex(), &ex1(), &Substitution::new()).unwrap();
        assert_eq!(out.proof, ex1());
        assert_eq!(out.formula, gamma_ex());
    }

    #[test]
    fn setting_x1_true() {
        let f = cnf(2, &[&[1, 2], &[-1, 2], &[-2]]);
        let mut b = ProofBuilder::new();
        let c1 = b.input(Clause::from_dimacs(&[1, 2]));
        let c2 = b.input(Clause::from_dimacs(&[-1, 2]));
        let c3 = b.input(Clause::from_dimacs(&[-2]));
        let r = b.resolve(c1, c2, Variable::new(1)).unwrap();
        b.resolve(r, c3, Variable::new(2)).unwrap();
        let sigma: Substitution = [(Variable::new(1), SubstValue::True)].into_iter().collect();
        let out = restrict_proof(&f, &b.finish(), &sigma).unwrap();
        assert_eq!(out.formula, cnf(2, &[&[2], &[-2]]));
        assert_eq!(out.proof.size(), 3);
        assert!(verify_proof(&out.formula, &out.proof).unwrap().is_refutation);
    }

    #[test]
    fn ex1_round_trip_through_regularization() {
        let reg = regularize(&gamma_ex(), &ex1()).unwrap();
        let sigma = canonical_sigma(&reg.scheme);
        let out = restrict_proof_with_vars(&reg.formula, &reg.proof, &sigma, 2).unwrap();
        assert!(verify_proof(&gamma_ex(), &out.proof).unwrap().is_refutation);
        assert!(out.proof.size() <= reg.proof.size());
        assert!(out.formula.same_clauses(&gamma_ex()));
    }

    #[test]
    fn merging_variables_through_tautologies() {
        // σ(x2) = x1 makes {1,2},{-1,-2} tautological.
        let sigma: Substitution = [(Variable::new(2), SubstValue::Lit(Variable::new(1).positive()))]
            .into_iter()
            .collect();
        let out = restrict_proof(&gamma_ex(), &ex1(), &sigma).unwrap();
        assert!(verify_proof(&out.formula, &out.proof).unwrap().is_refutation);
        assert!(out.proof.size() <= ex1().size());
    }

    #[test]
    fn rejects_non_refutation() {
        let mut b = ProofBuilder::new();
        b.input(Clause::from_dimacs(&[1, 2]));
        assert_eq!(
            restrict_proof(&gamma_ex(), &b.finish(), &Substitution::new()).unwrap_err(),
            RestrictError::NotRefutation
        );
    }
}
