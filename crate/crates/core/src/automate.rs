//! Automating resolution through a prover for regular resolution.
//!
//! For r = 0, 1, 2, … the prover runs on f(Γ, max(1, r)) with the step
//! budget t(u(|Γ| + r)). The first regular refutation it returns is mapped
//! back to Γ with the canonical substitution W[x, j] ↦ x, which sends
//! f(Γ, h) to Γ.

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Assignment, CnfFormula};
use crate::oracle::{dp_prove, BudgetPolicy, DpOutcome, EliminationOrder};
use crate::proof::{is_regular, verify_proof, Proof, VerifyError};
use crate::regularize::{build_f, canonical_sigma, LevelScheme};
use crate::restrict::{restrict_proof_with_vars, RestrictError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProverOutcome {
    Refuted(Proof),
    Satisfiable(Assignment),
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverRun {
    pub outcome: ProverOutcome,
    pub steps: u64,
}

/// A procedure that searches for regular refutations within a step budget.
pub trait RegularProver {
    fn name(&self) -> &str;
    fn prove(&mut self, formula: &CnfFormula, budget: u64) -> ProverRun;
}

/// Davis–Putnam elimination in increasing variable order.
#[derive(Clone, Copy, Debug, Default)]
pub struct DpProver;

impl RegularProver for DpProver {
    fn name(&self) -> &str {
        "dp"
    }

    fn prove(&mut self, formula: &CnfFormula, budget: u64) -> ProverRun {
        let order = EliminationOrder::identity(formula.num_vars());
        match dp_prove(formula, &order, Some(budget)) {
            Ok(run) => ProverRun {
                steps: run.steps,
                outcome: match run.outcome {
                    DpOutcome::Refuted(p) => ProverOutcome::Refuted(p),
                    DpOutcome::Sat(m) => ProverOutcome::Satisfiable(m),
                },
            },
            Err(e) => ProverRun {
                outcome: ProverOutcome::Exhausted,
                steps: e.steps,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AutomateConfig {
    pub t: BudgetPolicy,
    pub u: BudgetPolicy,
    pub r_max: u64,
    /// Visit r = 0, 1, 2, 4, 8, … instead of every r.
    pub geometric: bool,
}

impl Default for AutomateConfig {
    fn default() -> Self {
        AutomateConfig {
            t: BudgetPolicy { c: 1, k: 2 },
            u: BudgetPolicy { c: 1, k: 2 },
            r_max: 64,
            geometric: false,
        }
    }
}

impl AutomateConfig {
    pub fn budget(&self, formula_size: u64, r: u64) -> u64 {
        self.t.apply(self.u.apply(formula_size.saturating_add(r)))
    }

    /// Rounds visited, in order, up to and including `r_max`.
    pub fn schedule(&self) -> Vec<u64> {
        let mut rounds = Vec::new();
        let mut r = 0u64;
        while r <= self.r_max {
            rounds.push(r);
            r = if self.geometric && r >= 1 { r * 2 } else { r + 1 };
        }
        rounds
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundReport {
    pub r: u64,
    pub h: u32,
    pub budget: u64,
    pub steps: u64,
    pub outcome: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomateReport {
    pub prover: String,
    pub formula_size: u64,
    /// The round that succeeded.
    pub r: u64,
    pub rounds: Vec<RoundReport>,
    pub total_steps: u64,
    /// Σ of the budgets of all rounds run.
    pub budget_sum: u64,
    pub size: usize,
    pub height: u32,
    #[serde(skip)]
    pub proof: Proof,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomateError {
    #[error("no refutation found for r up to {r_max}")]
    RMaxReached { r_max: u64, rounds: Vec<RoundReport> },
    #[error("prover reported the formula satisfiable at r = {r}")]
    Satisfiable { r: u64, model: Assignment },
    #[error("round {r}: prover output does not verify: {error}")]
    InvalidProof { r: u64, error: VerifyError },
    #[error("round {r}: prover output is not a refutation")]
    NotRefutation { r: u64 },
    #[error("round {r}: prover output is not regular")]
    IrregularProof { r: u64 },
    #[error("round {r}: prover spent {steps} steps over a budget of {budget}")]
    OverBudget { r: u64, steps: u64, budget: u64 },
    #[error("restriction failed: {0}")]
    Restrict(#[from] RestrictError),
}

/// Runs the round loop and returns a verified refutation of `formula`.
///
/// Invalid or irregular prover output is a hard error, not a reason to move
/// to the next round.
pub fn automate_resolution(
    formula: &CnfFormula,
    prover: &mut dyn RegularProver,
    config: &AutomateConfig,
) -> Result<AutomateReport, AutomateError> {
    let size = formula.symbol_size();
    let mut rounds = Vec::new();
    let mut total_steps = 0u64;
    let mut budget_sum = 0u64;
    for r in config.schedule() {
        let h = r.max(1).min(u64::from(u32::MAX)) as u32;
        let f = build_f(formula, h).expect("h ≥ 1");
        let budget = config.budget(size, r);
        let run = prover.prove(&f, budget);
        if run.steps > budget {
            return Err(AutomateError::OverBudget {
                r,
                steps: run.steps,
                budget,
            });
        }
        total_steps = total_steps.saturating_add(run.steps);
        budget_sum = budget_sum.saturating_add(budget);
        let label = match run.outcome {
            ProverOutcome::Refuted(_) => "refuted",
            ProverOutcome::Satisfiable(_) => "satisfiable",
            ProverOutcome::Exhausted => "exhausted",
        };
        rounds.push(RoundReport {
            r,
            h,
            budget,
            steps: run.steps,
            outcome: label,
        });
        match run.outcome {
            ProverOutcome::Exhausted => continue,
            ProverOutcome::Satisfiable(model) => {
                return Err(AutomateError::Satisfiable { r, model });
            }
            ProverOutcome::Refuted(proof) => {
                let report = verify_proof(&f, &proof)
                    .map_err(|error| AutomateError::InvalidProof { r, error })?;
                if !report.is_refutation {
                    return Err(AutomateError::NotRefutation { r });
                }
                if !is_regular(&proof).is_regular() {
                    return Err(AutomateError::IrregularProof { r });
                }
                let scheme = LevelScheme::new(formula.num_vars(), h).expect("h ≥ 1");
                let sigma = canonical_sigma(&scheme);
                let back = restrict_proof_with_vars(&f, &proof, &sigma, formula.num_vars())?;
                let check = verify_proof(formula, &back.proof).map_err(|e| {
                    AutomateError::Restrict(RestrictError::Internal {
                        node: e.node,
                        msg: format!("restricted proof does not refute the original formula: {e}"),
                    })
                })?;
                return Ok(AutomateReport {
                    prover: prover.name().to_string(),
                    formula_size: size,
                    r,
                    rounds,
                    total_steps,
                    budget_sum,
                    size: check.size,
                    height: check.height,
                    proof: back.proof,
                });
            }
        }
    }
    Err(AutomateError::RMaxReached {
        r_max: config.r_max,
        rounds,
    })
}
