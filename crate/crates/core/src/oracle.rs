//! Reference provers and exhaustive oracles for small instances.
//!
//! * [`dp_prove`]: Davis–Putnam variable elimination. Its refutations are
//!   regular because pivots follow the elimination order along every path.
//! * [`min_height`] / [`min_size`]: least height and least size of any
//!   refutation, by saturation and iterative deepening respectively.
//! * [`random_refutation`]: a seeded generator of unsatisfiable formulas with
//!   verified (optionally irregular) refutations.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{brute_sat, Assignment, Clause, CnfFormula, Literal, SatResult, Variable};
use crate::proof::{prune_to_root, verify_proof, NodeId, Proof, ProofBuilder};

/// A permutation of the variables 1..=n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder(Vec<Variable>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("order has {found} entries but the formula has {expected} variables")]
    Length { expected: u32, found: usize },
    #[error("variable {0} is out of range or repeated")]
    Invalid(u32),
}

impl EliminationOrder {
    pub fn identity(n: u32) -> EliminationOrder {
        EliminationOrder((1..=n).map(Variable::new).collect())
    }

    pub fn new(ids: &[u32], n: u32) -> Result<EliminationOrder, OrderError> {
        if ids.len() != n as usize {
            return Err(OrderError::Length {
                expected: n,
                found: ids.len(),
            });
        }
        let mut seen = vec![false; n as usize];
        for &id in ids {
            if id == 0 || id > n || seen[id as usize - 1] {
                return Err(OrderError::Invalid(id));
            }
            seen[id as usize - 1] = true;
        }
        Ok(EliminationOrder(ids.iter().map(|&i| Variable::new(i)).collect()))
    }

    pub fn vars(&self) -> &[Variable] {
        &self.0
    }
}

/// Polynomial step budget b(m) = c·m^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetPolicy {
    pub c: u64,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("budget coefficients must satisfy c >= 1 and k >= 1 (got c={c}, k={k})")]
pub struct BadPolicy {
    pub c: u64,
    pub k: u32,
}

impl BudgetPolicy {
    pub fn new(c: u64, k: u32) -> Result<BudgetPolicy, BadPolicy> {
        if c >= 1 && k >= 1 {
            Ok(BudgetPolicy { c, k })
        } else {
            Err(BadPolicy { c, k })
        }
    }

    /// Saturates at `u64::MAX`.
    pub fn apply(&self, m: u64) -> u64 {
        m.checked_pow(self.k)
            .and_then(|p| p.checked_mul(self.c))
            .unwrap_or(u64::MAX)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DpOutcome {
    Refuted(Proof),
    Sat(Assignment),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpRun {
    pub outcome: DpOutcome,
    /// Attempted resolvent constructions.
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step budget of {budget} exhausted")]
pub struct BudgetExhausted {
    pub budget: u64,
    pub steps: u64,
}

/// Davis–Putnam elimination in `order`. Tautological and repeated resolvents
/// are discarded. One step is one attempted resolvent construction; with a
/// budget, the run stops once the next step would exceed it.
pub fn dp_prove(
    formula: &CnfFormula,
    order: &EliminationOrder,
    budget: Option<u64>,
) -> Result<DpRun, BudgetExhausted> {
    let mut builder = ProofBuilder::new();
    let mut active: Vec<(Clause, NodeId)> = Vec::new();
    let mut present: HashSet<Clause> = HashSet::new();
    for c in formula.clauses() {
        if present.insert(c.clone()) {
            let id = builder.input(c.clone());
            active.push((c.clone(), id));
        }
    }
    let mut steps = 0u64;
    let finish = |builder: ProofBuilder, steps| DpRun {
        outcome: DpOutcome::Refuted(
            prune_to_root(&builder.finish()).expect("an empty clause was derived"),
        ),
        steps,
    };
    if present.contains(&Clause::empty()) {
        return Ok(finish(builder, steps));
    }

    // Eliminated variable with the clauses that contained it.
    let mut history: Vec<(Variable, Vec<Clause>, Vec<Clause>)> = Vec::new();
    for &x in order.vars() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for entry in active.drain(..) {
            match entry.0.literal_of(x) {
                Some(l) if l.is_positive() => pos.push(entry),
                Some(_) => neg.push(entry),
                None => rest.push(entry),
            }
        }
        for (pc, pid) in &pos {
            for (nc, nid) in &neg {
                steps += 1;
                if budget.is_some_and(|b| steps > b) {
                    return Err(BudgetExhausted {
                        budget: budget.unwrap(),
                        steps: steps - 1,
                    });
                }
                let Some(r) = pc.resolve(nc, x) else { continue };
                if !present.insert(r.clone()) {
                    continue;
                }
                let id = builder
                    .resolve(*pid, *nid, x)
                    .expect("premises clash on the pivot");
                if r.is_empty() {
                    return Ok(finish(builder, steps));
                }
                rest.push((r, id));
            }
        }
        for (c, _) in pos.iter().chain(&neg) {
            present.remove(c);
        }
        history.push((
            x,
            pos.into_iter().map(|e| e.0).collect(),
            neg.into_iter().map(|e| e.0).collect(),
        ));
        active = rest;
    }

    // Every variable is gone and no empty clause appeared, so the formula is
    // satisfiable. Extend a model backwards through the eliminations.
    let mut model = vec![false; formula.num_vars() as usize];
    for (x, pos, _neg) in history.iter().rev() {
        let holds = |c: &Clause, model: &[bool]| {
            c.literals()
                .iter()
                .any(|l| l.var() != *x && model[l.var().index()] == l.is_positive())
        };
        model[x.index()] = pos.iter().any(|c| !holds(c, &model));
    }
    let model = Assignment(model);
    debug_assert!(formula.evaluate(&model));
    Ok(DpRun {
        outcome: DpOutcome::Sat(model),
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no refutation within the cap of {0}")]
    ExceedsCap(usize),
}

/// Clause -> (level, premises and pivot if derived).
type Derivations = HashMap<Clause, (u32, Option<(Clause, Clause, Variable)>)>;

/// Least h such that ⊥ is derivable at height ≤ h: level k+1 adds every
/// resolvent of two clauses available at level k.
pub fn min_height(formula: &CnfFormula, cap: usize) -> Result<u32, OracleError> {
    min_height_witness(formula, cap).map(|(h, _)| h)
}

/// [`min_height`] together with a refutation attaining it.
pub fn min_height_witness(formula: &CnfFormula, cap: usize) -> Result<(u32, Proof), OracleError> {
    let mut known: Derivations = HashMap::new();
    let mut order: Vec<Clause> = Vec::new();
    for c in formula.clauses() {
        if !known.contains_key(c) {
            known.insert(c.clone(), (0, None));
            order.push(c.clone());
        }
    }
    let bottom = Clause::empty();
    let mut level = 0u32;
    while !known.contains_key(&bottom) {
        if level as usize >= cap {
            return Err(OracleError::ExceedsCap(cap));
        }
        level += 1;
        let snapshot = order.clone();
        let mut grew = false;
        for (i, a) in snapshot.iter().enumerate() {
            for b in &snapshot[i + 1..] {
                let clashes = a.clashing_vars(b);
                let &[pivot] = clashes.as_slice() else { continue };
                let (p, n) = if a.contains(pivot.positive()) { (a, b) } else { (b, a) };
                let r = p.resolve(n, pivot).expect("single clash");
                if !known.contains_key(&r) {
                    known.insert(r.clone(), (level, Some((p.clone(), n.clone(), pivot))));
                    order.push(r);
                    grew = true;
                }
            }
        }
        if !grew && !known.contains_key(&bottom) {
            return Err(OracleError::ExceedsCap(cap));
        }
    }

    let mut builder = ProofBuilder::new();
    let mut ids: HashMap<Clause, NodeId> = HashMap::new();
    fn emit(
        c: &Clause,
        known: &Derivations,
        ids: &mut HashMap<Clause, NodeId>,
        builder: &mut ProofBuilder,
    ) -> NodeId {
        if let Some(&id) = ids.get(c) {
            return id;
        }
        let id = match &known[c].1 {
            None => builder.input(c.clone()),
            Some((p, n, pivot)) => {
                let a = emit(p, known, ids, builder);
                let b = emit(n, known, ids, builder);
                builder.resolve(a, b, *pivot).expect("recorded inference")
            }
        };
        ids.insert(c.clone(), id);
        id
    }
    emit(&bottom, &known, &mut ids, &mut builder);
    Ok((level, builder.finish()))
}

/// Least number of clauses in a refutation, by iterative deepening over sets
/// of clauses closed under "each member is an input or a resolvent of two
/// members". Sets already explored at the current bound are memoized.
pub fn min_size(formula: &CnfFormula, cap: usize) -> Result<usize, OracleError> {
    let mut inputs: Vec<Clause> = formula.clauses().to_vec();
    inputs.sort();
    inputs.dedup();
    if inputs.iter().any(Clause::is_empty) {
        return Ok(1);
    }
    for bound in 1..=cap {
        let mut visited = HashSet::new();
        if deepen(&inputs, &mut Vec::new(), bound, &mut visited) {
            return Ok(bound);
        }
    }
    Err(OracleError::ExceedsCap(cap))
}

fn deepen(
    inputs: &[Clause],
    set: &mut Vec<Clause>,
    bound: usize,
    visited: &mut HashSet<Vec<Clause>>,
) -> bool {
    let remaining = bound - set.len();
    if remaining == 0 {
        return false;
    }
    let mut key = set.clone();
    key.sort();
    if !visited.insert(key) {
        return false;
    }
    let mut candidates: Vec<Clause> = Vec::new();
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            let clashes = a.clashing_vars(b);
            let &[pivot] = clashes.as_slice() else { continue };
            let (p, n) = if a.contains(pivot.positive()) { (a, b) } else { (b, a) };
            let r = p.resolve(n, pivot).expect("single clash");
            if r.is_empty() {
                return true;
            }
            if !set.contains(&r) && !candidates.contains(&r) {
                candidates.push(r);
            }
        }
    }
    // The last slot can only hold ⊥, which was checked above.
    if remaining == 1 {
        return false;
    }
    candidates.extend(inputs.iter().filter(|c| !set.contains(c)).cloned());
    for c in candidates {
        set.push(c);
        let found = deepen(inputs, set, bound, visited);
        set.pop();
        if found {
            return true;
        }
    }
    false
}

/// Parameters for [`random_refutation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: u32,
    pub m: usize,
    /// Build the refutation by randomized resolution search (which tends to
    /// reuse derived clauses and resolve variables repeatedly) instead of
    /// Davis–Putnam elimination.
    pub detours: bool,
}

fn sample_formula(rng: &mut ChaCha8Rng, n: u32, m: usize, unit_bias: f64) -> CnfFormula {
    let vars: Vec<u32> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let width = if rng.gen_bool(unit_bias) {
                1
            } else {
                rng.gen_range(2..=3.min(n as usize).max(1))
            };
            let picked = vars.choose_multiple(rng, width);
            Clause::new(picked.map(|&v| Literal::new(Variable::new(v), rng.gen_bool(0.5))))
                .expect("distinct variables")
        })
        .collect();
    CnfFormula::new(n, clauses).expect("variables within range")
}

/// Candidate resolvents as (width, random key, i, j, pivot).
type Frontier = BinaryHeap<Reverse<(usize, u64, usize, usize, u32)>>;

/// Randomized resolution search: repeatedly pick a random resolvent among
/// the narrowest available (width within one of the minimum), until ⊥.
fn search_refutation(formula: &CnfFormula, rng: &mut ChaCha8Rng, limit: usize) -> Option<Proof> {
    let mut builder = ProofBuilder::new();
    let mut pool: Vec<(Clause, NodeId)> = Vec::new();
    let mut present: HashSet<Clause> = HashSet::new();
    let mut heap: Frontier = BinaryHeap::new();

    let add = |c: Clause,
                   id: NodeId,
                   pool: &mut Vec<(Clause, NodeId)>,
                   heap: &mut Frontier,
                   rng: &mut ChaCha8Rng| {
        let j = pool.len();
        for (i, (d, _)) in pool.iter().enumerate() {
            let clashes = c.clashing_vars(d);
            if let &[pivot] = clashes.as_slice() {
                let width = c.len() + d.len() - 2;
                heap.push(Reverse((width, rng.gen(), i, j, pivot.id())));
            }
        }
        pool.push((c, id));
    };

    for c in formula.clauses() {
        if present.insert(c.clone()) {
            let id = builder.input(c.clone());
            if c.is_empty() {
                return prune_to_root(&builder.finish()).ok();
            }
            add(c.clone(), id, &mut pool, &mut heap, rng);
        }
    }
    while builder.len() < limit {
        let Reverse((min_width, ..)) = *heap.peek()?;
        // Draw among the entries of width ≤ min_width + 1 currently on top.
        let mut window = Vec::new();
        while let Some(&Reverse(entry)) = heap.peek() {
            if entry.0 > min_width + 1 || window.len() >= 8 {
                break;
            }
            window.push(heap.pop().unwrap().0);
        }
        let pick = rng.gen_range(0..window.len());
        let (_, _, i, j, pivot) = window.swap_remove(pick);
        for e in window {
            heap.push(Reverse(e));
        }
        let pivot = Variable::new(pivot);
        let (a, b) = (&pool[i], &pool[j]);
        let (p, n) = if a.0.contains(pivot.positive()) { (a, b) } else { (b, a) };
        let r = p.0.resolve(&n.0, pivot).expect("single clash");
        if !present.insert(r.clone()) {
            continue;
        }
        let id = builder.resolve(p.1, n.1, pivot).expect("single clash");
        if r.is_empty() {
            return prune_to_root(&builder.finish()).ok();
        }
        add(r, id, &mut pool, &mut heap, rng);
    }
    None
}

/// Deterministic-by-seed generator of an unsatisfiable formula with n
/// variables and m clauses (m is raised to at least 2) and a verified,
/// pruned refutation of it.
///
/// Formulas are rejection-sampled with [`brute_sat`]; after repeated
/// satisfiable draws the share of unit clauses grows so the loop ends.
pub fn random_refutation(seed: u64, params: GenParams) -> (CnfFormula, Proof) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n.clamp(1, 20);
    let m = params.m.max(2);
    let mut attempt = 0u32;
    let formula = loop {
        let bias = (0.25 + 0.01 * f64::from(attempt)).min(0.9);
        let f = sample_formula(&mut rng, n, m, bias);
        if brute_sat(&f, 20).expect("n ≤ 20") == SatResult::Unsat {
            break f;
        }
        attempt += 1;
    };
    let searched = if params.detours {
        search_refutation(&formula, &mut rng, 4000)
    } else {
        None
    };
    let proof = searched.unwrap_or_else(|| {
        let mut ids: Vec<u32> = (1..=n).collect();
        ids.shuffle(&mut rng);
        let order = EliminationOrder::new(&ids, n).expect("permutation");
        match dp_prove(&formula, &order, None).expect("unbounded").outcome {
            DpOutcome::Refuted(p) => p,
            DpOutcome::Sat(_) => unreachable!("formula was checked unsatisfiable"),
        }
    });
    debug_assert!(verify_proof(&formula, &proof).is_ok_and(|r| r.is_refutation));
    (formula, proof)
}

/// A refutation corpus entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub seed: u64,
    pub params: GenParams,
    pub formula: CnfFormula,
    pub proof: Proof,
}

/// `count` generated pairs with 2 ≤ n ≤ `max_n` and proof size at most
/// `max_size`, alternating search-built and elimination-built refutations.
/// Entry seeds derive from `seed`, so equal arguments give equal corpora.
pub fn corpus(seed: u64, count: usize, max_n: u32, max_size: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=max_n.max(2));
        let m = rng.gen_range(n as usize..=3 * n as usize);
        let params = GenParams {
            n,
            m,
            detours: out.len() % 4 != 3,
        };
        let entry_seed = rng.gen();
        let (formula, proof) = random_refutation(entry_seed, params);
        if proof.size() <= max_size {
            out.push(CorpusEntry {
                seed: entry_seed,
                params,
                formula,
                proof,
            });
        }
    }
    out
}
