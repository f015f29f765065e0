//! Regularization of resolution refutations over leveled variables.
//!
//! Given Γ over n variables and a height parameter h, the formula f(Γ, h)
//! adds variables W[x, j] for j < h (with W[x, h] = x) and the 2-clauses
//! `¬W[x,j] ∨ W[x,j+1]` and `W[x,j] ∨ ¬W[x,j+1]`. A refutation Π of Γ of
//! height h becomes a regular refutation of f(Γ, h): every clause D of Π is
//! replaced by g(D) = ⋁ W[p, L_D(p)], where L_D is the irregularity height,
//! and premises are *lowered* to the levels each inference needs through
//! the 2-clauses. Along every path the levels of pivots on copies of the
//! same x strictly decrease, so no variable is resolved twice.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Clause, CnfFormula, Literal, SubstValue, Substitution, Variable};
use crate::proof::{
    height, irregularity_heights, is_regular, prune_to_root, verify_proof, IrregularityTable,
    NodeId, NodeKind, Proof, ProofBuilder, PruneError, Regularity, VerifyError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularizeError {
    #[error("height parameter must be at least 1")]
    ZeroHeight,
    #[error("variable {0} is not a leveled variable of this scheme")]
    NotLeveled(u32),
    #[error("clause mentions original variable {0} at two levels")]
    MixedLevels(u32),
    #[error("literal {lit} has irregularity height {level}, outside 1..={h}")]
    LevelOutOfRange { lit: i64, level: u32, h: u32 },
    #[error("input proof does not verify: {0}")]
    InvalidInput(#[from] VerifyError),
    #[error("input proof is not a refutation")]
    NotRefutation,
    #[error(transparent)]
    Prune(#[from] PruneError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Bijection between leveled variables W[x, j] (x ∈ [n], j ∈ [h]) and ids
/// 1..=h·n, with id(W[x, j]) = n·(h − j) + x. Level h keeps original ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelScheme {
    n: u32,
    h: u32,
}

impl LevelScheme {
    pub fn new(n: u32, h: u32) -> Result<LevelScheme, RegularizeError> {
        if h == 0 {
            return Err(RegularizeError::ZeroHeight);
        }
        Ok(LevelScheme { n, h })
    }

    /// Recovers the scheme from the original and transformed variable counts.
    pub fn from_counts(n: u32, total: u32) -> Option<LevelScheme> {
        if n == 0 {
            return (total == 0).then_some(LevelScheme { n: 0, h: 1 });
        }
        (total.is_multiple_of(n) && total >= n).then_some(LevelScheme { n, h: total / n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn total_vars(&self) -> u32 {
        self.h * self.n
    }

    pub fn var(&self, x: Variable, level: u32) -> Variable {
        debug_assert!(x.id() <= self.n && (1..=self.h).contains(&level));
        Variable::new(self.n * (self.h - level) + x.id())
    }

    /// W[p, j], with W[¬x, j] = ¬W[x, j].
    pub fn lit(&self, p: Literal, level: u32) -> Literal {
        Literal::new(self.var(p.var(), level), p.is_positive())
    }

    pub fn decode_var(&self, v: Variable) -> Option<(Variable, u32)> {
        if self.n == 0 || v.id() > self.total_vars() {
            return None;
        }
        let k = v.index() as u32 / self.n;
        let x = v.index() as u32 % self.n + 1;
        Some((Variable::new(x), self.h - k))
    }

    pub fn decode_lit(&self, l: Literal) -> Option<(Literal, u32)> {
        self.decode_var(l.var())
            .map(|(x, j)| (Literal::new(x, l.is_positive()), j))
    }
}

/// A clause over leveled variables, with its decoded (literal, level) view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeveledClause {
    clause: Clause,
    /// Sorted by original literal; one level per original variable.
    levels: Vec<(Literal, u32)>,
}

impl LeveledClause {
    pub fn decode(clause: Clause, scheme: &LevelScheme) -> Result<LeveledClause, RegularizeError> {
        let mut levels = Vec::with_capacity(clause.len());
        for &l in clause.literals() {
            let pair = scheme
                .decode_lit(l)
                .ok_or(RegularizeError::NotLeveled(l.var().id()))?;
            levels.push(pair);
        }
        levels.sort_unstable();
        for w in levels.windows(2) {
            if w[0].0.var() == w[1].0.var() {
                return Err(RegularizeError::MixedLevels(w[0].0.var().id()));
            }
        }
        Ok(LeveledClause { clause, levels })
    }

    pub fn from_levels(
        levels: impl IntoIterator<Item = (Literal, u32)>,
        scheme: &LevelScheme,
    ) -> Result<LeveledClause, RegularizeError> {
        let lits: Vec<Literal> = levels.into_iter().map(|(p, j)| scheme.lit(p, j)).collect();
        let clause = Clause::new(lits).map_err(|t| {
            let x = scheme.decode_var(t.0.var()).map_or(0, |(x, _)| x.id());
            RegularizeError::MixedLevels(x)
        })?;
        LeveledClause::decode(clause, scheme)
    }

    pub fn clause(&self) -> &Clause {
        &self.clause
    }

    pub fn levels(&self) -> &[(Literal, u32)] {
        &self.levels
    }
}

/// f(Γ, h): Γ plus the two equivalence 2-clauses for every x ∈ [n] and
/// j ∈ [h − 1], declared over h·n variables.
pub fn build_f(formula: &CnfFormula, h: u32) -> Result<CnfFormula, RegularizeError> {
    let scheme = LevelScheme::new(formula.num_vars(), h)?;
    let mut clauses = formula.clauses().to_vec();
    for x in 1..=scheme.n() {
        let x = Variable::new(x);
        for j in 1..h {
            let lo = scheme.var(x, j);
            let hi = scheme.var(x, j + 1);
            clauses.push(Clause::new([lo.negative(), hi.positive()]).expect("distinct vars"));
            clauses.push(Clause::new([lo.positive(), hi.negative()]).expect("distinct vars"));
        }
    }
    Ok(CnfFormula::new(scheme.total_vars(), clauses).expect("ids stay within h·n"))
}

/// g(D) = ⋁_{p ∈ D} W[p, L_D(p)].
pub fn g_map(
    clause: &Clause,
    heights: &[u32],
    scheme: &LevelScheme,
) -> Result<LeveledClause, RegularizeError> {
    let mut levels = Vec::with_capacity(clause.len());
    for &p in clause.literals() {
        let level = heights.get(p.var().index()).copied().unwrap_or(0);
        if level == 0 || level > scheme.h() {
            return Err(RegularizeError::LevelOutOfRange {
                lit: p.to_dimacs(),
                level,
                h: scheme.h(),
            });
        }
        levels.push((p, level));
    }
    LeveledClause::from_levels(levels, scheme)
}

/// E dominates F when both carry the same original literals and each of E's
/// levels is at least F's.
pub fn dominates(e: &LeveledClause, f: &LeveledClause) -> bool {
    e.levels.len() == f.levels.len()
        && e
            .levels
            .iter()
            .zip(&f.levels)
            .all(|(&(p, j), &(q, k))| p == q && j >= k)
}

/// Lazily emitted input nodes for Γ clauses and the equivalence 2-clauses.
struct InputPool {
    nodes: HashMap<Clause, NodeId>,
}

impl InputPool {
    fn get(&mut self, builder: &mut ProofBuilder, clause: Clause) -> NodeId {
        *self
            .nodes
            .entry(clause)
            .or_insert_with_key(|c| builder.input(c.clone()))
    }
}

/// Derives `to` from the node `from` (holding `from_clause`) by resolving
/// with `W[p,m] ∨ ¬W[p,m+1]` for m = j−1 down to k, literal by literal.
/// Appends Σ (j − k) steps and returns the node holding `to`.
fn lower(
    builder: &mut ProofBuilder,
    pool: &mut InputPool,
    scheme: &LevelScheme,
    from: NodeId,
    from_clause: &LeveledClause,
    to: &LeveledClause,
) -> Result<NodeId, RegularizeError> {
    if !dominates(from_clause, to) {
        return Err(RegularizeError::Internal(format!(
            "{} does not dominate {}",
            from_clause.clause(),
            to.clause()
        )));
    }
    let mut current = from;
    for (&(p, j), &(_, k)) in from_clause.levels.iter().zip(&to.levels) {
        for m in (k..j).rev() {
            let bridge = Clause::new([scheme.lit(p, m), !scheme.lit(p, m + 1)])
                .expect("distinct leveled variables");
            let side = pool.get(builder, bridge);
            current = builder
                .resolve(current, side, scheme.var(p.var(), m + 1))
                .map_err(|e| RegularizeError::Internal(e.to_string()))?;
        }
    }
    debug_assert_eq!(builder.clause(current), to.clause());
    Ok(current)
}

/// Public entry to lowering for callers assembling their own proofs: the
/// builder must already hold `from`; 2-clauses are appended as inputs.
pub fn lower_into(
    builder: &mut ProofBuilder,
    scheme: &LevelScheme,
    from: NodeId,
    to: &LeveledClause,
) -> Result<NodeId, RegularizeError> {
    let from_clause = LeveledClause::decode(builder.clause(from).clone(), scheme)?;
    let mut pool = InputPool {
        nodes: HashMap::new(),
    };
    lower(builder, &mut pool, scheme, from, &from_clause, to)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularizeReport {
    /// Variable count of Γ.
    pub n: u32,
    /// Height parameter (height of the pruned input, at least 1).
    pub h: u32,
    /// Size of the pruned input refutation.
    pub s: usize,
    pub input_size: usize,
    pub input_height: u32,
    pub size: usize,
    pub height: u32,
    pub size_bound: u64,
    pub height_bound: u64,
    pub size_within_bound: bool,
    pub height_within_bound: bool,
    pub regular: bool,
    pub level_monotone: bool,
    pub duplicate_clauses: usize,
}

#[derive(Clone, Debug)]
pub struct Regularized {
    pub scheme: LevelScheme,
    pub formula: CnfFormula,
    pub proof: Proof,
    pub report: RegularizeReport,
}

/// Turns a refutation of `formula` into a regular refutation of
/// f(formula, h) with h the height of the pruned input.
///
/// The output is self-checked (verification, regularity, level monotonicity
/// and both size bounds); any failure is an [`RegularizeError::Internal`].
pub fn regularize(formula: &CnfFormula, proof: &Proof) -> Result<Regularized, RegularizeError> {
    let report = verify_proof(formula, proof)?;
    if !report.is_refutation {
        return Err(RegularizeError::NotRefutation);
    }
    let pruned = prune_to_root(proof)?;
    let h = height(&pruned).max(1);
    let scheme = LevelScheme::new(formula.num_vars(), h)?;
    let f = build_f(formula, h)?;
    let table = irregularity_heights(&pruned)?;

    let mut builder = ProofBuilder::new();
    let mut pool = InputPool {
        nodes: HashMap::new(),
    };
    // Γ clauses first so they lead the emitted input block.
    for node in pruned.nodes() {
        if node.kind == NodeKind::Input {
            pool.get(&mut builder, node.clause.clone());
        }
    }

    let mut g_nodes: Vec<(NodeId, LeveledClause)> = Vec::with_capacity(pruned.size());
    for (i, node) in pruned.nodes().iter().enumerate() {
        let row = table.row(node.id).expect("every pruned node has a row");
        let g = g_map(&node.clause, row, &scheme)?;
        let done = match node.kind {
            NodeKind::Input => {
                let top = LeveledClause::from_levels(
                    node.clause.literals().iter().map(|&p| (p, h)),
                    &scheme,
                )?;
                let start = pool.get(&mut builder, node.clause.clone());
                lower(&mut builder, &mut pool, &scheme, start, &top, &g)?
            }
            NodeKind::Resolvent { left, right, pivot } => {
                // λ(p) = L_C(p) + [var(p) = y]
                let lambda = |p: Literal| row[p.var().index()] + u32::from(p.var() == pivot);
                let mut premise_nodes = [NodeId::new(1); 2];
                for (slot, premise) in premise_nodes.iter_mut().zip([left, right]) {
                    let pi = pruned.index_of(premise).expect("premise exists");
                    debug_assert!(pi < i);
                    let (g_node, g_clause) = &g_nodes[pi];
                    let target = LeveledClause::from_levels(
                        pruned.nodes()[pi]
                            .clause
                            .literals()
                            .iter()
                            .map(|&p| (p, lambda(p))),
                        &scheme,
                    )?;
                    *slot = lower(&mut builder, &mut pool, &scheme, *g_node, g_clause, &target)?;
                }
                let level = lambda(pivot.positive());
                let id = builder
                    .resolve(premise_nodes[0], premise_nodes[1], scheme.var(pivot, level))
                    .map_err(|e| RegularizeError::Internal(e.to_string()))?;
                if builder.clause(id) != g.clause() {
                    return Err(RegularizeError::Internal(format!(
                        "node {}: derived {} but g(C) = {}",
                        node.id,
                        builder.clause(id),
                        g.clause()
                    )));
                }
                id
            }
        };
        g_nodes.push((done, g));
    }

    let out = prune_to_root(&builder.finish())?.hoist_inputs();
    let report = self_check(&f, &out, &scheme, &pruned, proof)?;
    Ok(Regularized {
        scheme,
        formula: f,
        proof: out,
        report,
    })
}

fn self_check(
    f: &CnfFormula,
    out: &Proof,
    scheme: &LevelScheme,
    pruned: &Proof,
    original: &Proof,
) -> Result<RegularizeReport, RegularizeError> {
    let verified = verify_proof(f, out)
        .map_err(|e| RegularizeError::Internal(format!("output does not verify: {e}")))?;
    if !verified.is_refutation {
        return Err(RegularizeError::Internal("output has no empty clause".into()));
    }
    let regular = is_regular(out).is_regular();
    let level_monotone = check_level_monotone(out, scheme).is_ok();
    let (n, h, s) = (u64::from(scheme.n().max(1)), u64::from(scheme.h()), pruned.size() as u64);
    let size_bound = 6 * h * n * s;
    let height_bound = h * n;
    let report = RegularizeReport {
        n: scheme.n(),
        h: scheme.h(),
        s: pruned.size(),
        input_size: original.size(),
        input_height: height(original),
        size: verified.size,
        height: verified.height,
        size_bound,
        height_bound,
        size_within_bound: verified.size as u64 <= size_bound,
        height_within_bound: u64::from(verified.height) <= height_bound,
        regular,
        level_monotone,
        duplicate_clauses: verified.duplicate_clauses,
    };
    if !(report.regular && report.level_monotone && report.size_within_bound && report.height_within_bound) {
        return Err(RegularizeError::Internal(format!(
            "output fails a guarantee: {report:?}"
        )));
    }
    Ok(report)
}

/// A pivot on a copy of `var` at `node` whose level does not exceed a later
/// pivot on a copy of the same variable.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("node {node}: pivot on W[x{var}, {level}] is followed by a pivot on x{var} at level {later}")]
pub struct LevelViolation {
    pub node: NodeId,
    pub var: u32,
    pub level: u32,
    pub later: u32,
}

/// Checks that along every path, for each original x, the levels of pivots
/// W[x, ·] strictly decrease. DP over reverse topological order keeping, per
/// node and x, the highest pivot level on x strictly below the node.
pub fn check_level_monotone(proof: &Proof, scheme: &LevelScheme) -> Result<(), LevelViolation> {
    let n = scheme.n() as usize;
    let size = proof.size();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); size];
    let mut pivot: Vec<Option<(usize, u32)>> = vec![None; size];
    for (i, node) in proof.nodes().iter().enumerate() {
        if let NodeKind::Resolvent { left, right, pivot: y } = node.kind {
            let (x, j) = scheme.decode_var(y).expect("pivots are leveled variables");
            pivot[i] = Some((x.index(), j));
            let a = proof.index_of(left).unwrap();
            let b = proof.index_of(right).unwrap();
            children[a].push(i);
            if b != a {
                children[b].push(i);
            }
        }
    }
    let mut below = vec![vec![0u32; n]; size];
    for i in (0..size).rev() {
        let mut acc = vec![0u32; n];
        for &c in &children[i] {
            for (a, &b) in acc.iter_mut().zip(&below[c]) {
                *a = (*a).max(b);
            }
            let (x, j) = pivot[c].unwrap();
            acc[x] = acc[x].max(j);
        }
        if let Some((x, j)) = pivot[i] {
            if acc[x] >= j {
                return Err(LevelViolation {
                    node: proof.nodes()[i].id,
                    var: x as u32 + 1,
                    level: j,
                    later: acc[x],
                });
            }
        }
        below[i] = acc;
    }
    Ok(())
}

/// σ with W[x, j] ↦ x for j < h; original variables are unmapped.
pub fn canonical_sigma(scheme: &LevelScheme) -> Substitution {
    let mut sigma = Substitution::new();
    for x in 1..=scheme.n() {
        let x = Variable::new(x);
        for j in 1..scheme.h() {
            sigma.insert(scheme.var(x, j), SubstValue::Lit(x.positive()));
        }
    }
    sigma
}

/// Irregularity heights of a pruned proof, re-exported for callers that
/// want g(D) for individual nodes.
pub fn g_for_node(
    proof: &Proof,
    table: &IrregularityTable,
    id: NodeId,
    scheme: &LevelScheme,
) -> Result<LeveledClause, RegularizeError> {
    let node = proof
        .node(id)
        .ok_or_else(|| RegularizeError::Internal(format!("no node {id}")))?;
    let row = table
        .row(id)
        .ok_or_else(|| RegularizeError::Internal(format!("no irregularity row for node {id}")))?;
    g_map(&node.clause, row, scheme)
}

impl Regularized {
    pub fn regularity(&self) -> Regularity {
        is_regular(&self.proof)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{ex1, gamma_ex};
    use crate::formula::{apply_substitution, brute_sat, Variable};
    use crate::paths;
    use crate::proof::{irregularity_heights, ProofBuilder};

    fn lit(c: i64) -> Literal {
        Literal::from_dimacs(c).unwrap()
    }

    #[test]
    fn scheme_is_a_bijection() {
        let s = LevelScheme::new(3, 4).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in 1..=3 {
            for j in 1..=4 {
                let v = s.var(Variable::new(x), j);
                assert!(v.id() >= 1 && v.id() <= 12);
                assert!(seen.insert(v));
                assert_eq!(s.decode_var(v), Some((Variable::new(x), j)));
            }
        }
        assert_eq!(s.var(Variable::new(2), 4), Variable::new(2));
        assert_eq!(s.decode_var(Variable::new(13)), None);
        assert_eq!(LevelScheme::new(3, 0), Err(RegularizeError::ZeroHeight));
        assert_eq!(LevelScheme::from_counts(2, 8), Some(LevelScheme::new(2, 4).unwrap()));
        assert_eq!(LevelScheme::from_counts(2, 7), None);
    }

    #[test]
    fn build_f_shapes() {
        assert_eq!(build_f(&gamma_ex(), 1).unwrap(), gamma_ex());
        let f = build_f(&gamma_ex(), 4).unwrap();
        assert_eq!((f.num_vars(), f.len()), (8, 16));
        assert!(build_f(&gamma_ex(), 0).is_err());
        // W[x1,1] = 7, W[x1,2] = 5
        assert!(f.contains(&Clause::from_dimacs(&[-7, 5])));
        assert!(f.contains(&Clause::from_dimacs(&[7, -5])));
    }

    #[test]
    fn build_f_preserves_satisfiability_on_tiny_formulas() {
        for seed in 0..40u64 {
            let n = 1 + (seed % 4) as u32;
            let mut clauses = Vec::new();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            for _ in 0..(2 + seed % 6) {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let v = (state >> 33) as u32 % n + 1;
                let sign = (state >> 20) & 1 == 1;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let w = (state >> 33) as u32 % n + 1;
                let sign2 = (state >> 21) & 1 == 1;
                let lits = [Literal::new(Variable::new(v), sign), Literal::new(Variable::new(w), sign2)];
                if let Ok(c) = Clause::new(lits) {
                    clauses.push(c);
                }
            }
            let g = CnfFormula::new(n, clauses).unwrap();
            for h in 1..=4 {
                let f = build_f(&g, h).unwrap();
                assert_eq!(
                    brute_sat(&g, 20).unwrap().is_sat(),
                    brute_sat(&f, 20).unwrap().is_sat(),
                    "seed {seed} h {h}"
                );
            }
        }
    }

    #[test]
    fn g_of_ex1_nodes() {
        let scheme = LevelScheme::new(2, 4).unwrap();
        let table = irregularity_heights(&ex1()).unwrap();
        let g5 = g_for_node(&ex1(), &table, NodeId::new(5), &scheme).unwrap();
        assert_eq!(g5.clause(), &Clause::from_dimacs(&[6]));
        let g1 = g_for_node(&ex1(), &table, NodeId::new(1), &scheme).unwrap();
        assert_eq!(g1.clause(), &Clause::from_dimacs(&[5, 6]));
        let g8 = g_for_node(&ex1(), &table, NodeId::new(8), &scheme).unwrap();
        assert!(g8.clause().is_empty());
        assert!(matches!(
            g_map(&Clause::from_dimacs(&[1]), &[0, 0], &scheme),
            Err(RegularizeError::LevelOutOfRange { level: 0, .. })
        ));
    }

    #[test]
    fn domination() {
        let s = LevelScheme::new(2, 4).unwrap();
        let mk = |v: &[(i64, u32)]| LeveledClause::from_levels(v.iter().map(|&(p, j)| (lit(p), j)), &s).unwrap();
        let e = mk(&[(1, 4), (2, 4)]);
        assert!(dominates(&e, &e));
        assert!(dominates(&e, &mk(&[(1, 2), (2, 2)])));
        assert!(!dominates(&mk(&[(1, 2)]), &mk(&[(1, 3)])));
        assert!(!dominates(&mk(&[(1, 2)]), &mk(&[(-1, 2)])));
        assert!(!dominates(&e, &mk(&[(1, 2)])));
    }

    #[test]
    fn lowering_step_counts() {
        let s = LevelScheme::new(2, 4).unwrap();
        let mk = |v: &[(i64, u32)]| LeveledClause::from_levels(v.iter().map(|&(p, j)| (lit(p), j)), &s).unwrap();

        let mut b = ProofBuilder::new();
        let start = b.input(Clause::from_dimacs(&[1, 2]));
        let before = b.len();
        let same = lower_into(&mut b, &s, start, &mk(&[(1, 4), (2, 4)])).unwrap();
        assert_eq!((same, b.len()), (start, before));

        let end = lower_into(&mut b, &s, start, &mk(&[(1, 2), (2, 2)])).unwrap();
        assert_eq!(b.clause(end), &Clause::from_dimacs(&[5, 6]));
        let proof = b.finish();
        let resolvents = proof.nodes().iter().filter(|n| n.kind != NodeKind::Input).count();
        assert_eq!(resolvents, 4);
        let f = build_f(&gamma_ex(), 4).unwrap();
        assert!(verify_proof(&f, &proof).is_ok());

        let mut b = ProofBuilder::new();
        let start = b.input(Clause::from_dimacs(&[6]));
        let end = lower_into(&mut b, &s, start, &mk(&[(2, 1)])).unwrap();
        let finished = b.clone().finish();
        let node = &finished.nodes()[end.get() as usize - 1];
        assert_eq!(node.kind.pivot(), Some(Variable::new(6)));
        let (l, r) = node.kind.premises().unwrap();
        let other = if l == start { r } else { l };
        assert_eq!(b.clause(other), &Clause::from_dimacs(&[8, -6]));
        assert_eq!(b.clause(end), &Clause::from_dimacs(&[8]));

        let mut b = ProofBuilder::new();
        let start = b.input(Clause::from_dimacs(&[6]));
        assert!(matches!(
            lower_into(&mut b, &s, start, &mk(&[(2, 3)])),
            Err(RegularizeError::Internal(_))
        ));
    }

    #[test]
    fn unit_refutation_is_unchanged_at_height_one() {
        let f = CnfFormula::new(1, vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])]).unwrap();
        let mut b = ProofBuilder::new();
        let p = b.input(Clause::from_dimacs(&[1]));
        let q = b.input(Clause::from_dimacs(&[-1]));
        b.resolve(p, q, Variable::new(1)).unwrap();
        let out = regularize(&f, &b.finish()).unwrap();
        assert_eq!(out.formula, f);
        assert_eq!(out.report.h, 1);
        assert_eq!(out.proof.size(), 3);
        assert!(out.regularity().is_regular());
    }

    #[test]
    fn ex1_regularized() {
        let out = regularize(&gamma_ex(), &ex1()).unwrap();
        let r = &out.report;
        assert_eq!((r.n, r.h, r.s), (2, 4, 8));
        assert_eq!((r.size_bound, r.height_bound), (384, 8));
        assert!(r.size <= 384 && r.height <= 8);
        assert!(r.regular && r.level_monotone);
        assert!(verify_proof(&out.formula, &out.proof).unwrap().is_refutation);

        // Final inference: {¬W[x2,1]} and {W[x2,1]} on id 8, the latter
        // lowered from g(node 5) = {W[x2,2]}.
        let last = out.proof.nodes().last().unwrap();
        assert!(last.clause.is_empty());
        assert_eq!(last.kind.pivot(), Some(Variable::new(8)));
        let (a, b) = last.kind.premises().unwrap();
        let ca = &out.proof.node(a).unwrap().clause;
        let cb = &out.proof.node(b).unwrap().clause;
        assert_eq!(ca, &Clause::from_dimacs(&[8]));
        assert_eq!(cb, &Clause::from_dimacs(&[-8]));
        let lowered = out.proof.node(a).unwrap();
        assert_eq!(lowered.kind.pivot(), Some(Variable::new(6)));
    }

    #[test]
    fn degenerate_empty_input_clause() {
        let f = CnfFormula::new(2, vec![Clause::from_dimacs(&[1]), Clause::empty()]).unwrap();
        let mut b = ProofBuilder::new();
        b.input(Clause::empty());
        let out = regularize(&f, &b.finish()).unwrap();
        assert_eq!(out.report.h, 1);
        assert_eq!(out.proof.size(), 1);
    }

    #[test]
    fn rejects_non_refutations() {
        let mut b = ProofBuilder::new();
        b.input(Clause::from_dimacs(&[1, 2]));
        assert_eq!(regularize(&gamma_ex(), &b.finish()).unwrap_err(), RegularizeError::NotRefutation);
        let mut b = ProofBuilder::new();
        b.input(Clause::from_dimacs(&[1]));
        assert!(matches!(regularize(&gamma_ex(), &b.finish()), Err(RegularizeError::InvalidInput(_))));
    }

    #[test]
    fn level_monotonicity_matches_path_enumeration_on_ex1_output() {
        let out = regularize(&gamma_ex(), &ex1()).unwrap();
        assert!(check_level_monotone(&out.proof, &out.scheme).is_ok());
        for node in out.proof.nodes().iter().filter(|n| n.kind == NodeKind::Input) {
            for path in paths::maximal_paths_from(&out.proof, node.id) {
                let mut last = [u32::MAX; 2];
                for v in paths::pivots_along(&out.proof, &path) {
                    let (x, j) = out.scheme.decode_var(Variable::new(v)).unwrap();
                    assert!(j < last[x.index()]);
                    last[x.index()] = j;
                }
            }
        }
        // EX1 itself, read at h = 2 over its own ids, is not monotone.
        let s = LevelScheme::new(2, 1).unwrap();
        assert!(check_level_monotone(&ex1(), &s).is_err());
    }

    #[test]
    fn canonical_sigma_cases() {
        assert!(canonical_sigma(&LevelScheme::new(2, 1).unwrap()).is_empty());
        let s = LevelScheme::new(2, 4).unwrap();
        let sigma = canonical_sigma(&s);
        let images: Vec<(u32, i64)> = sigma
            .iter()
            .map(|(v, img)| match img {
                SubstValue::Lit(l) => (v.id(), l.to_dimacs()),
                _ => panic!("renaming only"),
            })
            .collect();
        assert_eq!(images, vec![(3, 1), (4, 2), (5, 1), (6, 2), (7, 1), (8, 2)]);
        let f = build_f(&gamma_ex(), 4).unwrap();
        let back = apply_substitution(&f, &sigma);
        assert!(back.same_clauses(&gamma_ex()));
    }
}
