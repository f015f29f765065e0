//! Resolution proofs as DAGs in topological order.
//!
//! A [`Proof`] is a list of nodes with strictly ascending ids. Input nodes have
//! no premises; resolvent nodes name two earlier premises and the pivot.
//! Structural invariants (ascending ids, premises earlier) are enforced on
//! construction; logical ones (inputs belong to the formula, each resolvent
//! is correct) are checked by [`verify_proof`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Clause, CnfFormula, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(id: u32) -> NodeId {
        assert!(id >= 1, "node ids are positive");
        NodeId(id)
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Input,
    /// Premises in either order; after [`Proof::normalize`] `left` holds the
    /// pivot positively.
    Resolvent {
        left: NodeId,
        right: NodeId,
        pivot: Variable,
    },
}

impl NodeKind {
    pub fn premises(&self) -> Option<(NodeId, NodeId)> {
        match *self {
            NodeKind::Input => None,
            NodeKind::Resolvent { left, right, .. } => Some((left, right)),
        }
    }

    pub fn pivot(&self) -> Option<Variable> {
        match *self {
            NodeKind::Input => None,
            NodeKind::Resolvent { pivot, .. } => Some(pivot),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub id: NodeId,
    pub clause: Clause,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("node {node}: {kind}")]
pub struct VerifyError {
    pub node: u32,
    pub kind: VerifyErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyErrorKind {
    #[error("id is not greater than the previous id")]
    NonAscendingId,
    #[error("premise {0} does not exist")]
    UnknownPremise(u32),
    #[error("premise {0} does not precede this node")]
    PremiseNotEarlier(u32),
    #[error("input clause {0} does not occur in the formula")]
    InputNotInFormula(Clause),
    #[error("pivot {0} does not occur with opposite signs in the premises")]
    PivotPolarity(Variable),
    #[error("premises resolve to a tautology")]
    TautologicalResolvent,
    #[error("stated clause {stated} differs from the resolvent {computed}")]
    ResolventMismatch { stated: Clause, computed: Clause },
}

impl VerifyError {
    fn new(node: NodeId, kind: VerifyErrorKind) -> VerifyError {
        VerifyError { node: node.0, kind }
    }
}

/// A resolution derivation in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    nodes: Vec<ProofNode>,
}

impl Proof {
    /// Checks ascending ids and that every premise names an earlier node.
    pub fn new(nodes: Vec<ProofNode>) -> Result<Proof, VerifyError> {
        let mut seen = HashSet::with_capacity(nodes.len());
        let mut last = 0;
        for node in &nodes {
            if node.id.0 <= last {
                return Err(VerifyError::new(node.id, VerifyErrorKind::NonAscendingId));
            }
            last = node.id.0;
            if let Some((a, b)) = node.kind.premises() {
                for p in [a, b] {
                    if p >= node.id {
                        return Err(VerifyError::new(
                            node.id,
                            VerifyErrorKind::PremiseNotEarlier(p.0),
                        ));
                    }
                    if !seen.contains(&p) {
                        return Err(VerifyError::new(
                            node.id,
                            VerifyErrorKind::UnknownPremise(p.0),
                        ));
                    }
                }
            }
            seen.insert(node.id);
        }
        Ok(Proof { nodes })
    }

    pub fn nodes(&self) -> &[ProofNode] {
        &self.nodes
    }

    /// Number of clauses in the derivation.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok()
    }

    pub fn node(&self, id: NodeId) -> Option<&ProofNode> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    fn idx(&self, id: NodeId) -> usize {
        self.index_of(id).expect("premise ids are validated on construction")
    }

    /// Premise indices of each node.
    fn premise_indices(&self) -> Vec<Option<(usize, usize)>> {
        self.nodes
            .iter()
            .map(|n| n.kind.premises().map(|(a, b)| (self.idx(a), self.idx(b))))
            .collect()
    }

    /// For each node, the indices of the nodes that use it as a premise.
    fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.nodes.len()];
        for (i, p) in self.premise_indices().into_iter().enumerate() {
            if let Some((a, b)) = p {
                children[a].push(i);
                if b != a {
                    children[b].push(i);
                }
            }
        }
        children
    }

    /// The first node whose clause is ⊥.
    pub fn root(&self) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.clause.is_empty()).map(|n| n.id)
    }

    pub fn is_refutation(&self) -> bool {
        self.root().is_some()
    }

    /// Largest variable id mentioned by any clause or pivot.
    pub fn max_var(&self) -> u32 {
        self.nodes
            .iter()
            .map(|n| {
                let c = n.clause.max_var().map_or(0, |v| v.id());
                let p = n.kind.pivot().map_or(0, |v| v.id());
                c.max(p)
            })
            .max()
            .unwrap_or(0)
    }

    /// Reorders every resolvent's premises so that `left` holds the pivot
    /// positively. Premises that fit neither order are left untouched.
    pub fn normalize(&mut self) {
        for i in 0..self.nodes.len() {
            if let NodeKind::Resolvent { left, right, pivot } = self.nodes[i].kind {
                let l = &self.nodes[self.idx(left)].clause;
                if !l.contains(pivot.positive()) && l.contains(pivot.negative()) {
                    self.nodes[i].kind = NodeKind::Resolvent {
                        left: right,
                        right: left,
                        pivot,
                    };
                }
            }
        }
    }

    /// Moves all input nodes to the front (in order of appearance) and
    /// renumbers densely from 1. Resolvents keep their relative order.
    pub fn hoist_inputs(&self) -> Proof {
        let order: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind == NodeKind::Input)
            .chain((0..self.nodes.len()).filter(|&i| self.nodes[i].kind != NodeKind::Input))
            .collect();
        self.renumber(&order)
    }

    /// Keeps the nodes at `order` (which must be topologically consistent),
    /// renumbering them 1, 2, ….
    fn renumber(&self, order: &[usize]) -> Proof {
        let mut new_id = HashMap::with_capacity(order.len());
        let mut nodes = Vec::with_capacity(order.len());
        for (k, &i) in order.iter().enumerate() {
            let old = &self.nodes[i];
            let id = NodeId(k as u32 + 1);
            new_id.insert(old.id, id);
            let kind = match old.kind {
                NodeKind::Input => NodeKind::Input,
                NodeKind::Resolvent { left, right, pivot } => NodeKind::Resolvent {
                    left: new_id[&left],
                    right: new_id[&right],
                    pivot,
                },
            };
            nodes.push(ProofNode {
                id,
                clause: old.clause.clone(),
                kind,
            });
        }
        Proof { nodes }
    }

    /// Number of nodes whose clause already appeared at an earlier node.
    pub fn duplicate_clauses(&self) -> usize {
        let mut seen = HashSet::new();
        self.nodes.iter().filter(|n| !seen.insert(&n.clause)).count()
    }
}

/// Incrementally builds a proof with dense ids 1, 2, ….
#[derive(Clone, Debug, Default)]
pub struct ProofBuilder {
    nodes: Vec<ProofNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot resolve {left} and {right} on {pivot}")]
pub struct ResolveError {
    pub left: Clause,
    pub right: Clause,
    pub pivot: Variable,
}

impl ProofBuilder {
    pub fn new() -> ProofBuilder {
        ProofBuilder::default()
    }

    fn next_id(&self) -> NodeId {
        NodeId(self.nodes.len() as u32 + 1)
    }

    pub fn input(&mut self, clause: Clause) -> NodeId {
        let id = self.next_id();
        self.nodes.push(ProofNode {
            id,
            clause,
            kind: NodeKind::Input,
        });
        id
    }

    pub fn clause(&self, id: NodeId) -> &Clause {
        &self.nodes[id.0 as usize - 1].clause
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Resolves two existing nodes on `pivot`, in whichever order fits.
    pub fn resolve(&mut self, a: NodeId, b: NodeId, pivot: Variable) -> Result<NodeId, ResolveError> {
        let (ca, cb) = (self.clause(a), self.clause(b));
        let (left, right) = if ca.contains(pivot.positive()) { (a, b) } else { (b, a) };
        let (cl, cr) = (self.clause(left), self.clause(right));
        let clause = cl.resolve(cr, pivot).ok_or_else(|| ResolveError {
            left: ca.clone(),
            right: cb.clone(),
            pivot,
        })?;
        let id = self.next_id();
        self.nodes.push(ProofNode {
            id,
            clause,
            kind: NodeKind::Resolvent { left, right, pivot },
        });
        Ok(id)
    }

    pub fn finish(self) -> Proof {
        Proof { nodes: self.nodes }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub size: usize,
    pub height: u32,
    pub is_refutation: bool,
    pub root: Option<NodeId>,
    /// Nodes repeating an earlier node's clause.
    pub duplicate_clauses: usize,
}

/// Checks every node of `proof` against `formula` and the resolution rule.
/// Premises may appear in either order.
pub fn verify_proof(formula: &CnfFormula, proof: &Proof) -> Result<VerificationReport, VerifyError> {
    let inputs = formula.clause_set();
    for node in proof.nodes() {
        match node.kind {
            NodeKind::Input => {
                if !inputs.contains(&node.clause) {
                    return Err(VerifyError::new(
                        node.id,
                        VerifyErrorKind::InputNotInFormula(node.clause.clone()),
                    ));
                }
            }
            NodeKind::Resolvent { left, right, pivot } => {
                let a = &proof.nodes[proof.idx(left)].clause;
                let b = &proof.nodes[proof.idx(right)].clause;
                let (pos, neg) = if a.contains(pivot.positive()) && b.contains(pivot.negative()) {
                    (a, b)
                } else if b.contains(pivot.positive()) && a.contains(pivot.negative()) {
                    (b, a)
                } else {
                    return Err(VerifyError::new(node.id, VerifyErrorKind::PivotPolarity(pivot)));
                };
                let computed = pos
                    .resolve(neg, pivot)
                    .ok_or_else(|| VerifyError::new(node.id, VerifyErrorKind::TautologicalResolvent))?;
                if computed != node.clause {
                    return Err(VerifyError::new(
                        node.id,
                        VerifyErrorKind::ResolventMismatch {
                            stated: node.clause.clone(),
                            computed,
                        },
                    ));
                }
            }
        }
    }
    Ok(VerificationReport {
        size: proof.size(),
        height: height(proof),
        is_refutation: proof.is_refutation(),
        root: proof.root(),
        duplicate_clauses: proof.duplicate_clauses(),
    })
}

/// Edge count of the longest directed path.
pub fn height(proof: &Proof) -> u32 {
    let premises = proof.premise_indices();
    let mut depth = vec![0u32; proof.size()];
    for (i, p) in premises.iter().enumerate() {
        if let Some((a, b)) = *p {
            depth[i] = depth[a].max(depth[b]) + 1;
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

/// Outcome of [`is_regular`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    /// `path` runs from an input to a sink and contains two inferences
    /// resolving on `var`.
    Irregular { var: u32, path: Vec<NodeId> },
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular)
    }
}

/// Fixed-width variable bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
struct VarSet(Vec<u64>);

impl VarSet {
    fn new(max_var: u32) -> VarSet {
        VarSet(vec![0; max_var as usize / 64 + 1])
    }

    fn insert(&mut self, v: Variable) {
        self.0[v.id() as usize / 64] |= 1 << (v.id() % 64);
    }

    fn contains(&self, v: Variable) -> bool {
        self.0[v.id() as usize / 64] & (1 << (v.id() % 64)) != 0
    }

    fn union_with(&mut self, other: &VarSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

/// Decides whether any directed path resolves on the same variable twice.
///
/// For each node the set of pivots used strictly below it is accumulated in
/// reverse topological order; an inference whose own pivot reappears below
/// it is a violation, and a witness path is traced through it.
pub fn is_regular(proof: &Proof) -> Regularity {
    let n = proof.size();
    let max_var = proof.max_var();
    let children = proof.children();
    let pivots: Vec<Option<Variable>> = proof.nodes.iter().map(|n| n.kind.pivot()).collect();
    let mut below: Vec<VarSet> = vec![VarSet::new(max_var); n];
    for i in (0..n).rev() {
        let mut acc = VarSet::new(max_var);
        for &c in &children[i] {
            acc.union_with(&below[c]);
            acc.insert(pivots[c].expect("children are resolvents"));
        }
        below[i] = acc;
    }
    let Some(first) = (0..n).find(|&i| pivots[i].is_some_and(|y| below[i].contains(y))) else {
        return Regularity::Regular;
    };
    let var = pivots[first].unwrap();
    let premises = proof.premise_indices();

    // Climb to an input through left premises.
    let mut up = Vec::new();
    let mut cur = first;
    while let Some((a, _)) = premises[cur] {
        up.push(a);
        cur = a;
    }
    up.reverse();
    let mut path = up;
    path.push(first);

    // Descend to the second inference on `var`, then to any sink.
    let mut cur = first;
    loop {
        let next = children[cur]
            .iter()
            .copied()
            .find(|&c| pivots[c] == Some(var) || below[c].contains(var))
            .expect("`var` occurs below the current node");
        path.push(next);
        cur = next;
        if pivots[next] == Some(var) {
            break;
        }
    }
    while let Some(&c) = children[cur].first() {
        path.push(c);
        cur = c;
    }
    Regularity::Irregular {
        var: var.id(),
        path: path.into_iter().map(|i| proof.nodes[i].id).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PruneError {
    #[error("proof contains no empty clause")]
    NoRefutation,
    #[error("node {0} has no path to the empty clause; prune the proof first")]
    NotPruned(u32),
}

/// Keeps only the nodes with a directed path to the first ⊥ node, renumbered
/// 1, 2, … in topological order.
pub fn prune_to_root(proof: &Proof) -> Result<Proof, PruneError> {
    let root = proof.root().ok_or(PruneError::NoRefutation)?;
    let root_idx = proof.idx(root);
    let premises = proof.premise_indices();
    let mut keep = vec![false; proof.size()];
    keep[root_idx] = true;
    for i in (0..=root_idx).rev() {
        if keep[i] {
            if let Some((a, b)) = premises[i] {
                keep[a] = true;
                keep[b] = true;
            }
        }
    }
    let order: Vec<usize> = (0..proof.size()).filter(|&i| keep[i]).collect();
    Ok(proof.renumber(&order))
}

/// Checks that the proof's only sink is its ⊥ node.
fn check_pruned(proof: &Proof) -> Result<usize, PruneError> {
    let root = proof.root().ok_or(PruneError::NoRefutation)?;
    let root_idx = proof.idx(root);
    let children = proof.children();
    for (i, ch) in children.iter().enumerate() {
        if i != root_idx && ch.is_empty() {
            return Err(PruneError::NotPruned(proof.nodes[i].id.0));
        }
    }
    Ok(root_idx)
}

/// L_D(x) for every node D and variable x: the largest number of inferences
/// on x along any path from D to ⊥.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularityTable {
    num_vars: u32,
    ids: Vec<NodeId>,
    rows: Vec<Vec<u32>>,
}

impl IrregularityTable {
    /// The row for node `id`, indexed by variable id − 1.
    pub fn row(&self, id: NodeId) -> Option<&[u32]> {
        let i = self.ids.binary_search(&id).ok()?;
        Some(&self.rows[i])
    }

    pub fn get(&self, id: NodeId, var: Variable) -> u32 {
        self.row(id)
            .and_then(|r| r.get(var.index()).copied())
            .unwrap_or(0)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn max_at(&self, id: NodeId) -> u32 {
        self.row(id)
            .map(|r| r.iter().copied().max().unwrap_or(0))
            .unwrap_or(0)
    }
}

/// Reverse-topological DP: L_⊥ = 0 and L_D(x) = max over children C of
/// L_C(x) + [x is C's pivot]. Requires a pruned refutation.
pub fn irregularity_heights(proof: &Proof) -> Result<IrregularityTable, PruneError> {
    check_pruned(proof)?;
    let num_vars = proof.max_var();
    let children = proof.children();
    let n = proof.size();
    let mut rows = vec![vec![0u32; num_vars as usize]; n];
    for i in (0..n).rev() {
        let mut row = vec![0u32; num_vars as usize];
        for &c in &children[i] {
            let pivot = proof.nodes[c].kind.pivot().expect("children are resolvents");
            for (x, slot) in row.iter_mut().enumerate() {
                let via = rows[c][x] + u32::from(x == pivot.index());
                *slot = (*slot).max(via);
            }
        }
        rows[i] = row;
    }
    Ok(IrregularityTable {
        num_vars,
        ids: proof.nodes.iter().map(|n| n.id).collect(),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DedupMode {
    /// Merge nodes with identical clause and identical premise set.
    SameDerivation,
    /// Merge every node into the first node carrying the same clause.
    SameClause,
}

/// Merges duplicate nodes, redirecting later references to the surviving
/// node, and renumbers densely.
pub fn merge_duplicates(proof: &Proof, mode: DedupMode) -> Proof {
    let mut builder_nodes: Vec<ProofNode> = Vec::with_capacity(proof.size());
    let mut redirect: HashMap<NodeId, NodeId> = HashMap::new();
    let mut by_clause: HashMap<Clause, NodeId> = HashMap::new();
    let mut by_derivation: HashMap<(Clause, Option<(NodeId, NodeId)>), NodeId> = HashMap::new();
    for node in proof.nodes() {
        let kind = match node.kind {
            NodeKind::Input => NodeKind::Input,
            NodeKind::Resolvent { left, right, pivot } => NodeKind::Resolvent {
                left: redirect[&left],
                right: redirect[&right],
                pivot,
            },
        };
        let existing = match mode {
            DedupMode::SameClause => by_clause.get(&node.clause).copied(),
            DedupMode::SameDerivation => {
                let key = (node.clause.clone(), kind.premises().map(|(a, b)| (a.min(b), a.max(b))));
                by_derivation.get(&key).copied()
            }
        };
        if let Some(target) = existing {
            redirect.insert(node.id, target);
            continue;
        }
        let id = NodeId(builder_nodes.len() as u32 + 1);
        redirect.insert(node.id, id);
        match mode {
            DedupMode::SameClause => {
                by_clause.insert(node.clause.clone(), id);
            }
            DedupMode::SameDerivation => {
                let key = (node.clause.clone(), kind.premises().map(|(a, b)| (a.min(b), a.max(b))));
                by_derivation.insert(key, id);
            }
        }
        builder_nodes.push(ProofNode {
            id,
            clause: node.clause.clone(),
            kind,
        });
    }
    Proof { nodes: builder_nodes }
}

/// Summary used by the `stats` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofStats {
    pub size: usize,
    pub height: u32,
    pub regularity: Regularity,
    pub duplicate_clauses: usize,
    /// For each input node of the pruned proof: (id, max over x of L_D(x)).
    pub input_irregularity: Vec<(NodeId, u32)>,
}

/// Statistics of `proof` as given, plus irregularity heights of its pruned
/// form (ids in `input_irregularity` refer to the pruned numbering).
pub fn proof_stats(proof: &Proof) -> Result<ProofStats, PruneError> {
    let pruned = prune_to_root(proof)?;
    let table = irregularity_heights(&pruned)?;
    let input_irregularity = pruned
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Input)
        .map(|n| (n.id, table.max_at(n.id)))
        .collect();
    Ok(ProofStats {
        size: proof.size(),
        height: height(proof),
        regularity: is_regular(proof),
        duplicate_clauses: proof.duplicate_clauses(),
        input_irregularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{ex1, gamma_ex};
    use crate::paths;

    fn unit_refutation() -> (CnfFormula, Proof) {
        let f = CnfFormula::new(1, vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])]).unwrap();
        let mut b = ProofBuilder::new();
        let p = b.input(Clause::from_dimacs(&[1]));
        let q = b.input(Clause::from_dimacs(&[-1]));
        b.resolve(p, q, Variable::new(1)).unwrap();
        (f, b.finish())
    }

    #[test]
    fn unit_refutation_report() {
        let (f, p) = unit_refutation();
        let r = verify_proof(&f, &p).unwrap();
        assert_eq!((r.size, r.height, r.is_refutation), (3, 1, true));
        assert!(is_regular(&p).is_regular());
    }

    #[test]
    fn ex1_report_and_height() {
        let r = verify_proof(&gamma_ex(), &ex1()).unwrap();
        assert_eq!((r.size, r.height, r.is_refutation), (8, 4, true));
        assert_eq!(r.root, Some(NodeId(8)));
        assert_eq!(r.duplicate_clauses, 0);
    }

    #[test]
    fn swapped_premises_still_verify() {
        let mut nodes = ex1().nodes().to_vec();
        if let NodeKind::Resolvent { left, right, pivot } = nodes[5].kind {
            nodes[5].kind = NodeKind::Resolvent { left: right, right: left, pivot };
        }
        let swapped = Proof::new(nodes).unwrap();
        assert!(verify_proof(&gamma_ex(), &swapped).is_ok());
        let mut normalized = swapped.clone();
        normalized.normalize();
        assert_eq!(normalized, ex1());
    }

    #[test]
    fn verify_locates_errors() {
        let mut nodes = ex1().nodes().to_vec();
        nodes[5].clause = Clause::from_dimacs(&[-1]);
        let broken = Proof::new(nodes).unwrap();
        let err = verify_proof(&gamma_ex(), &broken).unwrap_err();
        assert_eq!(err.node, 6);
        assert!(matches!(err.kind, VerifyErrorKind::ResolventMismatch { .. }));

        let mut nodes = ex1().nodes().to_vec();
        nodes[0].clause = Clause::from_dimacs(&[1]);
        let err = verify_proof(&gamma_ex(), &Proof::new(nodes).unwrap()).unwrap_err();
        assert_eq!(err.node, 1);
        assert!(matches!(err.kind, VerifyErrorKind::InputNotInFormula(_)));

        let mut nodes = ex1().nodes().to_vec();
        nodes[4].kind = NodeKind::Resolvent {
            left: NodeId(1),
            right: NodeId(2),
            pivot: Variable::new(2),
        };
        let err = verify_proof(&gamma_ex(), &Proof::new(nodes).unwrap()).unwrap_err();
        assert_eq!(err.kind, VerifyErrorKind::PivotPolarity(Variable::new(2)));
    }

    #[test]
    fn structural_errors() {
        let mut nodes = ex1().nodes().to_vec();
        nodes.swap(0, 1);
        assert_eq!(Proof::new(nodes).unwrap_err().kind, VerifyErrorKind::NonAscendingId);
        let mut nodes = ex1().nodes().to_vec();
        nodes[4].kind = NodeKind::Resolvent {
            left: NodeId(5),
            right: NodeId(2),
            pivot: Variable::new(1),
        };
        assert_eq!(Proof::new(nodes).unwrap_err().kind, VerifyErrorKind::PremiseNotEarlier(5));
        let nodes = vec![ProofNode {
            id: NodeId(3),
            clause: Clause::empty(),
            kind: NodeKind::Resolvent {
                left: NodeId(1),
                right: NodeId(2),
                pivot: Variable::new(1),
            },
        }];
        assert_eq!(Proof::new(nodes).unwrap_err().kind, VerifyErrorKind::UnknownPremise(1));
    }

    #[test]
    fn height_of_input_only_derivation_is_zero() {
        let mut b = ProofBuilder::new();
        b.input(Clause::from_dimacs(&[1]));
        b.input(Clause::from_dimacs(&[2]));
        assert_eq!(height(&b.finish()), 0);
    }

    #[test]
    fn ex1_irregular_witness() {
        match is_regular(&ex1()) {
            Regularity::Irregular { var, path } => {
                assert_eq!(var, 1);
                assert_eq!(path, [1, 5, 6, 7, 8].map(NodeId).to_vec());
            }
            Regularity::Regular => panic!("EX1 resolves x1 twice"),
        }
    }

    #[test]
    fn ex1_irregularity_table() {
        let t = irregularity_heights(&ex1()).unwrap();
        let (x1, x2) = (Variable::new(1), Variable::new(2));
        assert_eq!((t.get(NodeId(5), x2), t.get(NodeId(5), x1)), (2, 1));
        assert_eq!((t.get(NodeId(7), x2), t.get(NodeId(7), x1)), (1, 0));
        assert_eq!((t.get(NodeId(1), x1), t.get(NodeId(1), x2)), (2, 2));
        assert_eq!(t.row(NodeId(8)).unwrap(), &[0, 0]);
        let oracle = paths::irregularity_by_paths(&ex1());
        for node in ex1().nodes() {
            assert_eq!(t.row(node.id).unwrap(), oracle[&node.id].as_slice());
        }
    }

    #[test]
    fn prune_drops_dead_nodes() {
        let mut nodes = ex1().nodes().to_vec();
        nodes.insert(
            5,
            ProofNode {
                id: NodeId(6),
                clause: Clause::from_dimacs(&[-2]),
                kind: NodeKind::Resolvent {
                    left: NodeId(3),
                    right: NodeId(4),
                    pivot: Variable::new(1),
                },
            },
        );
        for (k, n) in nodes.iter_mut().enumerate().skip(6) {
            n.id = NodeId(k as u32 + 1);
            if let NodeKind::Resolvent { left, right, pivot } = n.kind {
                let bump = |x: NodeId| if x.0 >= 6 { NodeId(x.0 + 1) } else { x };
                n.kind = NodeKind::Resolvent { left: bump(left), right: bump(right), pivot };
            }
        }
        let with_dead = Proof::new(nodes).unwrap();
        assert!(verify_proof(&gamma_ex(), &with_dead).is_ok());
        assert_eq!(with_dead.size(), 9);
        assert_eq!(prune_to_root(&with_dead).unwrap(), ex1());
        assert_eq!(prune_to_root(&ex1()).unwrap(), ex1());
        assert!(matches!(irregularity_heights(&with_dead), Err(PruneError::NotPruned(6))));
    }

    #[test]
    fn prune_drops_unused_input() {
        let mut b = ProofBuilder::new();
        b.input(Clause::from_dimacs(&[2]));
        let p = b.input(Clause::from_dimacs(&[1]));
        let q = b.input(Clause::from_dimacs(&[-1]));
        b.resolve(p, q, Variable::new(1)).unwrap();
        let pruned = prune_to_root(&b.finish()).unwrap();
        assert_eq!(pruned.size(), 3);
        assert_eq!(pruned, unit_refutation().1);
    }

    #[test]
    fn prune_requires_refutation() {
        let mut b = ProofBuilder::new();
        b.input(Clause::from_dimacs(&[1]));
        assert_eq!(prune_to_root(&b.finish()), Err(PruneError::NoRefutation));
    }

    #[test]
    fn merge_duplicates_modes() {
        let mut b = ProofBuilder::new();
        let p = b.input(Clause::from_dimacs(&[1]));
        let q = b.input(Clause::from_dimacs(&[-1]));
        let p2 = b.input(Clause::from_dimacs(&[1]));
        b.resolve(p, q, Variable::new(1)).unwrap();
        b.resolve(p2, q, Variable::new(1)).unwrap();
        let proof = b.finish();
        assert_eq!(proof.duplicate_clauses(), 2);
        let by_clause = merge_duplicates(&proof, DedupMode::SameClause);
        assert_eq!(by_clause.size(), 3);
        let by_derivation = merge_duplicates(&proof, DedupMode::SameDerivation);
        // p and p2 are both inputs with the same clause, so they merge, and
        // then the two resolvents share premises.
        assert_eq!(by_derivation.size(), 3);
    }

    #[test]
    fn hoist_inputs_keeps_validity() {
        let mut b = ProofBuilder::new();
        let p = b.input(Clause::from_dimacs(&[1, 2]));
        let q = b.input(Clause::from_dimacs(&[-1, 2]));
        let r = b.resolve(p, q, Variable::new(1)).unwrap();
        let s = b.input(Clause::from_dimacs(&[-2]));
        b.resolve(r, s, Variable::new(2)).unwrap();
        let proof = b.finish().hoist_inputs();
        let f = CnfFormula::new(
            2,
            vec![
                Clause::from_dimacs(&[1, 2]),
                Clause::from_dimacs(&[-1, 2]),
                Clause::from_dimacs(&[-2]),
            ],
        )
        .unwrap();
        assert!(verify_proof(&f, &proof).unwrap().is_refutation);
        assert!(proof.nodes()[..3].iter().all(|n| n.kind == NodeKind::Input));
    }

    #[test]
    fn stats_of_ex1() {
        let s = proof_stats(&ex1()).unwrap();
        assert_eq!((s.size, s.height, s.duplicate_clauses), (8, 4, 0));
        assert!(!s.regularity.is_regular());
        assert_eq!(
            s.input_irregularity,
            vec![(NodeId(1), 2), (NodeId(2), 2), (NodeId(3), 2), (NodeId(4), 1)]
        );
    }
}
