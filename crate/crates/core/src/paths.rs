//! Brute-force reference computations by explicit path enumeration.
//!
//! These walk every directed path and are exponential in the worst case.
//! They exist to cross-check the dynamic programs in [`crate::proof`] and
//! [`crate::regularize`] on small proofs and share no code with them.

use std::collections::HashMap;

use crate::proof::{NodeId, NodeKind, Proof};

fn child_map(proof: &Proof) -> HashMap<NodeId, Vec<NodeId>> {
    let mut children: HashMap<NodeId, Vec<NodeId>> =
        proof.nodes().iter().map(|n| (n.id, Vec::new())).collect();
    for n in proof.nodes() {
        if let NodeKind::Resolvent { left, right, .. } = n.kind {
            children.get_mut(&left).unwrap().push(n.id);
            if right != left {
                children.get_mut(&right).unwrap().push(n.id);
            }
        }
    }
    children
}

/// Every maximal directed path (ending at a node without children) starting
/// at `start`, as node id sequences.
pub fn maximal_paths_from(proof: &Proof, start: NodeId) -> Vec<Vec<NodeId>> {
    let children = child_map(proof);
    let mut out = Vec::new();
    let mut stack = vec![vec![start]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        let next = &children[&last];
        if next.is_empty() {
            out.push(path);
        } else {
            for &c in next {
                let mut p = path.clone();
                p.push(c);
                stack.push(p);
            }
        }
    }
    out
}

/// Pivot sequence along a path (one entry per edge).
pub fn pivots_along(proof: &Proof, path: &[NodeId]) -> Vec<u32> {
    path[1..]
        .iter()
        .map(|&id| {
            proof
                .node(id)
                .and_then(|n| n.kind.pivot())
                .expect("path targets are resolvents")
                .id()
        })
        .collect()
}

/// L_D(x) per node by enumerating every path from D to a sink. Rows are
/// indexed by variable id − 1 and sized to the largest variable.
pub fn irregularity_by_paths(proof: &Proof) -> HashMap<NodeId, Vec<u32>> {
    let max_var = proof.max_var() as usize;
    proof
        .nodes()
        .iter()
        .map(|n| {
            let mut row = vec![0u32; max_var];
            for path in maximal_paths_from(proof, n.id) {
                let mut counts = vec![0u32; max_var];
                for v in pivots_along(proof, &path) {
                    counts[v as usize - 1] += 1;
                }
                for (r, c) in row.iter_mut().zip(counts) {
                    *r = (*r).max(c);
                }
            }
            (n.id, row)
        })
        .collect()
}

/// True iff no path from any source repeats a pivot.
pub fn regular_by_paths(proof: &Proof) -> bool {
    proof
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Input)
        .all(|n| {
            maximal_paths_from(proof, n.id).iter().all(|p| {
                let mut pivots = pivots_along(proof, p);
                let len = pivots.len();
                pivots.sort_unstable();
                pivots.dedup();
                pivots.len() == len
            })
        })
}

/// Longest path edge count by enumeration.
pub fn height_by_paths(proof: &Proof) -> u32 {
    proof
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Input)
        .flat_map(|n| maximal_paths_from(proof, n.id))
        .map(|p| p.len() as u32 - 1)
        .max()
        .unwrap_or(0)
}
