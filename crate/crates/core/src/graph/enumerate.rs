//! Isomorphism-free enumeration of framed trees.
//!
//! Trees are compared through a canonical code: the AHU encoding rooted at
//! the centroid (minimum over both centroids when the tree is bicentral),
//! with framings embedded in the code. Enumeration grows unframed shapes by
//! leaf attachment with canonical-form rejection, then assigns framings per
//! degree class and deduplicates again.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::PlumbingTree;

/// Canonical code of a framed tree; equal codes mean isomorphic framed trees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub String);

fn rooted_code(adj: &[Vec<usize>], framings: &[i64], v: usize, parent: usize) -> String {
    let mut child_codes: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(adj, framings, w, v))
        .collect();
    child_codes.sort();
    let mut code = format!("({}", framings[v]);
    for c in child_codes {
        code.push_str(&c);
    }
    code.push(')');
    code
}

fn centroids(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 1 {
        return vec![0];
    }
    // prune leaves layer by layer
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut removed = vec![false; n];
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &layer {
            removed[v] = true;
            remaining -= 1;
            for &w in &adj[v] {
                if !removed[w] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    (0..n).filter(|&v| !removed[v]).collect()
}

/// Canonical code of a framed tree up to isomorphism.
pub fn canonical_code(tree: &PlumbingTree) -> CanonicalCode {
    let adj = tree.adjacency();
    let code = centroids(&adj)
        .into_iter()
        .map(|c| rooted_code(&adj, tree.framings(), c, usize::MAX))
        .min()
        .expect("nonempty tree");
    CanonicalCode(code)
}

/// How framings are assigned to a degree class during enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FramingRule {
    /// Any framing from the listed set.
    Set(Vec<i64>),
    /// Framing forced to `-deg(v) - 2`.
    MinusDegMinus2,
}

impl FramingRule {
    fn candidates(&self, degree: usize) -> Vec<i64> {
        match self {
            FramingRule::Set(s) => s.clone(),
            FramingRule::MinusDegMinus2 => vec![-(degree as i64) - 2],
        }
    }
}

/// Constraints for [`enumerate_trees`]. Degree classes: leaves (degree <= 1),
/// chain vertices (degree 2), nodes (degree >= 3).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeConstraints {
    pub max_vertices: usize,
    pub leaf_framings: FramingRule,
    pub chain_framings: FramingRule,
    pub node_framings: FramingRule,
    /// Inclusive bounds on the number of nodes (degree >= 3), if any.
    pub min_nodes: Option<usize>,
    pub max_nodes: Option<usize>,
}

impl TreeConstraints {
    /// Uniform framing set for every degree class.
    pub fn uniform(max_vertices: usize, framings: Vec<i64>) -> Self {
        TreeConstraints {
            max_vertices,
            leaf_framings: FramingRule::Set(framings.clone()),
            chain_framings: FramingRule::Set(framings.clone()),
            node_framings: FramingRule::Set(framings),
            min_nodes: None,
            max_nodes: None,
        }
    }
}

/// Unframed tree shapes on `n` vertices up to isomorphism, as edge lists.
fn shapes(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut current: Vec<Vec<(usize, usize)>> = vec![vec![]]; // the 1-vertex tree
    let mut size = 1;
    while size < n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for shape in &current {
            for v in 0..size {
                let mut edges = shape.clone();
                edges.push((v, size));
                let code = shape_code(size + 1, &edges);
                if seen.insert(code) {
                    next.push(edges);
                }
            }
        }
        current = next;
        size += 1;
    }
    current
}

fn shape_code(n: usize, edges: &[(usize, usize)]) -> String {
    let vertices: Vec<(String, i64)> = (0..n).map(|v| (format!("t{v}"), 0)).collect();
    let named: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (format!("t{a}"), format!("t{b}")))
        .collect();
    let tree = PlumbingTree::new(vertices, named).expect("shape is a tree");
    canonical_code(&tree).0
}

/// Every framed tree satisfying the constraints, exactly once up to
/// isomorphism, in a deterministic canonical order (by size, then code).
pub fn enumerate_trees(constraints: &TreeConstraints) -> Vec<PlumbingTree> {
    let mut out: Vec<(usize, CanonicalCode, PlumbingTree)> = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 1..=constraints.max_vertices {
        for shape in shapes(n) {
            let mut degree = vec![0usize; n];
            for &(a, b) in &shape {
                degree[a] += 1;
                degree[b] += 1;
            }
            let nodes = degree.iter().filter(|&&d| d >= 3).count();
            if let Some(min) = constraints.min_nodes {
                if nodes < min {
                    continue;
                }
            }
            if let Some(max) = constraints.max_nodes {
                if nodes > max {
                    continue;
                }
            }
            let candidates: Vec<Vec<i64>> = (0..n)
                .map(|v| {
                    let rule = match degree[v] {
                        0 | 1 => &constraints.leaf_framings,
                        2 => &constraints.chain_framings,
                        _ => &constraints.node_framings,
                    };
                    rule.candidates(degree[v])
                })
                .collect();
            if candidates.iter().any(|c| c.is_empty()) {
                continue;
            }
            // cartesian product over per-vertex candidate framings
            let mut choice = vec![0usize; n];
            'outer: loop {
                let vertices: Vec<(String, i64)> = (0..n)
                    .map(|v| (format!("t{v}"), candidates[v][choice[v]]))
                    .collect();
                let edges: Vec<(String, String)> = shape
                    .iter()
                    .map(|&(a, b)| (format!("t{a}"), format!("t{b}")))
                    .collect();
                let tree = PlumbingTree::new(vertices, edges).expect("shape is a tree");
                let code = canonical_code(&tree);
                if seen.insert(code.clone()) {
                    out.push((n, code, tree));
                }
                // advance the mixed-radix counter
                for v in 0..=n {
                    if v == n {
                        break 'outer;
                    }
                    choice[v] += 1;
                    if choice[v] < candidates[v].len() {
                        break;
                    }
                    choice[v] = 0;
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    out.into_iter().map(|(_, _, t)| t).collect()
}
