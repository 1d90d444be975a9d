//! Blowup clusters: sequences of infinitely-near points with proximity
//! relations, the Noether multiplicity engine, and the correspondence with
//! presentation graphs via blowdown.
//!
//! A cluster point is proximate to the point whose first neighbourhood it
//! lies in (its parent, the latest proximity target) and possibly one more
//! earlier point (a satellite). A curvetta branch attached at a terminal
//! point passes through the parent chain of that point; its multiplicity at
//! each chain point follows the downward proximity recursion, and pairwise
//! intersections are the Noether sums `Σ_v m_v(i) m_v(j)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{PlumbingTree, VertexId};
use crate::sandwich::BranchKind;
use crate::{Error, Result};

/// One infinitely-near point: its proximity targets are earlier points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPoint {
    pub label: String,
    /// Sorted indices of earlier points this one is proximate to:
    /// empty for the origin, one entry for a free point, two for a satellite.
    pub proximities: Vec<usize>,
}

/// A curvetta attachment: curve index -> terminal cluster point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub curve: usize,
    pub terminal: usize,
}

/// A blowup cluster with curvetta attachments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupCluster {
    pub points: Vec<ClusterPoint>,
    pub branches: Vec<Branch>,
}

impl BlowupCluster {
    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if p.proximities.iter().any(|&t| t >= i) {
                return Err(Error::InvalidCluster(format!(
                    "point {i} proximate to a later point"
                )));
            }
            if i == 0 && !p.proximities.is_empty() {
                return Err(Error::InvalidCluster("origin has proximities".into()));
            }
            if i > 0 && (p.proximities.is_empty() || p.proximities.len() > 2) {
                return Err(Error::InvalidCluster(format!(
                    "point {i} has {} proximity targets",
                    p.proximities.len()
                )));
            }
            if p.proximities.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidCluster(format!(
                    "point {i} proximities not strictly sorted"
                )));
            }
        }
        for b in &self.branches {
            if b.terminal >= self.points.len() {
                return Err(Error::InvalidCluster(format!(
                    "branch for curve {} attached to missing point",
                    b.curve
                )));
            }
        }
        Ok(())
    }

    /// Parent of a non-origin point: its latest proximity target.
    pub fn parent(&self, point: usize) -> Option<usize> {
        self.points[point].proximities.last().copied()
    }

    /// Points of the branch through `terminal`: the parent chain from the
    /// origin down to the terminal.
    pub fn branch_points(&self, terminal: usize) -> Vec<usize> {
        let mut chain = vec![terminal];
        let mut cur = terminal;
        while let Some(p) = self.parent(cur) {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    /// Branch multiplicities at each chain point, by downward recursion:
    /// the terminal has multiplicity 1 and `m_v = Σ m_q` over the chain
    /// points `q` proximate to `v`.
    pub fn branch_multiplicities(&self, terminal: usize) -> BTreeMap<usize, i64> {
        let chain = self.branch_points(terminal);
        let mut m: BTreeMap<usize, i64> = BTreeMap::new();
        for &v in chain.iter().rev() {
            if v == terminal {
                m.insert(v, 1);
                continue;
            }
            let total: i64 = chain
                .iter()
                .filter(|&&q| self.points[q].proximities.contains(&v))
                .map(|q| m[q])
                .sum();
            m.insert(v, total);
        }
        m
    }
}

/// Noether intersection data of a cluster's branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoetherData {
    /// Sizes with multiplicity `l(i) = Σ_v m_v(i)`.
    pub sizes: Vec<i64>,
    /// Total multiplicity `m(i)` of the branch in the minimal resolution:
    /// the multiplicity sum over singular and shared points.
    pub minimal_multiplicity: Vec<i64>,
    pub kinds: Vec<BranchKind>,
    /// Gram matrix: diagonal `l(i)`, off-diagonal the Noether sums.
    pub gram: Vec<Vec<i64>>,
    /// Per curve: cluster point -> multiplicity.
    pub table: Vec<BTreeMap<usize, i64>>,
}

/// Compute sizes, multiplicities, branch kinds, and the pairwise Gram matrix
/// from a cluster via the Noether formula. Asserts `m(i) <= l(i)`.
pub fn noether_gram(cluster: &BlowupCluster) -> Result<NoetherData> {
    cluster.validate()?;
    let k = cluster.branches.len();
    let mut order: Vec<&Branch> = cluster.branches.iter().collect();
    order.sort_by_key(|b| b.curve);
    if order.iter().enumerate().any(|(i, b)| b.curve != i) {
        return Err(Error::InvalidCluster("branch curve indices not 0..k".into()));
    }
    let table: Vec<BTreeMap<usize, i64>> = order
        .iter()
        .map(|b| cluster.branch_multiplicities(b.terminal))
        .collect();
    let sizes: Vec<i64> = table.iter().map(|m| m.values().sum()).collect();
    let kinds: Vec<BranchKind> = table
        .iter()
        .map(|m| {
            if m.values().any(|&x| x > 1) {
                BranchKind::Cusp
            } else {
                BranchKind::Smooth
            }
        })
        .collect();
    let minimal_multiplicity: Vec<i64> = (0..k)
        .map(|i| {
            table[i]
                .iter()
                .filter(|&(v, &m)| m > 1 || (0..k).any(|j| j != i && table[j].contains_key(v)))
                .map(|(_, &m)| m)
                .sum()
        })
        .collect();
    for i in 0..k {
        if minimal_multiplicity[i] > sizes[i] {
            return Err(Error::InvalidCluster(format!(
                "branch {i}: m = {} exceeds l = {}",
                minimal_multiplicity[i], sizes[i]
            )));
        }
    }
    let mut gram = vec![vec![0i64; k]; k];
    for i in 0..k {
        gram[i][i] = sizes[i];
        for j in 0..i {
            let dot: i64 = table[i]
                .iter()
                .filter_map(|(v, &m)| table[j].get(v).map(|&m2| m * m2))
                .sum();
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }
    Ok(NoetherData {
        sizes,
        minimal_multiplicity,
        kinds,
        gram,
        table,
    })
}

/// Record one blowdown of a presentation graph `Γ̃` to the empty graph,
/// always contracting the `-1` vertex of smallest index among those of
/// degree at most 2. Each contracted vertex's neighbours at contraction time
/// become its proximity targets; `curve_leaves[i]` is the `-1` leaf carrying
/// curve `i`, whose cluster point becomes that curve's branch terminal.
pub fn blowdown_cluster(
    tilde: &PlumbingTree,
    curve_leaves: &[VertexId],
) -> Result<BlowupCluster> {
    let n = tilde.len();
    let mut alive = vec![true; n];
    let mut framing: Vec<i64> = tilde.framings().to_vec();
    let mut adj: Vec<Vec<usize>> = tilde.adjacency();
    // removal order with neighbours-at-contraction
    let mut removals: Vec<(usize, Vec<usize>)> = Vec::new();
    for _ in 0..n {
        let candidate = (0..n).find(|&v| {
            alive[v] && framing[v] == -1 && adj[v].iter().filter(|&&w| alive[w]).count() <= 2
        });
        let v = candidate.ok_or_else(|| {
            let stuck: Vec<String> = (0..n)
                .filter(|&v| alive[v])
                .map(|v| format!("{}:{}", tilde.label(v), framing[v]))
                .collect();
            Error::NotBlowdownable(format!("no contractible -1 vertex among [{}]", stuck.join(", ")))
        })?;
        let neighbours: Vec<usize> = adj[v].iter().copied().filter(|&w| alive[w]).collect();
        alive[v] = false;
        match neighbours.len() {
            0 => {}
            1 => framing[neighbours[0]] += 1,
            2 => {
                framing[neighbours[0]] += 1;
                framing[neighbours[1]] += 1;
                adj[neighbours[0]].push(neighbours[1]);
                adj[neighbours[1]].push(neighbours[0]);
            }
            _ => unreachable!(),
        }
        removals.push((v, neighbours));
    }
    // cluster order is the reverse of the removal order
    let mut cluster_index = vec![usize::MAX; n];
    let total = removals.len();
    for (i, (v, _)) in removals.iter().enumerate() {
        cluster_index[*v] = total - 1 - i;
    }
    let mut points = vec![
        ClusterPoint {
            label: String::new(),
            proximities: Vec::new(),
        };
        total
    ];
    for (v, neighbours) in &removals {
        let mut proximities: Vec<usize> = neighbours.iter().map(|&w| cluster_index[w]).collect();
        proximities.sort_unstable();
        points[cluster_index[*v]] = ClusterPoint {
            label: tilde.label(*v).to_string(),
            proximities,
        };
    }
    let branches = curve_leaves
        .iter()
        .enumerate()
        .map(|(curve, &leaf)| Branch {
            curve,
            terminal: cluster_index[leaf],
        })
        .collect();
    let cluster = BlowupCluster { points, branches };
    cluster.validate()?;
    Ok(cluster)
}

/// Rebuild the presentation graph from a cluster by forward blowup
/// simulation. Returns `Γ̃` and, per curve, the vertex of its terminal
/// point. Satellite points require their two targets to be adjacent at
/// blowup time (they separate afterwards).
pub fn cluster_to_tilde(cluster: &BlowupCluster) -> Result<(PlumbingTree, Vec<VertexId>)> {
    cluster.validate()?;
    let n = cluster.points.len();
    let mut framing: Vec<i64> = Vec::with_capacity(n);
    let mut edges: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();
    for (i, p) in cluster.points.iter().enumerate() {
        framing.push(-1);
        match p.proximities.as_slice() {
            [] => {
                if i != 0 {
                    return Err(Error::InvalidCluster(format!("point {i} has no parent")));
                }
            }
            [t] => {
                framing[*t] -= 1;
                edges.insert((*t, i));
            }
            [a, b] => {
                let key = (*a.min(b), *a.max(b));
                if !edges.remove(&key) {
                    return Err(Error::InvalidCluster(format!(
                        "satellite point {i}: targets {a}, {b} not adjacent"
                    )));
                }
                framing[*a] -= 1;
                framing[*b] -= 1;
                edges.insert((*a, i));
                edges.insert((*b, i));
            }
            _ => unreachable!(),
        }
    }
    let labels: Vec<String> = cluster
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.label.is_empty() {
                format!("q{i}")
            } else {
                p.label.clone()
            }
        })
        .collect();
    let vertices: Vec<(String, i64)> = labels
        .iter()
        .cloned()
        .zip(framing.iter().copied())
        .collect();
    let named_edges: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (labels[a].clone(), labels[b].clone()))
        .collect();
    let tilde = PlumbingTree::new(vertices, named_edges)?;
    let mut terminals = vec![0usize; cluster.branches.len()];
    for b in &cluster.branches {
        terminals[b.curve] = tilde.vertex_by_label(&labels[b.terminal])?;
    }
    Ok((tilde, terminals))
}

/// Drop the given leaves from a tree (each must have degree 1), keeping
/// everything else. Used to pass from `Γ̃` to `Γ`.
pub fn strip_leaves(tree: &PlumbingTree, leaves: &[VertexId]) -> Result<PlumbingTree> {
    let drop: std::collections::BTreeSet<VertexId> = leaves.iter().copied().collect();
    for &leaf in leaves {
        if tree.degree(leaf) != 1 {
            return Err(Error::InvalidParams(format!(
                "`{}` is not a leaf",
                tree.label(leaf)
            )));
        }
    }
    let vertices: Vec<(String, i64)> = tree
        .vertices()
        .filter(|v| !drop.contains(v))
        .map(|v| (tree.label(v).to_string(), tree.framing(v)))
        .collect();
    let edges: Vec<(String, String)> = tree
        .edges()
        .filter(|(a, b)| !drop.contains(a) && !drop.contains(b))
        .map(|(a, b)| (tree.label(a).to_string(), tree.label(b).to_string()))
        .collect();
    PlumbingTree::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PlumbingTree;
    use crate::sandwich::presentation_smooth;

    #[test]
    fn blowdown_of_minus4() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let (tilde, leaves) = pres.tilde();
        let cluster = blowdown_cluster(&tilde, &leaves).unwrap();
        assert_eq!(cluster.points.len(), 4);
        let data = noether_gram(&cluster).unwrap();
        assert_eq!(data.sizes, vec![2, 2, 2]);
        assert_eq!(data.gram, pres.gram);
        assert!(data.kinds.iter().all(|&k| k == BranchKind::Smooth));
    }

    #[test]
    fn blowdown_of_5_2() {
        let tree = PlumbingTree::linear(&[5, 2]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let (tilde, leaves) = pres.tilde();
        let cluster = blowdown_cluster(&tilde, &leaves).unwrap();
        assert_eq!(cluster.points.len(), 6);
        let data = noether_gram(&cluster).unwrap();
        assert_eq!(data.gram, pres.gram);
    }

    #[test]
    fn non_sandwich_input_errors() {
        let tree = PlumbingTree::linear(&[2]);
        assert!(matches!(
            blowdown_cluster(&tree, &[]),
            Err(Error::NotBlowdownable(_))
        ));
    }

    #[test]
    fn forward_simulation_round_trip() {
        let tree = PlumbingTree::linear(&[5, 2]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let (tilde, leaves) = pres.tilde();
        let cluster = blowdown_cluster(&tilde, &leaves).unwrap();
        let (rebuilt, terminals) = cluster_to_tilde(&cluster).unwrap();
        // same framings multiset and same noether data
        let mut f1: Vec<i64> = tilde.framings().to_vec();
        let mut f2: Vec<i64> = rebuilt.framings().to_vec();
        f1.sort_unstable();
        f2.sort_unstable();
        assert_eq!(f1, f2);
        let back = blowdown_cluster(&rebuilt, &terminals).unwrap();
        assert_eq!(
            noether_gram(&back).unwrap().gram,
            noether_gram(&cluster).unwrap().gram
        );
    }

    #[test]
    fn gram_independent_of_blowdown_order() {
        // randomized legal orders give the same Noether data; exercise this
        // by blowing down a graph with several simultaneously contractible
        // vertices after relabeling (which permutes the canonical order).
        let tree = PlumbingTree::new(
            vec![("z", -5), ("a", -2)],
            vec![("z", "a")],
        )
        .unwrap();
        let end = tree.vertex_by_label("z").unwrap();
        let pres = presentation_smooth(&tree, end).unwrap();
        let (tilde, leaves) = pres.tilde();
        let data1 = noether_gram(&blowdown_cluster(&tilde, &leaves).unwrap()).unwrap();
        let pres2 = presentation_smooth(&PlumbingTree::linear(&[5, 2]), 0).unwrap();
        let (tilde2, leaves2) = pres2.tilde();
        let data2 = noether_gram(&blowdown_cluster(&tilde2, &leaves2).unwrap()).unwrap();
        assert_eq!(data1.gram, data2.gram);
    }

    #[test]
    fn cusp_multiplicity_sequence() {
        // one satellite step: origin, free child, satellite of both, then a
        // chain of free points; the branch has multiplicity sequence
        // (2, 1, ..., 1)
        let cluster = BlowupCluster {
            points: vec![
                ClusterPoint { label: "p0".into(), proximities: vec![] },
                ClusterPoint { label: "p1".into(), proximities: vec![0] },
                ClusterPoint { label: "p2".into(), proximities: vec![0, 1] },
                ClusterPoint { label: "p3".into(), proximities: vec![2] },
            ],
            branches: vec![Branch { curve: 0, terminal: 3 }],
        };
        let data = noether_gram(&cluster).unwrap();
        assert_eq!(data.kinds[0], BranchKind::Cusp);
        let m = &data.table[0];
        assert_eq!(m[&0], 2);
        assert_eq!(m[&1], 1);
        assert_eq!(m[&2], 1);
        assert_eq!(m[&3], 1);
        assert_eq!(data.sizes[0], 5);
    }
}
