//! Explicit configuration families — projective planes, point clusters and
//! their extensions, and the three-set complement family — plus graph
//! reconstruction from smooth-branch configurations.
//!
//! Reconstruction builds the prefix tree of the configuration: every curve
//! is a root chain whose length is its size, two chains share exactly their
//! pairwise intersection number, each tree node becomes a vertex framed
//! `-1 - #children`, and the terminal leaves (where the curvettas sit) are
//! removed. The blowdown of the resulting presentation ends at the root,
//! and the reconstruction is accepted only when the induced presentation
//! reproduces the input Gram data exactly.

use std::collections::BTreeSet;

use crate::graph::PlumbingTree;
use crate::sandwich::{BranchKind, CurveSpec, SandwichPresentation};
use crate::solver::{validate, Configuration, CurveSupport};
use crate::{Error, Result};

fn simple_config(points: Vec<String>, curves: Vec<BTreeSet<usize>>) -> Configuration {
    Configuration {
        points,
        curves: curves
            .into_iter()
            .map(|support| CurveSupport {
                vertex: String::new(),
                support: support.into_iter().map(|p| (p, 1)).collect(),
            })
            .collect(),
    }
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The finite projective plane of order `n` (prime orders only; the plane is
/// built from the field of `n` elements), optionally modified by `l` extra
/// points: pick a point `x`; add points `a_1, ..., a_l` and curves
/// `{x, a_i}`, and put every `a_i` on every line missing `x`.
pub fn fpp_config(n: i64, l: usize) -> Result<Configuration> {
    if !is_prime(n) {
        return Err(Error::InvalidParams(format!(
            "unsupported order {n}: the field-plane generator needs a prime"
        )));
    }
    // projective points: nonzero triples over F_n, first nonzero coordinate 1
    let mut reps: Vec<[i64; 3]> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let v = [x, y, z];
                if v == [0, 0, 0] {
                    continue;
                }
                let first = v.iter().find(|&&c| c != 0).unwrap();
                if *first == 1 {
                    reps.push(v);
                }
            }
        }
    }
    debug_assert_eq!(reps.len() as i64, n * n + n + 1);
    let m = reps.len();
    let mut points: Vec<String> = (0..m).map(|i| format!("p{}", i + 1)).collect();
    // lines are dual triples; incidence is a vanishing dot product
    let mut curves: Vec<BTreeSet<usize>> = reps
        .iter()
        .map(|line| {
            (0..m)
                .filter(|&p| {
                    let dot: i64 = (0..3).map(|c| line[c] * reps[p][c]).sum();
                    dot % n == 0
                })
                .collect()
        })
        .collect();
    if l > 0 {
        let x = 0usize; // the chosen point
        for i in 1..=l {
            points.push(format!("a{i}"));
        }
        for curve in curves.iter_mut() {
            if !curve.contains(&x) {
                for i in 0..l {
                    curve.insert(m + i);
                }
            }
        }
        for i in 0..l {
            curves.push(BTreeSet::from([x, m + i]));
        }
    }
    Ok(simple_config(points, curves))
}

/// Extension variants for [`cl_config`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClExtension {
    None,
    /// Add a set `B` of size `|b|` to every existing curve and new curves
    /// `D_i = ∪ A_l ∪ {b_i}` (complements inside `B` when `b < 0`).
    Cluster(i64),
    /// Add a point `x` and a set `B`: existing curves gain `B`, plus curves
    /// `S_i = {x, b_i}` and `F = ∪ A_i ∪ {x}`.
    Star(i64),
}

/// The cluster configurations: `|k|` clusters of `n` points each, with
/// curves `C^i_j = ∪_{l≠i} A_l ∪ {a_j}` for `k > 0` and the complement
/// variant `∪_{l≠i} A_l ∪ (A_i \ {a_j})` for `k < 0`.
pub fn cl_config(k: i64, n: usize, extension: ClExtension) -> Result<Configuration> {
    let clusters = k.unsigned_abs() as usize;
    if clusters < 2 || n < 1 {
        return Err(Error::InvalidParams(format!(
            "cl needs |k| >= 2 and n >= 1, got ({k}, {n})"
        )));
    }
    match extension {
        ClExtension::Cluster(b) => {
            let bn = b.unsigned_abs() as usize;
            let legal = if k > 0 {
                b >= n as i64 && n > 1
            } else {
                k < -1 && bn >= 1
            };
            if !legal {
                return Err(Error::InvalidParams(format!(
                    "cluster extension parameter b = {b} not admissible for ({k}, {n})"
                )));
            }
        }
        ClExtension::Star(b) => {
            if b < 1 {
                return Err(Error::InvalidParams(
                    "star extension needs a positive parameter".into(),
                ));
            }
        }
        ClExtension::None => {}
    }
    let mut points: Vec<String> = Vec::new();
    let mut cluster_points: Vec<Vec<usize>> = Vec::new();
    for i in 1..=clusters {
        let mut idx = Vec::new();
        for j in 1..=n {
            idx.push(points.len());
            points.push(format!("a{i}_{j}"));
        }
        cluster_points.push(idx);
    }
    let mut curves: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..clusters {
        for &a in &cluster_points[i] {
            let mut support: BTreeSet<usize> = cluster_points
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != i)
                .flat_map(|(_, pts)| pts.iter().copied())
                .collect();
            if k > 0 {
                support.insert(a);
            } else {
                for &other in &cluster_points[i] {
                    if other != a {
                        support.insert(other);
                    }
                }
            }
            curves.push(support);
        }
    }
    match extension {
        ClExtension::None => {}
        ClExtension::Cluster(b) => {
            let bn = b.unsigned_abs() as usize;
            let b_points: Vec<usize> = (1..=bn)
                .map(|j| {
                    points.push(format!("b{j}"));
                    points.len() - 1
                })
                .collect();
            for curve in curves.iter_mut() {
                curve.extend(b_points.iter().copied());
            }
            let all_a: BTreeSet<usize> = cluster_points.iter().flatten().copied().collect();
            for &bp in &b_points {
                let mut support = all_a.clone();
                if b > 0 {
                    support.insert(bp);
                } else {
                    for &other in &b_points {
                        if other != bp {
                            support.insert(other);
                        }
                    }
                }
                curves.push(support);
            }
        }
        ClExtension::Star(b) => {
            let bn = b as usize;
            let b_points: Vec<usize> = (1..=bn)
                .map(|j| {
                    points.push(format!("b{j}"));
                    points.len() - 1
                })
                .collect();
            points.push("x".into());
            let x = points.len() - 1;
            for curve in curves.iter_mut() {
                curve.extend(b_points.iter().copied());
            }
            for &bp in &b_points {
                curves.push(BTreeSet::from([x, bp]));
            }
            let mut f: BTreeSet<usize> = cluster_points.iter().flatten().copied().collect();
            f.insert(x);
            curves.push(f);
        }
    }
    Ok(simple_config(points, curves))
}

/// The three-set complement family: sets `A, B, C` of sizes `|a|, |b|, |c|`
/// with curves `A ∪ {b_i}`, `B ∪ {c_i}`, `C ∪ {a_i}`; a negative parameter
/// complements the singleton inside the set the curves contain (e.g.
/// `b < 0` replaces `B ∪ {c_i}` by `B ∪ (C \ {c_i})`).
pub fn t_config(a: i64, b: i64, c: i64) -> Result<Configuration> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::InvalidParams("parameters must be nonzero".into()));
    }
    let sizes = [a.unsigned_abs() as usize, b.unsigned_abs() as usize, c.unsigned_abs() as usize];
    let names = ["a", "b", "c"];
    let mut points = Vec::new();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for (set, &size) in sizes.iter().enumerate() {
        let mut idx = Vec::new();
        for j in 1..=size {
            idx.push(points.len());
            points.push(format!("{}{j}", names[set]));
        }
        sets.push(idx);
    }
    let mut curves = Vec::new();
    // curve family containing set X picks singletons (or complements) from
    // the next set cyclically; the sign of X's parameter flips the choice
    let signs = [a > 0, b > 0, c > 0];
    for set in 0..3 {
        let next = (set + 1) % 3;
        for &y in &sets[next] {
            let mut support: BTreeSet<usize> = sets[set].iter().copied().collect();
            if signs[set] {
                support.insert(y);
            } else {
                for &other in &sets[next] {
                    if other != y {
                        support.insert(other);
                    }
                }
            }
            curves.push(support);
        }
    }
    Ok(simple_config(points, curves))
}

/// Reconstruct the plumbing tree of a smooth-branch configuration via its
/// prefix tree. Errors when the configuration is not prefix-realizable
/// (some triple of pairwise intersections attains its minimum only once, or
/// a pairwise intersection vanishes) or when the induced presentation does
/// not reproduce the input Gram data.
pub fn reconstruct_graph(config: &Configuration) -> Result<PlumbingTree> {
    Ok(reconstruct_presentation(config)?.0.base)
}

/// As [`reconstruct_graph`], also returning the induced presentation (curves
/// in the configuration's order, blowdown ending at the root) and the
/// configuration with its vertex assignments filled in.
pub fn reconstruct_presentation(
    config: &Configuration,
) -> Result<(SandwichPresentation, Configuration)> {
    let k = config.curves.len();
    if k == 0 {
        return Err(Error::Unrealizable("no curves".into()));
    }
    for (i, c) in config.curves.iter().enumerate() {
        if !c.is_smooth_pattern() {
            return Err(Error::Unrealizable(format!(
                "curve {i} has a multiple point; reconstruction needs smooth branches"
            )));
        }
    }
    let sizes: Vec<i64> = config.curves.iter().map(|c| c.mass()).collect();
    let mut gram = vec![vec![0i64; k]; k];
    for i in 0..k {
        gram[i][i] = sizes[i];
        for j in 0..i {
            let d = config.curves[i].dot(&config.curves[j]);
            if d < 1 {
                return Err(Error::Unrealizable(format!(
                    "curves {j}, {i} are disjoint"
                )));
            }
            gram[i][j] = d;
            gram[j][i] = d;
        }
    }
    // prefix condition: the minimum of each triple is attained at least twice
    for i in 0..k {
        for j in 0..i {
            for h in 0..j {
                let (x, y, z) = (gram[i][j], gram[i][h], gram[j][h]);
                let min = x.min(y).min(z);
                let hits = [x, y, z].iter().filter(|&&v| v == min).count();
                if hits < 2 {
                    return Err(Error::Unrealizable(format!(
                        "triple ({h}, {j}, {i}) has intersections ({z}, {y}, {x}) with a unique minimum"
                    )));
                }
            }
        }
    }

    // build the prefix tree: nodes are (depth, curve group)
    struct Node {
        depth: i64,
        parent: Option<usize>,
        children: Vec<usize>,
        terminating: Vec<usize>,
    }
    let mut nodes: Vec<Node> = vec![Node {
        depth: 1,
        parent: None,
        children: Vec::new(),
        terminating: (0..k).filter(|&i| sizes[i] == 1).collect(),
    }];
    // groups to process: (node index, curves passing through it)
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, (0..k).collect())];
    while let Some((node, group)) = stack.pop() {
        let depth = nodes[node].depth;
        let continuing: Vec<usize> = group.iter().copied().filter(|&i| sizes[i] > depth).collect();
        // partition by "shares more than `depth`" (transitive by the prefix
        // condition)
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in &continuing {
            match classes
                .iter_mut()
                .find(|class| gram[class[0]][i] >= depth + 1)
            {
                Some(class) => class.push(i),
                None => classes.push(vec![i]),
            }
        }
        for class in classes {
            let child = nodes.len();
            nodes.push(Node {
                depth: depth + 1,
                parent: Some(node),
                children: Vec::new(),
                terminating: class
                    .iter()
                    .copied()
                    .filter(|&i| sizes[i] == depth + 1)
                    .collect(),
            });
            nodes[node].children.push(child);
            stack.push((child, class));
        }
    }

    // drop the pure terminal leaves (the curvetta positions)
    let removed: Vec<bool> = nodes
        .iter()
        .map(|n| n.children.is_empty() && !n.terminating.is_empty())
        .collect();
    if removed[0] {
        return Err(Error::Unrealizable(
            "every curve terminates at the root".into(),
        ));
    }
    for (i, node) in nodes.iter().enumerate() {
        if !removed[i] && !node.terminating.is_empty() {
            return Err(Error::Unrealizable(format!(
                "a curve terminates at an interior prefix-tree node (depth {})",
                node.depth
            )));
        }
    }
    let mut vertex_of_node: Vec<Option<usize>> = vec![None; nodes.len()];
    let mut vertices: Vec<(String, i64)> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        if removed[i] {
            continue;
        }
        let id = format!("n{}", vertices.len() + 1);
        vertex_of_node[i] = Some(vertices.len());
        vertices.push((id.clone(), -1 - node.children.len() as i64));
        if let Some(parent) = node.parent {
            let pid = vertex_of_node[parent].expect("parent precedes child");
            edges.push((vertices[pid].0.clone(), id));
        }
    }
    let tree = PlumbingTree::new(vertices, edges)?;

    // curve assignments: each curve attaches at the parent of its removed
    // terminal leaf
    let mut assignment = vec![usize::MAX; k];
    for (i, node) in nodes.iter().enumerate() {
        if !removed[i] {
            continue;
        }
        let parent = node.parent.expect("terminal leaves are not the root");
        let vertex = vertex_of_node[parent].expect("parent survives");
        for &curve in &node.terminating {
            assignment[curve] = vertex;
        }
    }
    if assignment.iter().any(|&v| v == usize::MAX) {
        return Err(Error::Unrealizable("unattached curve".into()));
    }

    let root = 0usize;
    // validate the required curve counts of the induced presentation
    for v in tree.vertices() {
        let actual = assignment.iter().filter(|&&x| x == v).count() as i64;
        let mut required = -(tree.degree(v) as i64 + tree.framing(v));
        if v == root {
            required -= 1;
        }
        if actual != required {
            return Err(Error::Unrealizable(format!(
                "vertex `{}` carries {actual} curves but the blowdown needs {required}",
                tree.label(v)
            )));
        }
    }
    let curves: Vec<CurveSpec> = (0..k)
        .map(|i| CurveSpec {
            name: format!("C{}", i + 1),
            vertex: assignment[i],
            size: sizes[i],
            kind: BranchKind::Smooth,
        })
        .collect();
    let presentation = SandwichPresentation {
        base: tree.clone(),
        end: root,
        curves,
        gram: gram.clone(),
    };
    // the induced presentation must reproduce the input Gram exactly
    let induced = crate::sandwich::gram_smooth(&presentation)?;
    if induced != gram {
        return Err(Error::Unrealizable(
            "prefix tree does not reproduce the pairwise intersections".into(),
        ));
    }
    let assigned = Configuration {
        points: config.points.clone(),
        curves: config
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| CurveSupport {
                vertex: tree.label(assignment[i]).to_string(),
                support: c.support.clone(),
            })
            .collect(),
    };
    let report = validate(&assigned, &presentation)?;
    if !report.valid {
        return Err(Error::Unrealizable(format!(
            "reconstructed presentation rejects the configuration: {:?}",
            report.violations
        )));
    }
    Ok((presentation, assigned))
}

/// `fpp(n)` graphs including the decorated variants: for `l = 0` the star
/// itself, for `l > 0` the reconstruction of the modified configuration.
pub fn fpp_graph(n: i64, l: usize) -> Result<PlumbingTree> {
    if l == 0 {
        crate::graph::fpp_graph(n)
    } else {
        reconstruct_graph(&fpp_config(n, l)?)
    }
}

/// A named catalog entry: a configuration together with its reconstructed
/// graph and presentation.
pub struct CatalogEntry {
    pub name: String,
    pub config: Configuration,
    pub presentation: SandwichPresentation,
}

/// The named configurations used across the test suites: projective planes,
/// cluster families with extensions, and complement-family members.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut entries = Vec::new();
    let mut push = |name: &str, config: Configuration| {
        let (presentation, assigned) =
            reconstruct_presentation(&config).unwrap_or_else(|e| panic!("{name}: {e}"));
        entries.push(CatalogEntry {
            name: name.to_string(),
            config: assigned,
            presentation,
        });
    };
    push("fpp(2)", fpp_config(2, 0).unwrap());
    push("fpp(3)", fpp_config(3, 0).unwrap());
    push("fpp(2)_1", fpp_config(2, 1).unwrap());
    push("cl(2,2)", cl_config(2, 2, ClExtension::None).unwrap());
    push("cl(-2,2)", cl_config(-2, 2, ClExtension::None).unwrap());
    push("cl(-3,1)", cl_config(-3, 1, ClExtension::None).unwrap());
    push("cl(2,2)+star(2)", cl_config(2, 2, ClExtension::Star(2)).unwrap());
    push("cl(2,2)+cluster(2)", cl_config(2, 2, ClExtension::Cluster(2)).unwrap());
    push("cl(-2,3)+cluster(-2)", cl_config(-2, 3, ClExtension::Cluster(-2)).unwrap());
    push("t(2,2,2)", t_config(2, 2, 2).unwrap());
    push("t(2,-2,2)", t_config(2, -2, 2).unwrap());
    push("t(-3,-2,-2)", t_config(-3, -2, -2).unwrap());
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{anticanonical, intersection_matrix};

    #[test]
    fn fano_plane() {
        let config = fpp_config(2, 0).unwrap();
        assert_eq!(config.points.len(), 7);
        assert_eq!(config.curves.len(), 7);
        for c in &config.curves {
            assert_eq!(c.mass(), 3);
        }
        for i in 0..7 {
            for j in 0..i {
                assert_eq!(config.curves[i].dot(&config.curves[j]), 1);
            }
        }
    }

    #[test]
    fn order_three_plane() {
        let config = fpp_config(3, 0).unwrap();
        assert_eq!(config.points.len(), 13);
        assert_eq!(config.curves.len(), 13);
        assert!(config.curves.iter().all(|c| c.mass() == 4));
        for i in 0..13 {
            for j in 0..i {
                assert_eq!(config.curves[i].dot(&config.curves[j]), 1);
            }
        }
    }

    #[test]
    fn unsupported_order() {
        assert!(fpp_config(6, 0).is_err());
        assert!(fpp_config(4, 0).is_err());
    }

    #[test]
    fn fano_reconstructs_to_fpp2() {
        let config = fpp_config(2, 0).unwrap();
        let tree = reconstruct_graph(&config).unwrap();
        let expected = crate::graph::fpp_graph(2).unwrap();
        assert_eq!(
            crate::graph::canonical_code(&tree),
            crate::graph::canonical_code(&expected)
        );
    }

    #[test]
    fn fpp2_decorated() {
        let config = fpp_config(2, 1).unwrap();
        assert_eq!(config.points.len(), 8);
        assert_eq!(config.curves.len(), 8);
        let tree = reconstruct_graph(&config).unwrap();
        assert_eq!(tree.len(), 9);
    }

    #[test]
    fn cl_22() {
        let config = cl_config(2, 2, ClExtension::None).unwrap();
        assert_eq!(config.points.len(), 4);
        assert_eq!(config.curves.len(), 4);
        assert!(config.curves.iter().all(|c| c.mass() == 3));
        for i in 0..4 {
            for j in 0..i {
                assert_eq!(config.curves[i].dot(&config.curves[j]), 2);
            }
        }
        let tree = reconstruct_graph(&config).unwrap();
        assert_eq!(
            crate::graph::canonical_code(&tree),
            crate::graph::canonical_code(&PlumbingTree::linear(&[2, 5]))
        );
        // the 9/5 member of the linear family
        let g = crate::graph::linear_from_fraction(3, 2).unwrap();
        assert_eq!(
            crate::graph::canonical_code(&tree),
            crate::graph::canonical_code(&g)
        );
    }

    #[test]
    fn cl_negative_is_linear() {
        for (k, n) in [(-2i64, 2usize), (-3, 1), (-2, 3)] {
            let config = cl_config(k, n, ClExtension::None).unwrap();
            let tree = reconstruct_graph(&config).unwrap();
            let max_degree = tree.vertices().map(|v| tree.degree(v)).max().unwrap();
            assert!(max_degree <= 2, "cl({k},{n}) not linear");
        }
    }

    #[test]
    fn triangle_reconstructs_to_minus4() {
        let config = cl_config(-3, 1, ClExtension::None).unwrap();
        let tree = reconstruct_graph(&config).unwrap();
        assert_eq!(tree.len(), 1);
        assert_eq!(tree.framing(0), -4);
    }

    #[test]
    fn t_family() {
        let config = t_config(2, 2, 2).unwrap();
        assert_eq!(config.points.len(), 6);
        assert_eq!(config.curves.len(), 6);
        assert!(config.curves.iter().all(|c| c.mass() == 3));
        let tree = reconstruct_graph(&config).unwrap();
        // Wahl's minimal member: a star with center -4 and three -3 leaves
        let expected = PlumbingTree::new(
            vec![("c", -4), ("l1", -3), ("l2", -3), ("l3", -3)],
            vec![("c", "l1"), ("c", "l2"), ("c", "l3")],
        )
        .unwrap();
        assert_eq!(
            crate::graph::canonical_code(&tree),
            crate::graph::canonical_code(&expected)
        );

        let neg = t_config(2, -2, 2).unwrap();
        assert_eq!(neg.curves.len(), 6);
        reconstruct_graph(&neg).unwrap();

        let all_neg = t_config(-3, -2, -2).unwrap();
        assert_eq!(all_neg.points.len(), 7);
        assert_eq!(all_neg.curves.len(), 7);
        reconstruct_graph(&all_neg).unwrap();
    }

    #[test]
    fn catalog_validates_with_zk() {
        for entry in catalog() {
            assert_eq!(entry.config.mu(), 0, "{}", entry.name);
            let form = intersection_matrix(&entry.presentation.base);
            assert!(form.is_negative_definite(), "{}", entry.name);
            let a = anticanonical(&form).unwrap();
            assert!(a.zk_test, "{}: zk failed", entry.name);
            let det_ok =
                crate::homology::qhd_det_check(&entry.config, &form).unwrap();
            assert!(det_ok, "{}: determinant check failed", entry.name);
        }
    }

    #[test]
    fn scott_round_trip() {
        // reconstruct ∘ scott is the identity on catalog graphs
        for tree in [
            PlumbingTree::linear(&[4]),
            PlumbingTree::linear(&[5, 2]),
            PlumbingTree::linear(&[2, 5]),
            crate::graph::fpp_graph(2).unwrap(),
        ] {
            let end = (0..tree.len())
                .find(|&v| -(tree.degree(v) as i64 + tree.framing(v)) - 1 >= 0)
                .unwrap();
            let pres = crate::sandwich::presentation_smooth(&tree, end).unwrap();
            let scott = crate::sandwich::scott_incidence(&pres).unwrap();
            let rebuilt = reconstruct_graph(&scott).unwrap();
            assert_eq!(
                crate::graph::canonical_code(&rebuilt),
                crate::graph::canonical_code(&tree)
            );
        }
    }
}
