//! Plumbing trees: vertex-framed trees with the statistics, notation
//! expansion, and family generators used throughout the crate.
//!
//! A plumbing tree records a resolution graph: every vertex carries an
//! integer framing `e(v)` (the self-intersection of the exceptional curve)
//! and the underlying graph is a tree. Framings are arbitrary integers at
//! the type level; validation for resolution use is a separate pass, since
//! intermediate graphs in blowup sequences legitimately carry `-1` vertices.

mod enumerate;

pub use enumerate::{canonical_code, enumerate_trees, CanonicalCode, FramingRule, TreeConstraints};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Index of a vertex inside a [`PlumbingTree`]. Stable across clones,
/// invalidated by contractions (which return a new tree).
pub type VertexId = usize;

/// A vertex-framed tree, the resolution graph `Γ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlumbingTree {
    labels: Vec<String>,
    framings: Vec<i64>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

fn norm_edge(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PlumbingTree {
    /// Build a tree from labelled vertices and label pairs. Errors unless the
    /// result is a connected acyclic simple graph with unique ids.
    pub fn new<S: Into<String>>(vertices: Vec<(S, i64)>, edges: Vec<(S, S)>) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut labels = Vec::with_capacity(vertices.len());
        let mut framings = Vec::with_capacity(vertices.len());
        for (label, framing) in vertices {
            let label = label.into();
            if index.insert(label.clone(), labels.len()).is_some() {
                return Err(Error::DuplicateId(label));
            }
            labels.push(label);
            framings.push(framing);
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            let a = a.into();
            let b = b.into();
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib || !edge_set.insert(norm_edge(ia, ib)) {
                return Err(Error::NotATree(format!("bad edge ({a}, {b})")));
            }
        }
        let tree = PlumbingTree {
            labels,
            framings,
            edges: edge_set,
        };
        tree.check_tree()?;
        Ok(tree)
    }

    /// Linear graph from a list of *positive* coefficients: `linear(&[5, 2])`
    /// is the path with framings `-5, -2` and vertex ids `v1, v2`.
    pub fn linear(coefficients: &[i64]) -> Self {
        let vertices: Vec<(String, i64)> = coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("v{}", i + 1), -c))
            .collect();
        let edges: Vec<(String, String)> = (1..coefficients.len())
            .map(|i| (format!("v{i}"), format!("v{}", i + 1)))
            .collect();
        Self::new(vertices, edges).expect("linear graph is a tree")
    }

    fn check_tree(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::NotATree("empty vertex set".into()));
        }
        if self.edges.len() != n - 1 {
            return Err(Error::NotATree(format!(
                "{} vertices but {} edges",
                n,
                self.edges.len()
            )));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        if count != n {
            return Err(Error::NotATree("disconnected".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.framings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.framings.is_empty()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn framing(&self, v: VertexId) -> i64 {
        self.framings[v]
    }

    pub fn framings(&self) -> &[i64] {
        &self.framings
    }

    pub fn vertex_by_label(&self, label: &str) -> Result<VertexId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownVertex(label.into()))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.framings.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&norm_edge(a, b))
    }

    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Per-vertex statistics: degree, framing, and the node/leaf/large-node
    /// predicates. A node has degree at least 3; a large node additionally
    /// satisfies `deg(v) + e(v) <= -2`.
    pub fn stats(&self, v: VertexId) -> Result<VertexStats> {
        if v >= self.len() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        let degree = self.degree(v);
        let framing = self.framings[v];
        Ok(VertexStats {
            degree,
            framing,
            is_node: degree >= 3,
            is_leaf: degree == 1,
            is_large_node: degree as i64 + framing <= -2,
        })
    }

    /// `δ(Γ) = (Σ_v -e(v) - d(v)) - 1 - |V(Γ)|`, the reduction invariant.
    /// For a smooth-branch presentation it equals `#curves - #vertices`.
    pub fn delta(&self) -> i64 {
        let sum: i64 = self
            .vertices()
            .map(|v| -self.framings[v] - self.degree(v) as i64)
            .sum();
        sum - 1 - self.len() as i64
    }

    /// The unique tree path from `v` to `w`, inclusive; `path_between(v, v)`
    /// is `[v]`.
    pub fn path_between(&self, v: VertexId, w: VertexId) -> Result<Vec<VertexId>> {
        if v >= self.len() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        if w >= self.len() {
            return Err(Error::UnknownVertex(format!("#{w}")));
        }
        let adj = self.adjacency();
        let mut parent = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([v]);
        parent[v] = v;
        while let Some(x) = queue.pop_front() {
            if x == w {
                break;
            }
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut path = vec![w];
        let mut cur = w;
        while cur != v {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    /// Contract the edge `(a, b)` into a single vertex with the supplied
    /// framing. Other edges re-attach; the merged vertex keeps `a`'s label.
    /// Returns the contracted tree and the merged vertex's id in it.
    pub fn contract_edge(
        &self,
        a: VertexId,
        b: VertexId,
        new_framing: i64,
    ) -> Result<(PlumbingTree, VertexId)> {
        if !self.has_edge(a, b) {
            return Err(Error::UnknownEdge(
                self.labels.get(a).cloned().unwrap_or_else(|| format!("#{a}")),
                self.labels.get(b).cloned().unwrap_or_else(|| format!("#{b}")),
            ));
        }
        let (keep, drop) = (a.min(b), a.max(b));
        let mut labels = Vec::with_capacity(self.len() - 1);
        let mut framings = Vec::with_capacity(self.len() - 1);
        let remap = |v: VertexId| -> VertexId {
            if v == drop {
                keep
            } else if v > drop {
                v - 1
            } else {
                v
            }
        };
        for v in self.vertices() {
            if v == drop {
                continue;
            }
            labels.push(self.labels[v].clone());
            framings.push(if v == keep { new_framing } else { self.framings[v] });
        }
        // keep < drop always, so `keep` survives the remap unchanged; give the
        // merged vertex `a`'s label explicitly.
        labels[keep] = self.labels[a].clone();
        let mut edges = BTreeSet::new();
        for &(x, y) in &self.edges {
            if (x, y) == norm_edge(a, b) {
                continue;
            }
            edges.insert(norm_edge(remap(x), remap(y)));
        }
        let tree = PlumbingTree {
            labels,
            framings,
            edges,
        };
        tree.check_tree()?;
        Ok((tree, keep))
    }

    /// True when every framing is at most `-1` (legal for resolution use).
    pub fn all_framings_at_most(&self, bound: i64) -> bool {
        self.framings.iter().all(|&e| e <= bound)
    }

    /// Artin's rationality test via Laufer's computation sequence: compute
    /// the fundamental cycle `Z` and check `p_a(Z) = 0`. Requires a
    /// negative-definite intersection form to terminate; the caller is
    /// expected to have checked definiteness first.
    pub fn is_rational(&self) -> bool {
        let n = self.len();
        let adj = self.adjacency();
        let mut z = vec![1i64; n];
        // (Z · E_v) = e_v z_v + sum of neighbours' coefficients
        loop {
            let mut bumped = false;
            for v in 0..n {
                let dot = self.framings[v] * z[v] + adj[v].iter().map(|&w| z[w]).sum::<i64>();
                if dot > 0 {
                    z[v] += 1;
                    bumped = true;
                }
            }
            if !bumped {
                break;
            }
            if z.iter().any(|&c| c > 10_000) {
                return false; // not negative definite; bail out
            }
        }
        // p_a(Z) = 1 + (Z^2 + K.Z)/2 with K.E_v = -e_v - 2
        let zsq: i64 = (0..n)
            .map(|v| z[v] * (self.framings[v] * z[v] + adj[v].iter().map(|&w| z[w]).sum::<i64>()))
            .sum();
        let kz: i64 = (0..n).map(|v| z[v] * (-self.framings[v] - 2)).sum();
        1 + (zsq + kz) / 2 == 0
    }

    /// GraphViz rendering with framings as labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph plumbing {\n");
        for v in self.vertices() {
            out.push_str(&format!(
                "  \"{}\" [label=\"{} ({})\"];\n",
                self.labels[v], self.labels[v], self.framings[v]
            ));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  \"{}\" -- \"{}\";\n", self.labels[a], self.labels[b]));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .vertices()
                .map(|v| VertexJson {
                    id: self.labels[v].clone(),
                    framing: self.framings[v],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        Self::new(
            json.vertices
                .iter()
                .map(|v| (v.id.clone(), v.framing))
                .collect(),
            json.edges
                .iter()
                .map(|[a, b]| (a.clone(), b.clone()))
                .collect(),
        )
    }
}

/// Statistics for a single vertex, see [`PlumbingTree::stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexStats {
    pub degree: usize,
    pub framing: i64,
    pub is_node: bool,
    pub is_leaf: bool,
    pub is_large_node: bool,
}

/// Serialized form of a plumbing tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub framing: i64,
}

/// A tree with labelled edges: the figure shorthand where a number `k >= 0`
/// on an edge stands for a path of `k` vertices framed `-2`, and `k = -1`
/// merges the two endpoints into one vertex framed `e + f + 2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSketch {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<SketchEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SketchEdge {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub label: i64,
}

/// Expand the edge labels of a sketch into a plain plumbing tree.
///
/// Labels `k >= 1` are replaced by a path of `k` vertices framed `-2`
/// (ids `<a>__<b>_1`, ...); `k = 0` is a plain edge; `k = -1` merges the two
/// endpoints (applied one edge at a time, after all path expansions).
pub fn expand_sketch(sketch: &EdgeSketch) -> Result<PlumbingTree> {
    for e in &sketch.edges {
        if e.label < -1 {
            return Err(Error::BadEdgeLabel(e.label));
        }
    }
    let mut vertices: Vec<(String, i64)> = sketch
        .vertices
        .iter()
        .map(|v| (v.id.clone(), v.framing))
        .collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut merges: Vec<(String, String)> = Vec::new();
    for e in &sketch.edges {
        match e.label {
            -1 => {
                merges.push((e.a.clone(), e.b.clone()));
                edges.push((e.a.clone(), e.b.clone()));
            }
            0 => edges.push((e.a.clone(), e.b.clone())),
            k => {
                let mut prev = e.a.clone();
                for i in 1..=k {
                    let id = format!("{}__{}_{}", e.a, e.b, i);
                    vertices.push((id.clone(), -2));
                    edges.push((prev.clone(), id.clone()));
                    prev = id;
                }
                edges.push((prev, e.b.clone()));
            }
        }
    }
    let mut tree = PlumbingTree::new(vertices, edges)?;
    for (a, b) in merges {
        let ia = tree.vertex_by_label(&a)?;
        let ib = tree.vertex_by_label(&b)?;
        if !tree.has_edge(ia, ib) {
            return Err(Error::NotATree(format!(
                "merge label -1 on ({a}, {b}) would create a cycle"
            )));
        }
        let merged = tree.framing(ia) + tree.framing(ib) + 2;
        let (next, _) = tree.contract_edge(ia, ib, merged)?;
        tree = next;
    }
    Ok(tree)
}

/// Linear graph of the `𝒢` family: framings are the negatives of the
/// Hirzebruch-Jung continued fraction coefficients of `p² / (pq - 1)`,
/// for coprime `p > q > 0`.
pub fn linear_from_fraction(p: i64, q: i64) -> Result<PlumbingTree> {
    if !(p > q && q > 0) {
        return Err(Error::InvalidParams(format!("need p > q > 0, got ({p}, {q})")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidParams(format!("({p}, {q}) not coprime")));
    }
    let coeffs = hirzebruch_jung(p * p, p * q - 1);
    Ok(PlumbingTree::linear(&coeffs))
}

/// Hirzebruch-Jung expansion `n/d = a1 - 1/(a2 - 1/(...))` with all `a_i >= 2`,
/// for `n > d >= 1`.
pub fn hirzebruch_jung(mut n: i64, mut d: i64) -> Vec<i64> {
    assert!(n > d && d >= 1, "need n > d >= 1");
    let mut coeffs = Vec::new();
    loop {
        let a = (n + d - 1) / d; // ceil(n / d)
        coeffs.push(a);
        let next_n = d;
        let next_d = a * d - n;
        if next_d == 0 {
            break;
        }
        n = next_n;
        d = next_d;
    }
    coeffs
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The star graph `fpp(n)`: `n² + n + 1` arms of length `n - 1`, all framed
/// `-2`, around a node framed `-n² - n - 2`. For `n = 2` the arms collapse to
/// single leaves.
///
/// The decorated variants `fpp(n)_l` are reconstructed from their
/// configurations; see [`crate::families::fpp_graph`].
pub fn fpp_graph(n: i64) -> Result<PlumbingTree> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("fpp needs n >= 2, got {n}")));
    }
    let arms = n * n + n + 1;
    let mut vertices = vec![("c".to_string(), -(n * n + n + 2))];
    let mut edges = Vec::new();
    for arm in 1..=arms {
        let mut prev = "c".to_string();
        for pos in 1..n {
            let id = format!("a{arm}_{pos}");
            vertices.push((id.clone(), -2));
            edges.push((prev.clone(), id.clone()));
            prev = id;
        }
    }
    PlumbingTree::new(vertices, edges)
}

/// The three blowup families of minimal symplectic plumbing trees that are
/// not otherwise classified. Members arise from the seed star by blowups next
/// to the unique `-1` vertex, after which that vertex's framing is changed to
/// `-4`, `-3`, `-2` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbcFamily {
    A,
    B,
    C,
}

impl AbcFamily {
    /// Seed arm framings `(a, b, c)`.
    pub fn seed(self) -> (i64, i64, i64) {
        match self {
            AbcFamily::A => (3, 3, 3),
            AbcFamily::B => (2, 4, 4),
            AbcFamily::C => (2, 3, 6),
        }
    }

    /// Final framing replacing the `-1` vertex.
    pub fn final_framing(self) -> i64 {
        match self {
            AbcFamily::A => -4,
            AbcFamily::B => -3,
            AbcFamily::C => -2,
        }
    }
}

/// A blowup site adjacent to the current `-1` vertex: either one of its
/// incident edges (indexed in neighbour order) or the vertex itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupSite {
    /// `Edge(k)`: the k-th edge (0-based) incident to the `-1` vertex,
    /// ordered by neighbour vertex index.
    Edge(usize),
    /// A free point on the `-1` curve: appends a new `-1` leaf.
    Vertex,
}

/// Generate a member of the `𝒜/ℬ/𝒞` family from a blowup word.
///
/// The seed is the star with central vertex framed `-1` and three leaves
/// framed `-a, -b, -c` per [`AbcFamily::seed`]; each blowup either subdivides
/// an edge incident to the current `-1` vertex (decrementing both endpoints)
/// or blows up a free point of it (appending a fresh `-1` leaf and
/// decrementing the old vertex). The final `-1` framing is then replaced per
/// family.
pub fn abc_generate(family: AbcFamily, word: &[BlowupSite]) -> Result<PlumbingTree> {
    let (a, b, c) = family.seed();
    let mut tree = PlumbingTree::new(
        vec![
            ("o".to_string(), -1),
            ("a1".to_string(), -a),
            ("a2".to_string(), -b),
            ("a3".to_string(), -c),
        ],
        vec![
            ("o".to_string(), "a1".to_string()),
            ("o".to_string(), "a2".to_string()),
            ("o".to_string(), "a3".to_string()),
        ],
    )?;
    let mut minus_one = 0usize;
    let mut fresh = 0usize;
    for (step, site) in word.iter().enumerate() {
        debug_assert_eq!(tree.framing(minus_one), -1);
        fresh += 1;
        let new_label = format!("b{fresh}");
        match *site {
            BlowupSite::Vertex => {
                let mut vertices: Vec<(String, i64)> = tree
                    .vertices()
                    .map(|v| {
                        let e = if v == minus_one {
                            tree.framing(v) - 1
                        } else {
                            tree.framing(v)
                        };
                        (tree.label(v).to_string(), e)
                    })
                    .collect();
                let mut edges: Vec<(String, String)> = tree
                    .edges()
                    .map(|(x, y)| (tree.label(x).to_string(), tree.label(y).to_string()))
                    .collect();
                let old_label = tree.label(minus_one).to_string();
                vertices.push((new_label.clone(), -1));
                edges.push((old_label, new_label.clone()));
                tree = PlumbingTree::new(vertices, edges)?;
                minus_one = tree.vertex_by_label(&new_label)?;
            }
            BlowupSite::Edge(k) => {
                let adj = tree.adjacency();
                let mut nbs = adj[minus_one].clone();
                nbs.sort_unstable();
                let &other = nbs.get(k).ok_or_else(|| {
                    Error::InvalidParams(format!(
                        "step {step}: edge index {k} out of range (degree {})",
                        nbs.len()
                    ))
                })?;
                let mut vertices: Vec<(String, i64)> = tree
                    .vertices()
                    .map(|v| {
                        let e = if v == minus_one || v == other {
                            tree.framing(v) - 1
                        } else {
                            tree.framing(v)
                        };
                        (tree.label(v).to_string(), e)
                    })
                    .collect();
                let mut edges: Vec<(String, String)> = tree
                    .edges()
                    .filter(|&(x, y)| norm_edge(x, y) != norm_edge(minus_one, other))
                    .map(|(x, y)| (tree.label(x).to_string(), tree.label(y).to_string()))
                    .collect();
                vertices.push((new_label.clone(), -1));
                edges.push((tree.label(minus_one).to_string(), new_label.clone()));
                edges.push((tree.label(other).to_string(), new_label.clone()));
                tree = PlumbingTree::new(vertices, edges)?;
                minus_one = tree.vertex_by_label(&new_label)?;
            }
        }
    }
    // replace the final -1 framing per family
    let mut vertices: Vec<(String, i64)> = tree
        .vertices()
        .map(|v| {
            let e = if v == minus_one {
                family.final_framing()
            } else {
                tree.framing(v)
            };
            (tree.label(v).to_string(), e)
        })
        .collect();
    let edges: Vec<(String, String)> = tree
        .edges()
        .map(|(x, y)| (tree.label(x).to_string(), tree.label(y).to_string()))
        .collect();
    vertices.sort_by(|x, y| x.0.cmp(&y.0));
    PlumbingTree::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sketch(vertices: Vec<(&str, i64)>, edges: Vec<(&str, &str, i64)>) -> EdgeSketch {
        EdgeSketch {
            vertices: vertices
                .into_iter()
                .map(|(id, framing)| VertexJson {
                    id: id.into(),
                    framing,
                })
                .collect(),
            edges: edges
                .into_iter()
                .map(|(a, b, label)| SketchEdge {
                    a: a.into(),
                    b: b.into(),
                    label,
                })
                .collect(),
        }
    }

    #[test]
    fn expand_positive_label() {
        let s = sketch(vec![("a", -5), ("b", -3)], vec![("a", "b", 2)]);
        let t = expand_sketch(&s).unwrap();
        assert_eq!(t.len(), 4);
        let mut framings: Vec<i64> = t.framings().to_vec();
        framings.sort_unstable();
        assert_eq!(framings, vec![-5, -3, -2, -2]);
        // path shape: endpoints a (-5) and b (-3), two -2 vertices in between
        let a = t.vertex_by_label("a").unwrap();
        let b = t.vertex_by_label("b").unwrap();
        assert_eq!(t.path_between(a, b).unwrap().len(), 4);
    }

    #[test]
    fn expand_zero_label_is_plain_edge() {
        let s = sketch(vec![("a", -5), ("b", -3)], vec![("a", "b", 0)]);
        let t = expand_sketch(&s).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.has_edge(0, 1));
    }

    #[test]
    fn expand_merge_label() {
        let s = sketch(vec![("a", -5), ("b", -3)], vec![("a", "b", -1)]);
        let t = expand_sketch(&s).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.framing(0), -5 + -3 + 2);
    }

    #[test]
    fn expand_rejects_bad_label() {
        let s = sketch(vec![("a", -5), ("b", -3)], vec![("a", "b", -2)]);
        assert!(matches!(expand_sketch(&s), Err(Error::BadEdgeLabel(-2))));
    }

    #[test]
    fn stats_examples() {
        let t = PlumbingTree::linear(&[4]);
        let s = t.stats(0).unwrap();
        assert_eq!(
            (s.degree, s.framing, s.is_node, s.is_leaf, s.is_large_node),
            (0, -4, false, false, true)
        );

        let t = PlumbingTree::linear(&[5, 2]);
        let s = t.stats(0).unwrap();
        assert_eq!(
            (s.degree, s.framing, s.is_node, s.is_leaf, s.is_large_node),
            (1, -5, false, true, true)
        );

        // fpp(2): the node has degree 7 and framing -8, so deg + e = -1 and
        // it is *not* a large node.
        let t = fpp_graph(2).unwrap();
        let node = t.vertex_by_label("c").unwrap();
        let s = t.stats(node).unwrap();
        assert_eq!(
            (s.degree, s.framing, s.is_node, s.is_leaf, s.is_large_node),
            (7, -8, true, false, false)
        );
    }

    #[test]
    fn delta_examples() {
        assert_eq!(PlumbingTree::linear(&[4]).delta(), 2);
        assert_eq!(PlumbingTree::linear(&[5, 2]).delta(), 2);
        assert_eq!(PlumbingTree::linear(&[2]).delta(), 0);
    }

    #[test]
    fn path_examples() {
        let t = PlumbingTree::linear(&[5, 2]);
        assert_eq!(t.path_between(1, 0).unwrap(), vec![1, 0]);
        assert_eq!(t.path_between(0, 0).unwrap(), vec![0]);

        let t = fpp_graph(2).unwrap();
        let l1 = t.vertex_by_label("a1_1").unwrap();
        let l2 = t.vertex_by_label("a2_1").unwrap();
        let c = t.vertex_by_label("c").unwrap();
        assert_eq!(t.path_between(l1, l2).unwrap(), vec![l1, c, l2]);
    }

    #[test]
    fn contract_examples() {
        let t = PlumbingTree::linear(&[5, 2]);
        let (t2, m) = t.contract_edge(0, 1, -4).unwrap();
        assert_eq!(t2.len(), 1);
        assert_eq!(t2.framing(m), -4);

        let t = PlumbingTree::linear(&[2, 2, 2]);
        let (t2, _) = t.contract_edge(1, 2, -3).unwrap();
        assert_eq!(t2.len(), 2);
        let mut f = t2.framings().to_vec();
        f.sort_unstable();
        assert_eq!(f, vec![-3, -2]);

        let star = fpp_graph(2).unwrap();
        let c = star.vertex_by_label("c").unwrap();
        let leaf = star.vertex_by_label("a1_1").unwrap();
        let (t2, m) = star.contract_edge(c, leaf, -7).unwrap();
        assert_eq!(t2.len(), 7);
        assert_eq!(t2.framing(m), -7);
        assert_eq!(t2.degree(m), 6);
    }

    #[test]
    fn hj_fraction_examples() {
        assert_eq!(linear_from_fraction(2, 1).unwrap().framings(), &[-4]);
        assert_eq!(linear_from_fraction(3, 1).unwrap().framings(), &[-5, -2]);
        assert_eq!(linear_from_fraction(3, 2).unwrap().framings(), &[-2, -5]);
        assert!(linear_from_fraction(4, 2).is_err());
    }

    #[test]
    fn hj_evaluates_back() {
        // evaluated as a continued fraction, the output equals p²/(pq-1)
        for p in 2..=50i64 {
            for q in 1..p {
                if gcd(p, q) != 1 {
                    continue;
                }
                let coeffs = hirzebruch_jung(p * p, p * q - 1);
                assert!(coeffs.iter().all(|&a| a >= 2), "({p},{q}): {coeffs:?}");
                // evaluate a1 - 1/(a2 - ...) as an exact fraction
                let (mut num, mut den) = (coeffs[coeffs.len() - 1], 1i64);
                for &a in coeffs[..coeffs.len() - 1].iter().rev() {
                    let (n2, d2) = (a * num - den, num);
                    num = n2;
                    den = d2;
                }
                let g = gcd(num, den);
                assert_eq!(
                    (num / g, den / g),
                    ((p * p) / gcd(p * p, p * q - 1), (p * q - 1) / gcd(p * p, p * q - 1)),
                    "({p},{q})"
                );
            }
        }
    }

    #[test]
    fn fpp_shapes() {
        let t = fpp_graph(2).unwrap();
        assert_eq!(t.len(), 8);
        let c = t.vertex_by_label("c").unwrap();
        assert_eq!(t.framing(c), -8);
        assert_eq!(t.degree(c), 7);

        let t = fpp_graph(3).unwrap();
        assert_eq!(t.len(), 1 + 13 * 2);
        let c = t.vertex_by_label("c").unwrap();
        assert_eq!(t.framing(c), -14);
        assert_eq!(t.degree(c), 13);
    }

    #[test]
    fn abc_seeds() {
        let t = abc_generate(AbcFamily::A, &[]).unwrap();
        assert_eq!(t.len(), 4);
        let o = t.vertex_by_label("o").unwrap();
        assert_eq!(t.framing(o), -4);
        assert_eq!(t.degree(o), 3);

        let t = abc_generate(AbcFamily::C, &[]).unwrap();
        let o = t.vertex_by_label("o").unwrap();
        assert_eq!(t.framing(o), -2);
        let mut arms: Vec<i64> = t
            .vertices()
            .filter(|&v| v != o)
            .map(|v| t.framing(v))
            .collect();
        arms.sort_unstable();
        assert_eq!(arms, vec![-6, -3, -2]);
    }

    #[test]
    fn abc_vertex_blowup_blows_back_down() {
        let t = abc_generate(AbcFamily::B, &[BlowupSite::Vertex]).unwrap();
        assert_eq!(t.len(), 5);
        // undo the final framing change, blow the new leaf down, recover the seed
        let leaf = t.vertex_by_label("b1").unwrap();
        assert_eq!(t.framing(leaf), AbcFamily::B.final_framing());
        let o = t.vertex_by_label("o").unwrap();
        assert_eq!(t.framing(o), -2);
        assert_eq!(t.degree(o), 4);
    }

    #[test]
    fn json_round_trip() {
        let t = fpp_graph(2).unwrap();
        let json = t.to_json();
        let back = PlumbingTree::from_json(&json).unwrap();
        assert_eq!(t, back);
        let s: String = serde_json::to_string(&json).unwrap();
        let parsed: GraphJson = serde_json::from_str(&s).unwrap();
        assert_eq!(PlumbingTree::from_json(&parsed).unwrap(), t);
    }
}
