//! Sandwich presentations: a resolution graph together with curvetta data
//! (one curve per added `-1` leaf), the target Gram matrix, and the
//! operations relating presentations with different end vertices.
//!
//! For a minimal rational graph with smooth branches, the presentation adds
//! `-(deg(v) + e(v)) - 1` curvetta leaves at the chosen end vertex `v` and
//! `-(deg(w) + e(w))` at every other vertex; the curve on `w` has size
//! `|p(w, v)| + 1` and two curves intersect in `|p(w, v) ∩ p(z, v)|` points.
//! Star-shaped families with cusp curvettas are built from blowup clusters
//! in [`star`].

pub mod cluster;
pub mod star;

pub use cluster::{blowdown_cluster, noether_gram, BlowupCluster, Branch, ClusterPoint, NoetherData};
pub use star::{star_presentation, sweep_instances, StarFamily, StarFamilyInstance};

use serde::{Deserialize, Serialize};

use crate::graph::{PlumbingTree, VertexId};
use crate::lattice;
use crate::solver::{validate, Configuration, CurveSupport};
use crate::{Error, Result};

/// Local analytic type of a curvetta branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchKind {
    Smooth,
    /// Ordinary cusp: multiplicity sequence `(2, 1, ..., 1)`, realized in
    /// configurations by exactly one double point.
    Cusp,
}

/// One curvetta of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub name: String,
    pub vertex: VertexId,
    /// Size with multiplicity: the decoration `l(i)`.
    pub size: i64,
    pub kind: BranchKind,
}

/// A sandwich presentation: the base graph, the end vertex of the blowdown,
/// the curvetta list, and the target Gram matrix (diagonal entries equal the
/// curve sizes `l(i)`; off-diagonal entries are the prescribed pairwise
/// intersection numbers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichPresentation {
    pub base: PlumbingTree,
    pub end: VertexId,
    pub curves: Vec<CurveSpec>,
    pub gram: Vec<Vec<i64>>,
}

impl SandwichPresentation {
    pub fn curve_count(&self, v: VertexId) -> usize {
        self.curves.iter().filter(|c| c.vertex == v).count()
    }

    pub fn curve_indices_at(&self, v: VertexId) -> Vec<usize> {
        (0..self.curves.len())
            .filter(|&i| self.curves[i].vertex == v)
            .collect()
    }

    /// The presentation graph `Γ̃`: the base plus one `-1` leaf per curve.
    /// Returns the larger tree and, per curve, the id of its leaf.
    pub fn tilde(&self) -> (PlumbingTree, Vec<VertexId>) {
        let mut vertices: Vec<(String, i64)> = self
            .base
            .vertices()
            .map(|v| (self.base.label(v).to_string(), self.base.framing(v)))
            .collect();
        let mut edges: Vec<(String, String)> = self
            .base
            .edges()
            .map(|(a, b)| (self.base.label(a).to_string(), self.base.label(b).to_string()))
            .collect();
        let mut leaf_labels = Vec::new();
        for curve in &self.curves {
            let label = format!("~{}", curve.name);
            vertices.push((label.clone(), -1));
            edges.push((self.base.label(curve.vertex).to_string(), label.clone()));
            leaf_labels.push(label);
        }
        let tilde = PlumbingTree::new(vertices, edges).expect("tilde is a tree");
        let leaves = leaf_labels
            .iter()
            .map(|l| tilde.vertex_by_label(l).expect("leaf exists"))
            .collect();
        (tilde, leaves)
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            graph: self.base.to_json(),
            end: self.base.label(self.end).to_string(),
            curves: self
                .curves
                .iter()
                .map(|c| CurveSpecJson {
                    name: c.name.clone(),
                    vertex: self.base.label(c.vertex).to_string(),
                    size: c.size,
                    kind: c.kind,
                })
                .collect(),
            gram: self.gram.clone(),
        }
    }

    pub fn from_json(json: &PresentationJson) -> Result<Self> {
        let base = PlumbingTree::from_json(&json.graph)?;
        let end = base.vertex_by_label(&json.end)?;
        let curves = json
            .curves
            .iter()
            .map(|c| {
                Ok(CurveSpec {
                    name: c.name.clone(),
                    vertex: base.vertex_by_label(&c.vertex)?,
                    size: c.size,
                    kind: c.kind,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = curves.len();
        if json.gram.len() != n || json.gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPresentation("gram size mismatch".into()));
        }
        Ok(SandwichPresentation {
            base,
            end,
            curves,
            gram: json.gram.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationJson {
    pub graph: crate::graph::GraphJson,
    pub end: String,
    pub curves: Vec<CurveSpecJson>,
    pub gram: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpecJson {
    pub name: String,
    pub vertex: String,
    pub size: i64,
    pub kind: BranchKind,
}

/// The smooth-branch sandwich presentation of a minimal rational graph,
/// ending at `v`. Curve counts are `-(deg + e)` away from the end and one
/// less at `v`; errors when any required count is negative or the graph is
/// not minimal rational.
pub fn presentation_smooth(tree: &PlumbingTree, v: VertexId) -> Result<SandwichPresentation> {
    if v >= tree.len() {
        return Err(Error::UnknownVertex(format!("#{v}")));
    }
    if !tree.all_framings_at_most(-2) {
        return Err(Error::InvalidPresentation(
            "graph is not minimal (framing > -2)".into(),
        ));
    }
    let form = lattice::intersection_matrix(tree);
    if !form.is_negative_definite() {
        return Err(Error::InvalidPresentation(
            "intersection form is not negative definite".into(),
        ));
    }
    if !tree.is_rational() {
        return Err(Error::InvalidPresentation("graph is not rational".into()));
    }
    let mut curves = Vec::new();
    for w in tree.vertices() {
        let mut count = -(tree.degree(w) as i64 + tree.framing(w));
        if w == v {
            count -= 1;
        }
        if count < 0 {
            return Err(Error::InvalidPresentation(format!(
                "vertex `{}` requires {count} curves",
                tree.label(w)
            )));
        }
        let size = tree.path_between(w, v)?.len() as i64 + 1;
        for j in 1..=count {
            curves.push(CurveSpec {
                name: format!("C_{}^{}", tree.label(w), j),
                vertex: w,
                size,
                kind: BranchKind::Smooth,
            });
        }
    }
    let gram = gram_smooth_from_curves(tree, v, &curves)?;
    Ok(SandwichPresentation {
        base: tree.clone(),
        end: v,
        curves,
        gram,
    })
}

/// Build the smooth presentation matching a configuration's curve order and
/// vertex assignments, inferring the end vertex from the curve counts: the
/// unique vertex carrying one curve fewer than its blowdown requirement.
pub fn presentation_for_config(
    tree: &PlumbingTree,
    config: &Configuration,
) -> Result<SandwichPresentation> {
    let mut counts = vec![0usize; tree.len()];
    for c in &config.curves {
        let v = tree.vertex_by_label(&c.vertex)?;
        counts[v] += 1;
    }
    let mut end = None;
    for v in tree.vertices() {
        let required = -(tree.degree(v) as i64 + tree.framing(v));
        if counts[v] as i64 == required - 1 {
            if end.is_some() {
                return Err(Error::InvalidPresentation(
                    "ambiguous end vertex for the configuration".into(),
                ));
            }
            end = Some(v);
        } else if counts[v] as i64 != required {
            return Err(Error::InvalidPresentation(format!(
                "vertex `{}` carries {} curves but the blowdown needs {required}",
                tree.label(v),
                counts[v]
            )));
        }
    }
    let end = end.ok_or_else(|| {
        Error::InvalidPresentation("no vertex qualifies as the end of the blowdown".into())
    })?;
    let curves: Vec<CurveSpec> = config
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let vertex = tree.vertex_by_label(&c.vertex)?;
            Ok(CurveSpec {
                name: format!("C{}", i + 1),
                vertex,
                size: tree.path_between(vertex, end)?.len() as i64 + 1,
                kind: BranchKind::Smooth,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gram = gram_smooth_from_curves(tree, end, &curves)?;
    Ok(SandwichPresentation {
        base: tree.clone(),
        end,
        curves,
        gram,
    })
}

/// The Gram matrix of a smooth presentation: `G_ii = |p(w_i, v)| + 1` and
/// `G_ij = |p(w_i, v) ∩ p(w_j, v)|` (two curves on the same vertex use the
/// same path twice).
pub fn gram_smooth(presentation: &SandwichPresentation) -> Result<Vec<Vec<i64>>> {
    gram_smooth_from_curves(&presentation.base, presentation.end, &presentation.curves)
}

fn gram_smooth_from_curves(
    tree: &PlumbingTree,
    end: VertexId,
    curves: &[CurveSpec],
) -> Result<Vec<Vec<i64>>> {
    let paths: Vec<std::collections::BTreeSet<VertexId>> = curves
        .iter()
        .map(|c| {
            tree.path_between(c.vertex, end)
                .map(|p| p.into_iter().collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let k = curves.len();
    let mut gram = vec![vec![0i64; k]; k];
    for i in 0..k {
        gram[i][i] = paths[i].len() as i64 + 1;
        for j in 0..i {
            let common = paths[i].intersection(&paths[j]).count() as i64;
            gram[i][j] = common;
            gram[j][i] = common;
        }
    }
    Ok(gram)
}

/// The Scott incidence: one point per vertex of `Γ` plus one free point per
/// curve; the curve on `w` consists of the vertices of `p(w, v)` and its own
/// free point. The result validates against the presentation with
/// `μ = |Γ|`.
pub fn scott_incidence(presentation: &SandwichPresentation) -> Result<Configuration> {
    if presentation.curves.iter().any(|c| c.kind != BranchKind::Smooth) {
        return Err(Error::InvalidPresentation(
            "scott incidence requires smooth branches".into(),
        ));
    }
    let tree = &presentation.base;
    let mut points: Vec<String> = tree.vertices().map(|v| tree.label(v).to_string()).collect();
    let mut curves = Vec::new();
    for (i, spec) in presentation.curves.iter().enumerate() {
        let free = format!("f{}", i + 1);
        points.push(free);
        let mut support: std::collections::BTreeMap<usize, u32> = tree
            .path_between(spec.vertex, presentation.end)?
            .into_iter()
            .map(|v| (v, 1))
            .collect();
        support.insert(tree.len() + i, 1);
        curves.push(CurveSupport {
            vertex: tree.label(spec.vertex).to_string(),
            support,
        });
    }
    let config = Configuration { points, curves };
    let report = validate(&config, presentation)?;
    if !report.valid {
        return Err(Error::InvalidConfiguration(format!(
            "scott incidence failed validation: {:?}",
            report.violations
        )));
    }
    debug_assert_eq!(report.mu, tree.len() as i64);
    Ok(config)
}

/// Move the end of a presentation from `v` to `w` (which must satisfy
/// `deg(w) + e(w) < 0`), transporting a configuration along: the chosen
/// curve at `w` becomes the new curve at `v`, and every other curve is
/// replaced by its symmetric difference with the chosen one. The transported
/// configuration is validated against the new presentation before returning.
pub fn switch_end(
    presentation: &SandwichPresentation,
    config: &Configuration,
    w: VertexId,
    chosen_curve: usize,
) -> Result<(SandwichPresentation, Configuration)> {
    let tree = &presentation.base;
    if w >= tree.len() {
        return Err(Error::UnknownVertex(format!("#{w}")));
    }
    if w == presentation.end {
        return Err(Error::InvalidParams("switch target is already the end".into()));
    }
    if tree.degree(w) as i64 + tree.framing(w) >= 0 {
        return Err(Error::InvalidParams(format!(
            "vertex `{}` has deg + e >= 0, cannot host the end",
            tree.label(w)
        )));
    }
    if chosen_curve >= presentation.curves.len()
        || presentation.curves[chosen_curve].vertex != w
    {
        return Err(Error::InvalidParams(format!(
            "curve {chosen_curve} does not lie on `{}`",
            tree.label(w)
        )));
    }
    if presentation
        .curves
        .iter()
        .any(|c| c.kind != BranchKind::Smooth)
    {
        return Err(Error::InvalidPresentation(
            "switch_end requires smooth branches".into(),
        ));
    }
    let report = validate(config, presentation)?;
    if !report.valid {
        return Err(Error::InvalidConfiguration(format!(
            "input configuration invalid: {:?}",
            report.violations
        )));
    }

    // curve order is preserved; the chosen curve moves to the old end vertex
    let old_end = presentation.end;
    let new_curves: Vec<CurveSpec> = presentation
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let vertex = if i == chosen_curve { old_end } else { c.vertex };
            CurveSpec {
                name: c.name.clone(),
                vertex,
                size: tree
                    .path_between(vertex, w)
                    .map(|p| p.len() as i64 + 1)
                    .expect("vertices exist"),
                kind: BranchKind::Smooth,
            }
        })
        .collect();
    let gram = gram_smooth_from_curves(tree, w, &new_curves)?;
    let new_presentation = SandwichPresentation {
        base: tree.clone(),
        end: w,
        curves: new_curves,
        gram,
    };

    let chosen_support = config.curves[chosen_curve].support.clone();
    let new_supports: Vec<CurveSupport> = config
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == chosen_curve {
                CurveSupport {
                    vertex: tree.label(old_end).to_string(),
                    support: chosen_support.clone(),
                }
            } else {
                // symmetric difference of 0/1 supports
                let mut support = c.support.clone();
                for (&p, _) in &chosen_support {
                    if support.remove(&p).is_none() {
                        support.insert(p, 1);
                    }
                }
                CurveSupport {
                    vertex: c.vertex.clone(),
                    support,
                }
            }
        })
        .collect();
    let new_config = Configuration {
        points: config.points.clone(),
        curves: new_supports,
    };
    let report = validate(&new_config, &new_presentation)?;
    if !report.valid {
        return Err(Error::InvalidConfiguration(format!(
            "switched configuration invalid: {:?}",
            report.violations
        )));
    }
    Ok((new_presentation, new_config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;
    use crate::solver::{solve, SolveMode};

    #[test]
    fn presentation_counts() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        assert_eq!(pres.curves.len(), 3);
        assert!(pres.curves.iter().all(|c| c.size == 2));

        let tree = PlumbingTree::linear(&[5, 2]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        assert_eq!(pres.curve_count(0), 3);
        assert_eq!(pres.curve_count(1), 1);
        let sizes: Vec<i64> = pres.curves.iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![2, 2, 2, 3]);

        let tree = graph::fpp_graph(2).unwrap();
        let node = tree.vertex_by_label("c").unwrap();
        let pres = presentation_smooth(&tree, node).unwrap();
        assert_eq!(pres.curve_count(node), 0);
        assert_eq!(pres.curves.len(), 7);
        assert!(pres.curves.iter().all(|c| c.size == 3));
    }

    #[test]
    fn gram_values() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        assert_eq!(pres.gram, vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);

        let tree = PlumbingTree::linear(&[5, 2]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        for i in 0..4 {
            for j in 0..i {
                assert_eq!(pres.gram[i][j], 1);
            }
        }
        assert_eq!(pres.gram[3][3], 3);

        let tree = graph::fpp_graph(2).unwrap();
        let node = tree.vertex_by_label("c").unwrap();
        let pres = presentation_smooth(&tree, node).unwrap();
        for i in 0..7 {
            assert_eq!(pres.gram[i][i], 3);
            for j in 0..i {
                assert_eq!(pres.gram[i][j], 1);
            }
        }
    }

    #[test]
    fn scott_examples() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let scott = scott_incidence(&pres).unwrap();
        assert_eq!(scott.points.len(), 4);
        assert_eq!(scott.mu(), 1);

        let tree = PlumbingTree::linear(&[5, 2]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let scott = scott_incidence(&pres).unwrap();
        assert_eq!(scott.points.len(), 6);
        assert_eq!(scott.mu(), 2);

        let tree = graph::fpp_graph(2).unwrap();
        let node = tree.vertex_by_label("c").unwrap();
        let pres = presentation_smooth(&tree, node).unwrap();
        let scott = scott_incidence(&pres).unwrap();
        assert_eq!(scott.points.len(), 15);
        assert_eq!(scott.mu(), 8);
    }

    #[test]
    fn switch_example_and_involution() {
        let tree = PlumbingTree::linear(&[5, 2]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let out = solve(&pres, &SolveMode::first_mu0()).unwrap();
        let config = out.solutions[0].clone();
        let chosen = pres.curve_indices_at(1)[0];
        let (pres2, config2) = switch_end(&pres, &config, 1, chosen).unwrap();
        assert_eq!(pres2.end, 1);
        assert_eq!(pres2.curve_count(1), 0);
        assert_eq!(pres2.curve_count(0), 4);
        // switching back with the same curve restores the original
        let (pres3, config3) = switch_end(&pres2, &config2, 0, chosen).unwrap();
        assert_eq!(pres3.end, 0);
        assert_eq!(config3, config);
        assert_eq!(pres3.gram, pres.gram);
    }

    #[test]
    fn switch_rejects_single_vertex() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let out = solve(&pres, &SolveMode::first_mu0()).unwrap();
        assert!(switch_end(&pres, &out.solutions[0], 0, 0).is_err());
    }
}
