//! Exact backtracking search for configurations realizing a target Gram
//! matrix: the combinatorial smoothing problem.
//!
//! A configuration is a finite point set together with an indexed list of
//! multiset curves. Smooth curves have multiplicities in `{0, 1}`; cusp
//! curves carry exactly one double point. A configuration realizes a
//! presentation when every curve's total multiplicity equals its prescribed
//! size and every pairwise bilinear intersection `Σ_p m_p(A) m_p(B)` equals
//! the prescribed Gram entry.
//!
//! The search assigns curves in decreasing size order. Point symmetry is
//! broken by the introduction rule: a new point may only appear as the
//! smallest unused label, so emissions are complete up to point relabeling.
//! Pairwise constraints are propagated incrementally and pruned by running
//! dot products. "No solution" from an exhausted search is a certificate.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::sandwich::{BranchKind, SandwichPresentation};
use crate::{Error, Result};

/// A point/curve incidence configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    /// Point labels; curve supports index into this list.
    pub points: Vec<String>,
    pub curves: Vec<CurveSupport>,
}

/// One curve of a configuration: its vertex assignment in the presentation
/// graph and its multiset of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSupport {
    pub vertex: String,
    /// point index -> multiplicity (entries are >= 1)
    pub support: BTreeMap<usize, u32>,
}

impl CurveSupport {
    pub fn mass(&self) -> i64 {
        self.support.values().map(|&m| m as i64).sum()
    }

    pub fn dot(&self, other: &CurveSupport) -> i64 {
        self.support
            .iter()
            .filter_map(|(p, &m)| other.support.get(p).map(|&m2| m as i64 * m2 as i64))
            .sum()
    }

    /// Exactly one double point, all other multiplicities 1.
    pub fn is_cusp_pattern(&self) -> bool {
        let doubles = self.support.values().filter(|&&m| m == 2).count();
        doubles == 1 && self.support.values().all(|&m| m == 1 || m == 2)
    }

    pub fn is_smooth_pattern(&self) -> bool {
        self.support.values().all(|&m| m == 1)
    }

    /// The double point of a cusp row, if any.
    pub fn double_point(&self) -> Option<usize> {
        self.support.iter().find(|(_, &m)| m == 2).map(|(&p, _)| p)
    }
}

impl Configuration {
    pub fn mu(&self) -> i64 {
        self.points.len() as i64 - self.curves.len() as i64
    }

    /// Points lying on exactly one curve, with multiplicity 1.
    pub fn free_points(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&p| {
                let mut total = 0i64;
                let mut curves = 0usize;
                for c in &self.curves {
                    if let Some(&m) = c.support.get(&p) {
                        total += m as i64;
                        curves += 1;
                    }
                }
                curves == 1 && total == 1
            })
            .collect()
    }

    pub fn point_index(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::InvalidConfiguration(format!("unknown point `{label}`")))
    }

    pub fn to_json(&self) -> ConfigurationJson {
        ConfigurationJson {
            points: self.points.clone(),
            curves: self
                .curves
                .iter()
                .map(|c| CurveJson {
                    vertex: c.vertex.clone(),
                    support: c
                        .support
                        .iter()
                        .map(|(&p, &m)| (self.points[p].clone(), m))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ConfigurationJson) -> Result<Self> {
        let index: BTreeMap<&String, usize> = json
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        if index.len() != json.points.len() {
            return Err(Error::InvalidConfiguration("duplicate point label".into()));
        }
        let curves = json
            .curves
            .iter()
            .map(|c| {
                let mut support = BTreeMap::new();
                for (label, &m) in &c.support {
                    let &i = index.get(label).ok_or_else(|| {
                        Error::InvalidConfiguration(format!("unknown point `{label}`"))
                    })?;
                    if m == 0 {
                        return Err(Error::InvalidConfiguration("zero multiplicity".into()));
                    }
                    support.insert(i, m);
                }
                Ok(CurveSupport {
                    vertex: c.vertex.clone(),
                    support,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Configuration {
            points: json.points.clone(),
            curves,
        })
    }
}

/// Serialized form of a configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigurationJson {
    pub points: Vec<String>,
    pub curves: Vec<CurveJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveJson {
    pub vertex: String,
    pub support: BTreeMap<String, u32>,
}

/// The multiplicity matrix `I` (rows = curves, columns = points).
/// For valid configurations `I·Iᵀ` reproduces the Gram matrix off the
/// diagonal; a diagonal entry is `l(i)` plus 2 when row `i` is a cusp.
pub fn incidence_matrix(config: &Configuration) -> Vec<Vec<i64>> {
    config
        .curves
        .iter()
        .map(|c| {
            (0..config.points.len())
                .map(|p| c.support.get(&p).map_or(0, |&m| m as i64))
                .collect()
        })
        .collect()
}

/// Outcome of validating a configuration against a presentation.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub mu: i64,
    pub free_points: Vec<String>,
    pub violations: Vec<String>,
}

/// Check a configuration against a presentation: curve count and vertex
/// assignment, multiplicity patterns, row masses, and all pairwise bilinear
/// intersections.
pub fn validate(
    config: &Configuration,
    presentation: &SandwichPresentation,
) -> Result<ValidationReport> {
    if config.curves.len() != presentation.curves.len() {
        return Err(Error::InvalidConfiguration(format!(
            "{} curves in configuration, {} in presentation",
            config.curves.len(),
            presentation.curves.len()
        )));
    }
    let mut violations = Vec::new();
    for (i, curve) in config.curves.iter().enumerate() {
        let spec = &presentation.curves[i];
        let expected_vertex = presentation.base.label(spec.vertex);
        if curve.vertex != expected_vertex {
            violations.push(format!(
                "curve {i} assigned to `{}`, presentation expects `{expected_vertex}`",
                curve.vertex
            ));
        }
        match spec.kind {
            BranchKind::Smooth => {
                if !curve.is_smooth_pattern() {
                    violations.push(format!("curve {i} is smooth but has a multiple point"));
                }
            }
            BranchKind::Cusp => {
                if !curve.is_cusp_pattern() {
                    violations.push(format!(
                        "curve {i} is a cusp but lacks a unique double point"
                    ));
                }
            }
        }
        if curve.mass() != spec.size {
            violations.push(format!(
                "curve {i} has total multiplicity {}, expected {}",
                curve.mass(),
                spec.size
            ));
        }
        for j in 0..i {
            let dot = curve.dot(&config.curves[j]);
            let want = presentation.gram[i][j];
            if dot != want {
                violations.push(format!("curves {j},{i} intersect {dot}, expected {want}"));
            }
        }
    }
    for p in 0..config.points.len() {
        if config.curves.iter().all(|c| !c.support.contains_key(&p)) {
            violations.push(format!("point `{}` lies on no curve", config.points[p]));
        }
    }
    let free = config
        .free_points()
        .into_iter()
        .map(|p| config.points[p].clone())
        .collect();
    Ok(ValidationReport {
        valid: violations.is_empty(),
        mu: config.mu(),
        free_points: free,
        violations,
    })
}

/// Target rank constraint for the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuTarget {
    /// `|points| = |curves|` exactly (the QHD candidate case).
    Zero,
    /// Any number of points up to the cap.
    Any,
}

/// What the search should emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Emit {
    /// Stop at the first solution.
    First,
    /// Enumerate all solutions up to point relabeling.
    All,
    /// Enumerate and count, discarding the solutions themselves.
    Count,
}

#[derive(Debug, Clone)]
pub struct SolveMode {
    pub mu: MuTarget,
    pub emit: Emit,
    pub timeout: Option<Duration>,
    /// Point cap for `MuTarget::Any`; defaults to the total mass.
    pub max_points: Option<usize>,
}

impl SolveMode {
    pub fn first_mu0() -> Self {
        SolveMode {
            mu: MuTarget::Zero,
            emit: Emit::First,
            timeout: None,
            max_points: None,
        }
    }

    pub fn all_mu0() -> Self {
        SolveMode {
            mu: MuTarget::Zero,
            emit: Emit::All,
            timeout: None,
            max_points: None,
        }
    }
}

/// Search outcome. `exhausted` means the search space was fully explored
/// (modulo an early stop after a `First` hit), so an empty solution list
/// from an exhausted run is a no-solution certificate.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solutions: Vec<Configuration>,
    /// Number of solutions up to point relabeling (exhaustive modes only).
    pub canonical_count: Option<u64>,
    /// Number of solutions over labeled points with the curve order fixed
    /// (exhaustive modes only).
    pub labeled_count: Option<u128>,
    pub exhausted: bool,
    pub timed_out: bool,
}

struct Search<'a> {
    presentation: &'a SandwichPresentation,
    /// curve search order: indices into presentation.curves, decreasing size
    order: Vec<usize>,
    sizes: Vec<i64>,
    kinds: Vec<BranchKind>,
    gram: &'a [Vec<i64>],
    exact_points: Option<usize>,
    point_cap: usize,
    emit: Emit,
    deadline: Option<Instant>,
    // state
    supports: Vec<Vec<(usize, u32)>>, // per order position, (point, mult) sorted
    used: usize,
    // results
    found: BTreeSet<Vec<Vec<(usize, u32)>>>, // canonical column-multiset forms
    solutions: Vec<Configuration>,
    labeled: u128,
    timed_out: bool,
    done: bool,
    ticks: u32,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out || self.done
    }

    fn run(&mut self) {
        self.assign_curve(0);
    }

    fn assign_curve(&mut self, pos: usize) {
        if self.tick() {
            return;
        }
        if pos == self.order.len() {
            if let Some(n) = self.exact_points {
                if self.used != n {
                    return;
                }
            }
            self.record();
            return;
        }
        let curve = self.order[pos];
        let size = self.sizes[curve];
        if self.kinds[curve] == BranchKind::Cusp {
            // the double point comes first
            let top = (self.used + 1).min(self.point_cap);
            for d in 0..top {
                self.start_row(pos, curve, size, Some(d));
                if self.timed_out || self.done {
                    return;
                }
            }
        } else {
            self.start_row(pos, curve, size, None);
        }
    }

    fn start_row(&mut self, pos: usize, curve: usize, size: i64, double: Option<usize>) {
        let simples = size - if double.is_some() { 2 } else { 0 };
        debug_assert!(simples >= 0);
        let mut partial: Vec<(usize, u32)> = Vec::new();
        let introduced = double == Some(self.used);
        if introduced {
            self.used += 1;
        }
        let mut dots = vec![0i64; pos];
        if let Some(d) = double {
            partial.push((d, 2));
            for e in 0..pos {
                dots[e] = 2 * mult_at(&self.supports[e], d);
            }
        }
        self.fill_simples(pos, curve, double, simples, 0, &mut partial, &mut dots);
        if introduced {
            self.used -= 1;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_simples(
        &mut self,
        pos: usize,
        curve: usize,
        double: Option<usize>,
        remaining: i64,
        min_next: usize,
        partial: &mut Vec<(usize, u32)>,
        dots: &mut Vec<i64>,
    ) {
        if self.tick() {
            return;
        }
        for e in 0..pos {
            let g = self.gram[self.order[e]][curve];
            let max_mult = if self.kinds[self.order[e]] == BranchKind::Cusp {
                2
            } else {
                1
            };
            if dots[e] > g || dots[e] + remaining * max_mult < g {
                return;
            }
        }
        if let Some(n) = self.exact_points {
            // every remaining unit of mass introduces at most one new point
            let future_mass: i64 = (pos + 1..self.order.len())
                .map(|p| self.sizes[self.order[p]])
                .sum();
            if (n - self.used) as i64 > remaining + future_mass {
                return;
            }
        }
        if remaining == 0 {
            for e in 0..pos {
                if dots[e] != self.gram[self.order[e]][curve] {
                    return;
                }
            }
            let mut support = partial.clone();
            support.sort_unstable();
            self.supports[pos] = support;
            self.assign_curve(pos + 1);
            self.supports[pos].clear();
            return;
        }
        let top = (self.used + 1).min(self.point_cap);
        for p in min_next..top {
            if double == Some(p) {
                continue;
            }
            let introduces = p == self.used;
            if introduces {
                self.used += 1;
            }
            partial.push((p, 1));
            for e in 0..pos {
                dots[e] += mult_at(&self.supports[e], p);
            }
            self.fill_simples(pos, curve, double, remaining - 1, p + 1, partial, dots);
            for e in 0..pos {
                dots[e] -= mult_at(&self.supports[e], p);
            }
            partial.pop();
            if introduces {
                self.used -= 1;
            }
            if self.timed_out || self.done {
                return;
            }
        }
    }

    fn record(&mut self) {
        // map back to original curve order
        let mut per_curve: Vec<Vec<(usize, u32)>> = vec![Vec::new(); self.order.len()];
        for (pos, &curve) in self.order.iter().enumerate() {
            per_curve[curve] = self.supports[pos].clone();
        }
        // canonical form: sorted multiset of point columns, curve order fixed
        let mut columns: Vec<Vec<(usize, u32)>> = vec![Vec::new(); self.used];
        for (curve, support) in per_curve.iter().enumerate() {
            for &(p, m) in support {
                columns[p].push((curve, m));
            }
        }
        columns.sort();
        if self.found.contains(&columns) {
            return;
        }
        // orbit size under point relabeling: N! / prod over groups of equal
        // columns of (group size)!
        let mut orbit: u128 = (2..=self.used as u128).product();
        let mut i = 0;
        while i < columns.len() {
            let mut j = i + 1;
            while j < columns.len() && columns[j] == columns[i] {
                j += 1;
            }
            let fact: u128 = (2..=(j - i) as u128).product();
            orbit /= fact;
            i = j;
        }
        self.labeled += orbit;
        self.found.insert(columns);
        if matches!(self.emit, Emit::First | Emit::All) {
            let points: Vec<String> = (1..=self.used).map(|i| format!("p{i}")).collect();
            let curves: Vec<CurveSupport> = per_curve
                .iter()
                .enumerate()
                .map(|(i, support)| CurveSupport {
                    vertex: self
                        .presentation
                        .base
                        .label(self.presentation.curves[i].vertex)
                        .to_string(),
                    support: support.iter().copied().collect(),
                })
                .collect();
            self.solutions.push(Configuration { points, curves });
        }
        if self.emit == Emit::First {
            self.done = true;
        }
    }
}

fn mult_at(support: &[(usize, u32)], p: usize) -> i64 {
    match support.binary_search_by_key(&p, |&(q, _)| q) {
        Ok(i) => support[i].1 as i64,
        Err(_) => 0,
    }
}

/// Exhaustive search for configurations realizing the presentation's Gram
/// data. With `Emit::All`/`Emit::Count` the emission is complete up to point
/// relabeling and both the canonical and labeled counts are reported; an
/// exhausted run with no solution is a certificate of non-existence.
/// Timeout is reported distinctly from "no solution".
pub fn solve(presentation: &SandwichPresentation, mode: &SolveMode) -> Result<SolveOutcome> {
    let k = presentation.curves.len();
    let sizes: Vec<i64> = presentation.curves.iter().map(|c| c.size).collect();
    let kinds: Vec<BranchKind> = presentation.curves.iter().map(|c| c.kind).collect();
    for i in 0..k {
        if sizes[i] < 1 || (kinds[i] == BranchKind::Cusp && sizes[i] < 3) {
            return Err(Error::InvalidPresentation(format!(
                "curve {i} has size {}",
                sizes[i]
            )));
        }
        for j in 0..i {
            // bilinear dot of two rows is at most min mass + 1 per cusp side
            let cap = sizes[i].min(sizes[j])
                + if kinds[i] == BranchKind::Cusp { 1 } else { 0 }
                + if kinds[j] == BranchKind::Cusp { 1 } else { 0 };
            if presentation.gram[i][j] < 0 || presentation.gram[i][j] > cap {
                return Err(Error::InvalidPresentation(format!(
                    "gram[{i}][{j}] = {} out of range",
                    presentation.gram[i][j]
                )));
            }
        }
    }
    let total_mass: i64 = sizes.iter().sum();
    let (exact_points, point_cap) = match mode.mu {
        MuTarget::Zero => (Some(k), k),
        MuTarget::Any => (None, mode.max_points.unwrap_or(total_mass as usize)),
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (-sizes[i], i));
    let mut search = Search {
        presentation,
        order,
        sizes,
        kinds,
        gram: &presentation.gram,
        exact_points,
        point_cap,
        emit: mode.emit,
        deadline: mode.timeout.map(|t| Instant::now() + t),
        supports: vec![Vec::new(); k],
        used: 0,
        found: BTreeSet::new(),
        solutions: Vec::new(),
        labeled: 0,
        timed_out: false,
        done: false,
        ticks: 0,
    };
    search.run();
    let counts_valid = !search.timed_out && mode.emit != Emit::First;
    Ok(SolveOutcome {
        solutions: search.solutions,
        canonical_count: counts_valid.then_some(search.found.len() as u64),
        labeled_count: counts_valid.then_some(search.labeled),
        exhausted: !search.timed_out,
        timed_out: search.timed_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PlumbingTree;
    use crate::sandwich::presentation_smooth;

    #[test]
    fn triangle_counts() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let out = solve(&pres, &SolveMode::all_mu0()).unwrap();
        assert!(out.exhausted);
        assert_eq!(out.canonical_count, Some(1));
        assert_eq!(out.labeled_count, Some(6));
        let report = validate(&out.solutions[0], &pres).unwrap();
        assert!(report.valid, "{:?}", report.violations);
        assert_eq!(report.mu, 0);
        assert!(report.free_points.is_empty());
    }

    #[test]
    fn triangle_incidence() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let out = solve(&pres, &SolveMode::first_mu0()).unwrap();
        let config = &out.solutions[0];
        let i = incidence_matrix(config);
        // I·Iᵀ = diag 2, off-diagonal 1
        for a in 0..3 {
            for b in 0..3 {
                let dot: i64 = (0..3).map(|p| i[a][p] * i[b][p]).sum();
                assert_eq!(dot, if a == b { 2 } else { 1 });
            }
        }
    }

    #[test]
    fn constructed_violation() {
        let tree = PlumbingTree::linear(&[4]);
        let pres = presentation_smooth(&tree, 0).unwrap();
        let config = Configuration::from_json(&ConfigurationJson {
            points: vec!["1".into(), "2".into(), "3".into()],
            curves: vec![
                CurveJson {
                    vertex: "v1".into(),
                    support: [("1".to_string(), 1), ("2".to_string(), 1)].into(),
                },
                CurveJson {
                    vertex: "v1".into(),
                    support: [("1".to_string(), 1), ("2".to_string(), 1)].into(),
                },
                CurveJson {
                    vertex: "v1".into(),
                    support: [("1".to_string(), 1), ("3".to_string(), 1)].into(),
                },
            ],
        })
        .unwrap();
        let report = validate(&config, &pres).unwrap();
        assert!(!report.valid);
        assert!(report.violations.iter().any(|v| v.contains("intersect")));
    }

    #[test]
    fn no_solution_star() {
        // star: center -5 with three -2 leaves; mu = 0 has no solution
        let tree = PlumbingTree::new(
            vec![("c", -5), ("l1", -2), ("l2", -2), ("l3", -2)],
            vec![("c", "l1"), ("c", "l2"), ("c", "l3")],
        )
        .unwrap();
        let leaf = tree.vertex_by_label("l1").unwrap();
        let pres = presentation_smooth(&tree, leaf).unwrap();
        let out = solve(&pres, &SolveMode::all_mu0()).unwrap();
        assert!(out.exhausted);
        assert_eq!(out.canonical_count, Some(0));
    }

    #[test]
    fn fano_exists() {
        let tree = crate::graph::fpp_graph(2).unwrap();
        let node = tree.vertex_by_label("c").unwrap();
        let pres = presentation_smooth(&tree, node).unwrap();
        let out = solve(&pres, &SolveMode::first_mu0()).unwrap();
        assert_eq!(out.solutions.len(), 1);
        let report = validate(&out.solutions[0], &pres).unwrap();
        assert!(report.valid, "{:?}", report.violations);
        assert_eq!(report.mu, 0);
    }
}
