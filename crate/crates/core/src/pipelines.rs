//! End-to-end checks and enumeration sweeps: the per-graph necessary
//! condition report, the reduced-candidate sweeps with filter chains, and
//! the star-family existence tables.
//!
//! Sweeps are deterministic and embarrassingly parallel: instances are
//! enumerated in canonical order, processed with a worker pool, and merged
//! back in enumeration order, so results are identical across runs and
//! worker counts. Timeouts are recorded as "unknown", never as "no".

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{enumerate_trees, FramingRule, PlumbingTree, TreeConstraints};
use crate::lattice::{anticanonical, determinant, diagonal_embed, intersection_matrix, Embedding};
use crate::sandwich::{presentation_smooth, star_presentation, sweep_instances, StarFamily};
use crate::solver::{solve, Emit, MuTarget, SolveMode};
use crate::{Error, Result};

/// Aggregated necessary-condition report for one graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub vertices: usize,
    pub delta: i64,
    pub negative_definite: bool,
    pub determinant: String,
    pub det_square: bool,
    pub zk_square: Option<String>,
    pub zk_test: bool,
    pub embedding: Option<Embedding>,
    pub embedding_found: bool,
    /// True when every enabled necessary condition holds.
    pub all_pass: bool,
}

/// Run the lattice-theoretic necessary conditions on a graph: negative
/// definiteness, square determinant, the anticanonical test, and (when
/// requested) the diagonal embedding search.
pub fn check_graph(tree: &PlumbingTree, with_embedding: bool) -> GraphReport {
    let form = intersection_matrix(tree);
    let negative_definite = form.is_negative_definite();
    let (det, det_square) = determinant(&form);
    let (zk_square, zk_test) = if negative_definite {
        match anticanonical(&form) {
            Ok(a) => (Some(a.zk_square.to_string()), a.zk_test),
            Err(_) => (None, false),
        }
    } else {
        (None, false)
    };
    let embedding = if with_embedding && negative_definite {
        diagonal_embed(&form, 0)
    } else {
        None
    };
    let embedding_found = embedding.is_some();
    let all_pass = negative_definite
        && det_square
        && zk_test
        && (!with_embedding || embedding_found);
    GraphReport {
        vertices: tree.len(),
        delta: tree.delta(),
        negative_definite,
        determinant: det.to_string(),
        det_square,
        zk_square,
        zk_test,
        embedding,
        embedding_found,
        all_pass,
    }
}

/// Filters applied by [`corollary_sweep`], in cheap-first order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    NegativeDefinite,
    SquareDet,
    ZkTest,
    Embedding,
    SolveMu0,
}

impl FilterKind {
    pub const DEFAULT_CHAIN: [FilterKind; 5] = [
        FilterKind::NegativeDefinite,
        FilterKind::SquareDet,
        FilterKind::ZkTest,
        FilterKind::Embedding,
        FilterKind::SolveMu0,
    ];
}

/// Specification of an enumeration sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub max_vertices: usize,
    /// Exact node count, if constrained.
    pub node_count: Option<usize>,
    pub leaf_framings: FramingRule,
    pub chain_framings: FramingRule,
    pub node_framings: FramingRule,
    /// Keep only candidates with this `δ`.
    pub delta: Option<i64>,
    pub filters: Vec<FilterKind>,
    /// Per-instance solver budget, in seconds.
    pub timeout_secs: Option<u64>,
}

impl SweepSpec {
    /// The framing constraints of the reduced-graph analysis: `-2` leaves,
    /// chains in `{-2, -3}`, nodes at `-deg - 2`.
    pub fn reduced_candidates(max_vertices: usize, node_count: usize, delta: i64) -> Self {
        SweepSpec {
            max_vertices,
            node_count: Some(node_count),
            leaf_framings: FramingRule::Set(vec![-2]),
            chain_framings: FramingRule::Set(vec![-2, -3]),
            node_framings: FramingRule::MinusDegMinus2,
            delta: Some(delta),
            filters: FilterKind::DEFAULT_CHAIN.to_vec(),
            timeout_secs: Some(300),
        }
    }
}

/// Per-candidate sweep record.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub graph: crate::graph::GraphJson,
    pub delta: i64,
    /// `(filter, passed)` in application order; filters after the first
    /// failure are not run.
    pub outcomes: Vec<(FilterKind, bool)>,
    pub survivor: bool,
    pub budget_exceeded: bool,
    /// Solver witness (a configuration) when the final filter found one.
    pub solution: Option<crate::solver::ConfigurationJson>,
    pub embedding: Option<Embedding>,
}

/// Summary of a sweep run.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub candidates: usize,
    pub survivors: Vec<usize>,
    pub budget_exceeded: Vec<usize>,
    pub per_filter_failures: Vec<(FilterKind, usize)>,
    pub records: Vec<InstanceRecord>,
}

/// Enumerate all trees satisfying the spec and run the filter chain on each
/// candidate. Survivors pass every enabled filter; a candidate whose solver
/// run times out is reported as budget-exceeded, never as a non-survivor.
pub fn corollary_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let constraints = TreeConstraints {
        max_vertices: spec.max_vertices,
        leaf_framings: spec.leaf_framings.clone(),
        chain_framings: spec.chain_framings.clone(),
        node_framings: spec.node_framings.clone(),
        min_nodes: spec.node_count,
        max_nodes: spec.node_count,
    };
    let mut trees = enumerate_trees(&constraints);
    if let Some(delta) = spec.delta {
        trees.retain(|t| t.delta() == delta);
    }
    let records: Vec<InstanceRecord> = trees
        .par_iter()
        .enumerate()
        .map(|(index, tree)| run_filters(index, tree, spec))
        .collect();
    let survivors = records
        .iter()
        .filter(|r| r.survivor)
        .map(|r| r.index)
        .collect();
    let budget_exceeded = records
        .iter()
        .filter(|r| r.budget_exceeded)
        .map(|r| r.index)
        .collect();
    let per_filter_failures = spec
        .filters
        .iter()
        .map(|&f| {
            let failures = records
                .iter()
                .filter(|r| r.outcomes.iter().any(|&(g, pass)| g == f && !pass))
                .count();
            (f, failures)
        })
        .collect();
    Ok(SweepResult {
        candidates: records.len(),
        survivors,
        budget_exceeded,
        per_filter_failures,
        records,
    })
}

fn run_filters(index: usize, tree: &PlumbingTree, spec: &SweepSpec) -> InstanceRecord {
    let form = intersection_matrix(tree);
    let mut outcomes = Vec::new();
    let mut survivor = true;
    let mut budget_exceeded = false;
    let mut solution = None;
    let mut embedding = None;
    for &filter in &spec.filters {
        let pass = match filter {
            FilterKind::NegativeDefinite => form.is_negative_definite(),
            FilterKind::SquareDet => determinant(&form).1,
            FilterKind::ZkTest => anticanonical(&form).map(|a| a.zk_test).unwrap_or(false),
            FilterKind::Embedding => {
                embedding = diagonal_embed(&form, 0);
                embedding.is_some()
            }
            FilterKind::SolveMu0 => {
                // the end vertex choice is immaterial: smoothings transport
                // along end switches
                let end = (0..tree.len())
                    .find(|&v| -(tree.degree(v) as i64 + tree.framing(v)) - 1 >= 0);
                match end.map(|v| presentation_smooth(tree, v)) {
                    Some(Ok(pres)) => {
                        let mode = SolveMode {
                            mu: MuTarget::Zero,
                            emit: Emit::First,
                            timeout: spec.timeout_secs.map(Duration::from_secs),
                            max_points: None,
                        };
                        match solve(&pres, &mode) {
                            Ok(out) if out.timed_out => {
                                budget_exceeded = true;
                                false
                            }
                            Ok(out) => {
                                solution = out.solutions.first().map(|c| c.to_json());
                                !out.solutions.is_empty()
                            }
                            Err(_) => false,
                        }
                    }
                    _ => false,
                }
            }
        };
        outcomes.push((filter, pass));
        if !pass {
            survivor = false;
            break;
        }
    }
    InstanceRecord {
        index,
        graph: tree.to_json(),
        delta: tree.delta(),
        outcomes,
        survivor: survivor && !budget_exceeded,
        budget_exceeded,
        solution,
        embedding,
    }
}

/// Verdict of one star-family solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StarVerdict {
    Solved,
    /// Exhausted the search space without a solution.
    NoSolution,
    /// Budget ran out; existence remains unknown.
    Unknown,
}

/// One row of a star-family existence table.
#[derive(Debug, Clone, Serialize)]
pub struct StarRow {
    pub family: String,
    pub n: usize,
    pub label: String,
    pub verdict: StarVerdict,
    /// Whether the case analysis admits this instance.
    pub expected: bool,
    /// `verdict` agrees with `expected` (unknown never matches).
    pub matches: bool,
    pub solution: Option<crate::solver::ConfigurationJson>,
}

/// Whether the weighted-homogeneous case analysis admits a solution for
/// this instance: the known members always; additionally the second
/// family with lowest index `n - 3` for the `-6`-arm case with three
/// size-2 curves, the two `n - 4` variants for the four-size-3-curves
/// case, and the `n - 3` variant with a neighbouring pair for the mixed
/// case.
pub fn expected_solution(instance: &crate::sandwich::StarFamilyInstance) -> bool {
    if instance.label == "known" {
        return true;
    }
    let n = instance.n;
    let middle: Vec<usize> = instance
        .placement
        .iter()
        .filter(|&(&i, _)| i != n)
        .flat_map(|(&i, &c)| std::iter::repeat(i).take(c))
        .collect();
    // also count curves placed at n beyond the forced end count
    let ell = match middle.first() {
        Some(&e) => e,
        None => return false,
    };
    match instance.family {
        StarFamily::C3 => n >= 4 && ell == n - 3 && middle == vec![ell],
        StarFamily::C2 => {
            n >= 5
                && ell == n - 4
                && (middle == vec![ell, ell] || middle == vec![ell, ell + 3])
        }
        StarFamily::B2 => n >= 4 && ell == n - 3 && middle == vec![ell, ell + 1],
        _ => false,
    }
}

/// Run the solver over every instance of a family up to `n_max`, and compare
/// the verdicts against the case analysis. Exhaustive "no solution" verdicts
/// are certificates; timeouts are reported as unknown.
pub fn star_sweep(
    family: StarFamily,
    n_max: usize,
    timeout: Option<Duration>,
) -> Result<Vec<StarRow>> {
    let mut instances = Vec::new();
    for n in 1..=n_max {
        instances.extend(sweep_instances(family, n));
    }
    let rows: Vec<Result<StarRow>> = instances
        .par_iter()
        .map(|instance| {
            let pres = star_presentation(instance)?;
            let mode = SolveMode {
                mu: MuTarget::Zero,
                emit: Emit::First,
                timeout,
                max_points: None,
            };
            let out = solve(&pres, &mode)?;
            let verdict = if !out.solutions.is_empty() {
                StarVerdict::Solved
            } else if out.exhausted {
                StarVerdict::NoSolution
            } else {
                StarVerdict::Unknown
            };
            let expected = expected_solution(instance);
            let matches = match verdict {
                StarVerdict::Solved => expected,
                StarVerdict::NoSolution => !expected,
                StarVerdict::Unknown => false,
            };
            Ok(StarRow {
                family: family.tag().to_string(),
                n: instance.n,
                label: instance.label.clone(),
                verdict,
                expected,
                matches,
                solution: out.solutions.first().map(|c| c.to_json()),
            })
        })
        .collect();
    rows.into_iter().collect()
}

/// Convenience entry: run [`star_sweep`] over several families.
pub fn star_sweep_families(
    families: &[StarFamily],
    n_max: usize,
    timeout: Option<Duration>,
) -> Result<Vec<StarRow>> {
    let mut rows = Vec::new();
    for &family in families {
        rows.extend(star_sweep(family, n_max, timeout)?);
    }
    Ok(rows)
}

/// Run a closure inside a worker pool of the given size (0 = default).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_graph_examples() {
        let report = check_graph(&PlumbingTree::linear(&[4]), true);
        assert!(report.all_pass);
        assert_eq!(report.delta, 2);

        let report = check_graph(&PlumbingTree::linear(&[2]), true);
        assert!(!report.det_square);
        assert!(!report.embedding_found);
        assert!(!report.all_pass);

        let report = check_graph(&crate::graph::fpp_graph(2).unwrap(), false);
        assert!(report.all_pass);
        assert_eq!(report.determinant, "576");
    }

    #[test]
    fn one_node_sweep_has_no_delta2_candidates() {
        // single-node reduced shapes all have delta <= 0
        let spec = SweepSpec::reduced_candidates(8, 1, 2);
        let result = corollary_sweep(&spec).unwrap();
        assert_eq!(result.candidates, 0);
    }

    #[test]
    fn linear_reduced_shapes_have_negative_delta() {
        let spec = SweepSpec {
            delta: None,
            ..SweepSpec::reduced_candidates(6, 0, 0)
        };
        let constraints = TreeConstraints {
            max_vertices: spec.max_vertices,
            leaf_framings: spec.leaf_framings.clone(),
            chain_framings: spec.chain_framings.clone(),
            node_framings: spec.node_framings.clone(),
            min_nodes: Some(0),
            max_nodes: Some(0),
        };
        for tree in enumerate_trees(&constraints) {
            if tree.len() >= 2 {
                assert!(tree.delta() <= -1, "{:?}", tree.to_json());
            } else {
                // the degenerate single vertex sits at delta = 0
                assert_eq!(tree.delta(), 0);
            }
        }
    }

    #[test]
    fn smoke_sweep_small() {
        // tiny uniform sweep: candidates and survivors match a hand check;
        // the only <= 2 vertex graphs passing all lattice filters and the
        // solver are [-4] and [-5, -2] / [-2, -5] (one class)
        let spec = SweepSpec {
            max_vertices: 2,
            node_count: None,
            leaf_framings: FramingRule::Set(vec![-2, -4, -5]),
            chain_framings: FramingRule::Set(vec![-2, -5]),
            node_framings: FramingRule::MinusDegMinus2,
            delta: None,
            filters: FilterKind::DEFAULT_CHAIN.to_vec(),
            timeout_secs: Some(60),
        };
        let result = corollary_sweep(&spec).unwrap();
        assert!(result.budget_exceeded.is_empty());
        let survivor_graphs: Vec<Vec<i64>> = result
            .survivors
            .iter()
            .map(|&i| {
                let mut f: Vec<i64> = result.records[i]
                    .graph
                    .vertices
                    .iter()
                    .map(|v| v.framing)
                    .collect();
                f.sort_unstable();
                f
            })
            .collect();
        assert!(survivor_graphs.contains(&vec![-4]));
        assert!(survivor_graphs.contains(&vec![-5, -2]));
        // a single -2 never survives (non-square determinant)
        assert!(!survivor_graphs.contains(&vec![-2]));
    }

    #[test]
    fn star_sweep_c6_small() {
        let rows = star_sweep(StarFamily::C6, 2, None).unwrap();
        assert!(!rows.is_empty());
        for row in &rows {
            assert!(row.matches, "{row:?}");
            assert_eq!(row.verdict == StarVerdict::Solved, row.expected);
        }
    }
}
