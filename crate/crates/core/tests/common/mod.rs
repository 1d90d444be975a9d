//! Shared helpers for the integration suites: an independent brute-force
//! configuration counter (kept deliberately separate from the solver's
//! search path) and a small deterministic catalog of presentations.

use qhd_core::graph::PlumbingTree;
use qhd_core::sandwich::{presentation_smooth, BranchKind, SandwichPresentation};

/// Count labeled μ = 0 solutions by brute force: every curve runs over all
/// multisets of the right pattern and mass on the fixed point set
/// `{1, ..., #curves}`, and a full assignment counts when all pairwise
/// products match the Gram matrix and every point is used.
pub fn brute_force_labeled_count(presentation: &SandwichPresentation) -> u128 {
    let k = presentation.curves.len();
    let n = k; // mu = 0
    let per_curve: Vec<Vec<Vec<u32>>> = presentation
        .curves
        .iter()
        .map(|spec| {
            let mut rows = Vec::new();
            let mut current = vec![0u32; n];
            build_rows(
                spec.kind == BranchKind::Cusp,
                spec.size,
                0,
                &mut current,
                &mut rows,
            );
            rows
        })
        .collect();
    let mut chosen: Vec<&Vec<u32>> = Vec::with_capacity(k);
    count_assignments(&per_curve, &presentation.gram, &mut chosen, n)
}

fn build_rows(cusp: bool, mass: i64, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let n = current.len();
    let assigned: i64 = current.iter().map(|&m| m as i64).sum();
    if assigned > mass {
        return;
    }
    if pos == n {
        if assigned != mass {
            return;
        }
        let doubles = current.iter().filter(|&&m| m == 2).count();
        let ok = if cusp {
            doubles == 1 && current.iter().all(|&m| m <= 2)
        } else {
            current.iter().all(|&m| m <= 1)
        };
        if ok {
            out.push(current.clone());
        }
        return;
    }
    let top = if cusp { 2 } else { 1 };
    for m in 0..=top {
        current[pos] = m;
        build_rows(cusp, mass, pos + 1, current, out);
    }
    current[pos] = 0;
}

fn count_assignments<'a>(
    per_curve: &'a [Vec<Vec<u32>>],
    gram: &[Vec<i64>],
    chosen: &mut Vec<&'a Vec<u32>>,
    n: usize,
) -> u128 {
    let i = chosen.len();
    if i == per_curve.len() {
        // every point must appear somewhere
        let all_used = (0..n).all(|p| chosen.iter().any(|row| row[p] > 0));
        return u128::from(all_used);
    }
    let mut total = 0u128;
    'rows: for row in &per_curve[i] {
        for (j, earlier) in chosen.iter().enumerate() {
            let dot: i64 = row
                .iter()
                .zip(earlier.iter())
                .map(|(&a, &b)| a as i64 * b as i64)
                .sum();
            if dot != gram[i][j] {
                continue 'rows;
            }
        }
        chosen.push(row);
        total += count_assignments(per_curve, gram, chosen, n);
        chosen.pop();
    }
    total
}

/// Small smooth presentations with at most 6 curves of size at most 4, used
/// for the completeness comparison.
pub fn small_presentations() -> Vec<(String, SandwichPresentation)> {
    let mut out = Vec::new();
    let mut push = |name: &str, tree: PlumbingTree, end: usize| {
        let pres = presentation_smooth(&tree, end).expect(name);
        let sizes_ok = pres.curves.iter().all(|c| c.size <= 4);
        assert!(pres.curves.len() <= 6 && sizes_ok, "{name} out of range");
        out.push((name.to_string(), pres));
    };
    push("[-4]", PlumbingTree::linear(&[4]), 0);
    push("[-5,-2]", PlumbingTree::linear(&[5, 2]), 0);
    push("[-2,-5]", PlumbingTree::linear(&[2, 5]), 0);
    push("[-3,-2]", PlumbingTree::linear(&[3, 2]), 0);
    push("[-2,-3,-2]", PlumbingTree::linear(&[2, 3, 2]), 0);
    push("[-3,-3]", PlumbingTree::linear(&[3, 3]), 0);
    push(
        "star(-5;-2,-2,-2)",
        PlumbingTree::new(
            vec![("c", -5), ("l1", -2), ("l2", -2), ("l3", -2)],
            vec![("c", "l1"), ("c", "l2"), ("c", "l3")],
        )
        .unwrap(),
        1,
    );
    push(
        "star(-4;-2,-2,-2)",
        PlumbingTree::new(
            vec![("c", -4), ("l1", -2), ("l2", -2), ("l3", -2)],
            vec![("c", "l1"), ("c", "l2"), ("c", "l3")],
        )
        .unwrap(),
        1,
    );
    out
}
