//! Exact intersection-lattice computations: the plumbing form, fraction-free
//! determinants, the anticanonical cycle test `Z_K² + |Γ| = 0`, and the
//! diagonal embedding search into `⟨-1⟩ⁿ`.
//!
//! Everything is exact: big integers for determinants and minors, big
//! rationals for the anticanonical solve. No floating point.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::PlumbingTree;
use crate::{Error, Result};

/// The symmetric intersection matrix `Q_Γ`: diagonal entries are the
/// framings, off-diagonal entries 1 for edges and 0 otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    n: usize,
    entries: Vec<Vec<BigInt>>,
    negative_definite: bool,
}

impl IntersectionForm {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams("matrix not square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidParams("matrix not symmetric".into()));
                }
            }
        }
        let entries: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let negative_definite = is_negative_definite(&entries);
        Ok(IntersectionForm {
            n,
            entries,
            negative_definite,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    /// Exact definiteness flag, computed from leading-principal-minor signs.
    pub fn is_negative_definite(&self) -> bool {
        self.negative_definite
    }

    pub fn determinant(&self) -> BigInt {
        bareiss_determinant(&self.entries)
    }

    pub fn to_json(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| i64::try_from(x.clone()).expect("desk-scale entry"))
                    .collect()
            })
            .collect()
    }
}

/// The intersection form of a plumbing tree.
pub fn intersection_matrix(tree: &PlumbingTree) -> IntersectionForm {
    let n = tree.len();
    let mut rows = vec![vec![0i64; n]; n];
    for v in tree.vertices() {
        rows[v][v] = tree.framing(v);
    }
    for (a, b) in tree.edges() {
        rows[a][b] = 1;
        rows[b][a] = 1;
    }
    IntersectionForm::from_rows(rows).expect("plumbing form is symmetric")
}

/// Fraction-free Bareiss determinant over the integers.
pub fn bareiss_determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Leading principal minors alternate: `(-1)^k det_k > 0` for all `k`.
fn is_negative_definite(matrix: &[Vec<BigInt>]) -> bool {
    let n = matrix.len();
    for k in 1..=n {
        let sub: Vec<Vec<BigInt>> = (0..k)
            .map(|i| (0..k).map(|j| matrix[i][j].clone()).collect())
            .collect();
        let det = bareiss_determinant(&sub);
        let expected_positive = k % 2 == 0;
        if det.is_zero()
            || (expected_positive && det.is_negative())
            || (!expected_positive && det.is_positive())
        {
            return false;
        }
    }
    true
}

/// Exact integer square test on `|x|`.
pub fn is_square(x: &BigInt) -> bool {
    let abs = x.abs();
    let root = abs.sqrt();
    &root * &root == abs
}

/// Determinant together with the square test on its absolute value.
pub fn determinant(form: &IntersectionForm) -> (BigInt, bool) {
    let det = form.determinant();
    let square = is_square(&det);
    (det, square)
}

/// The anticanonical cycle data of a nonsingular form.
#[derive(Debug, Clone)]
pub struct Anticanonical {
    /// `Z_K`, the rational solution of `Q z = (e_v + 2)_v`.
    pub z_k: Vec<BigRational>,
    /// `Z_K² = zᵀ Q z`, exact.
    pub zk_square: BigRational,
    /// Whether `Z_K² + n = 0`.
    pub zk_test: bool,
}

/// Solve `Q z = e + 2` exactly and evaluate the `Z_K² + |Γ| = 0` test.
/// Errors when the form is singular.
pub fn anticanonical(form: &IntersectionForm) -> Result<Anticanonical> {
    let n = form.size();
    let rhs: Vec<BigRational> = (0..n)
        .map(|v| BigRational::from(form.entry(v, v) + BigInt::from(2)))
        .collect();
    let z_k = solve_rational(form, &rhs)?;
    // zᵀ Q z = zᵀ (e + 2) since Q z = e + 2
    let zk_square: BigRational = z_k.iter().zip(&rhs).map(|(z, r)| z * r).sum();
    let zk_test = &zk_square + BigRational::from(BigInt::from(n as i64)) == BigRational::zero();
    Ok(Anticanonical {
        z_k,
        zk_square,
        zk_test,
    })
}

fn solve_rational(form: &IntersectionForm, rhs: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = form.size();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from(form.entry(i, j).clone()))
                .collect()
        })
        .collect();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singular("intersection form".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for j in col..n {
            a[col][j] = &a[col][j] / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in col..n {
                let delta = &f * &a[col][j];
                a[r][j] = &a[r][j] - delta;
            }
            let delta = &f * &b[col];
            b[r] = &b[r] - delta;
        }
    }
    Ok(b)
}

/// An integral embedding certificate: one row per vertex, with
/// `x_v · x_w = -Q_{vw}` (Euclidean) and coordinate sum `e(v) + 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub rows: Vec<Vec<i64>>,
}

/// Exhaustive search for a diagonal embedding of a negative definite form
/// into `⟨-1⟩ⁿ` with `K = Σ e_i` representing the anticanonical class.
///
/// `extra_columns` widens the target lattice to `n + k` columns (an
/// experimental extension; the definition itself fixes `k = 0`). The search
/// is exhaustive within the per-coordinate bound `|x_{v,i}| <= ⌈√|e(v)|⌉`,
/// so `None` is a proof of non-embeddability under the `K`-condition.
pub fn diagonal_embed(form: &IntersectionForm, extra_columns: usize) -> Option<Embedding> {
    if !form.is_negative_definite() {
        return None;
    }
    let n = form.size();
    let cols = n + extra_columns;
    let diag: Vec<i64> = (0..n)
        .map(|v| i64::try_from(form.entry(v, v).clone()).expect("desk-scale framing"))
        .collect();
    // process vertices in decreasing |framing|
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (diag[v], v));

    let mut rows: Vec<Vec<i64>> = vec![Vec::new(); n];
    if search_rows(form, &order, 0, cols, &mut rows) {
        Some(Embedding { rows })
    } else {
        None
    }
}

fn isqrt_ceil(x: i64) -> i64 {
    let mut r = 0i64;
    while r * r < x {
        r += 1;
    }
    r
}

fn search_rows(
    form: &IntersectionForm,
    order: &[usize],
    idx: usize,
    cols: usize,
    rows: &mut Vec<Vec<i64>>,
) -> bool {
    if idx == order.len() {
        return true;
    }
    let v = order[idx];
    let norm = -i64::try_from(form.entry(v, v).clone()).expect("desk-scale framing");
    let target_sum = i64::try_from(form.entry(v, v).clone()).unwrap() + 2;
    let bound = isqrt_ceil(norm);
    // columns are interchangeable while all previously placed rows agree on
    // them; enforce non-increasing values inside each such class
    let tie_break: Vec<Vec<i64>> = (0..cols)
        .map(|c| order[..idx].iter().map(|&w| rows[w][c]).collect())
        .collect();
    let mut row = vec![0i64; cols];
    fill_row(
        form, order, idx, cols, rows, &mut row, 0, norm, target_sum, bound, &tie_break,
    )
}

#[allow(clippy::too_many_arguments)]
fn fill_row(
    form: &IntersectionForm,
    order: &[usize],
    idx: usize,
    cols: usize,
    rows: &mut Vec<Vec<i64>>,
    row: &mut Vec<i64>,
    col: usize,
    norm_left: i64,
    sum_left: i64,
    bound: i64,
    tie_break: &[Vec<i64>],
) -> bool {
    if col == cols {
        if norm_left != 0 || sum_left != 0 {
            return false;
        }
        let v = order[idx];
        for &w in order[..idx].iter() {
            let dot: i64 = rows[w].iter().zip(row.iter()).map(|(a, b)| a * b).sum();
            let want = -i64::try_from(form.entry(v, w).clone()).unwrap();
            if dot != want {
                return false;
            }
        }
        rows[v] = row.clone();
        if search_rows(form, order, idx + 1, cols, rows) {
            return true;
        }
        rows[v] = Vec::new();
        return false;
    }
    let remaining = (cols - col) as i64;
    if norm_left < 0 || norm_left > remaining * bound * bound || sum_left.abs() > remaining * bound
    {
        return false;
    }
    let mut hi = bound;
    if col > 0 && tie_break[col] == tie_break[col - 1] {
        hi = hi.min(row[col - 1]);
    }
    let mut x = hi;
    while x >= -bound {
        if x * x <= norm_left {
            row[col] = x;
            if fill_row(
                form,
                order,
                idx,
                cols,
                rows,
                row,
                col + 1,
                norm_left - x * x,
                sum_left - x,
                bound,
                tie_break,
            ) {
                return true;
            }
        }
        x -= 1;
    }
    row[col] = 0;
    false
}

/// Verify an embedding certificate against its form.
pub fn verify_embedding(form: &IntersectionForm, emb: &Embedding) -> bool {
    let n = form.size();
    if emb.rows.len() != n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let dot: i64 = emb.rows[i]
                .iter()
                .zip(emb.rows[j].iter())
                .map(|(a, b)| a * b)
                .sum();
            if BigInt::from(dot) != -form.entry(i, j) {
                return false;
            }
        }
        let sum: i64 = emb.rows[i].iter().sum();
        if BigInt::from(sum) != form.entry(i, i) + BigInt::from(2) {
            return false;
        }
    }
    true
}
