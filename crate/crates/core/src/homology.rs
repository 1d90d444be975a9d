//! Milnor-fiber invariants from incidence matrices: integral kernels and
//! torsion via Smith normal form, the restricted intersection form on the
//! kernel, the canonical pairing, and the unimodular-overlattice
//! determinant check.
//!
//! The incidence matrix is viewed as a map from point space to curve space;
//! the point space carries the trivial negative definite form, the kernel
//! inherits its restriction, and the canonical class is `(1, 1, ..., 1)`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::lattice::{bareiss_determinant, IntersectionForm};
use crate::solver::{incidence_matrix, Configuration};
use crate::{Error, Result};

/// Smith normal form of an integer matrix: `U A V = D` with `D` diagonal
/// and each divisor dividing the next. Only the right transform `V` is
/// tracked (it carries the kernel).
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Nonzero diagonal entries, each dividing the next, all positive.
    pub divisors: Vec<BigInt>,
    pub rank: usize,
    /// Square right transform; columns `rank..` span the kernel.
    pub right: Vec<Vec<BigInt>>,
    pub rows: usize,
    pub cols: usize,
}

/// Compute the Smith normal form with exact big-integer arithmetic.
pub fn smith_form(matrix: &[Vec<BigInt>]) -> SmithForm {
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut t = 0usize;
    while t < rows.min(cols) {
        // find a pivot of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, t, pj);
        // clear row and column t
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = div_round(&a[i][t], &a[t][t]);
                    for j in t..cols {
                        let delta = &q * &a[t][j];
                        a[i][j] = &a[i][j] - delta;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = div_round(&a[t][j], &a[t][t]);
                    for i in 0..rows {
                        let delta = &q * &a[i][t];
                        a[i][j] = &a[i][j] - delta;
                    }
                    for r in 0..cols {
                        let delta = &q * &v[r][t];
                        v[r][j] = &v[r][j] - delta;
                    }
                    if !a[t][j].is_zero() {
                        swap_cols(&mut a, &mut v, t, j);
                        dirty = true;
                    }
                }
            }
        }
        // enforce divisibility: the pivot must divide every later entry
        let mut fixed = false;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    // add column j to column t and restart this pivot
                    for r in 0..rows {
                        let delta = a[r][j].clone();
                        a[r][t] = &a[r][t] + delta;
                    }
                    for r in 0..cols {
                        let delta = v[r][j].clone();
                        v[r][t] = &v[r][t] + delta;
                    }
                    fixed = true;
                    break 'scan;
                }
            }
        }
        if fixed {
            continue;
        }
        if a[t][t].is_negative() {
            for i in 0..rows {
                a[i][t] = -a[i][t].clone();
            }
            for r in 0..cols {
                v[r][t] = -v[r][t].clone();
            }
        }
        t += 1;
    }
    let divisors: Vec<BigInt> = (0..t).map(|i| a[i][i].clone()).collect();
    SmithForm {
        rank: t,
        divisors,
        right: v,
        rows,
        cols,
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], x: usize, y: usize) {
    if x == y {
        return;
    }
    for row in a.iter_mut() {
        row.swap(x, y);
    }
    for row in v.iter_mut() {
        row.swap(x, y);
    }
}

/// Rounded division: the quotient minimizing the remainder's absolute value.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = (num / den, num % den);
    if r.abs() * BigInt::from(2) > den.abs() {
        if (num.is_negative()) == (den.is_negative()) {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

/// Elementary divisors greater than 1 (the torsion orders).
pub fn torsion(divisors: &[BigInt]) -> Vec<BigInt> {
    divisors
        .iter()
        .filter(|d| **d > BigInt::one())
        .cloned()
        .collect()
}

/// Milnor-fiber invariants of a configuration.
#[derive(Debug, Clone, Serialize)]
pub struct FiberInvariants {
    /// Rank of the kernel of the incidence map: the middle homology rank.
    pub mu: i64,
    /// Torsion orders of the cokernel (first homology of the fiber).
    pub h1_torsion: Vec<i64>,
    /// Free rank of the cokernel; zero for genuine smoothing data.
    pub h1_rank: i64,
    /// Integral basis of the kernel, in point coordinates.
    pub kernel_basis: Vec<Vec<i64>>,
    /// `-(x_a · x_b)`: the intersection form restricted to the kernel.
    pub restricted_form: Vec<Vec<i64>>,
    /// `-(Σ coords of x_a)`: pairing of the canonical class with the basis.
    pub canonical_pairing: Vec<i64>,
    /// Leading-principal-minor test on the restricted form.
    pub restricted_negative_definite: bool,
}

/// Exact kernel, torsion, restricted form, and canonical pairing of the
/// incidence map of a configuration.
pub fn fiber_invariants(config: &Configuration) -> FiberInvariants {
    let m: Vec<Vec<BigInt>> = incidence_matrix(config)
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let curves = m.len();
    let points = config.points.len();
    let snf = smith_form(&m);
    let mu = (points - snf.rank) as i64;
    let h1_rank = (curves - snf.rank) as i64;
    let h1_torsion: Vec<i64> = torsion(&snf.divisors)
        .into_iter()
        .map(|d| i64::try_from(d).expect("desk-scale torsion"))
        .collect();
    let kernel_basis: Vec<Vec<i64>> = (snf.rank..points)
        .map(|j| {
            (0..points)
                .map(|i| i64::try_from(snf.right[i][j].clone()).expect("desk-scale kernel"))
                .collect()
        })
        .collect();
    let k = kernel_basis.len();
    let mut restricted_form = vec![vec![0i64; k]; k];
    for a in 0..k {
        for b in 0..k {
            let dot: i64 = kernel_basis[a]
                .iter()
                .zip(&kernel_basis[b])
                .map(|(x, y)| x * y)
                .sum();
            restricted_form[a][b] = -dot;
        }
    }
    let canonical_pairing: Vec<i64> = kernel_basis
        .iter()
        .map(|x| -x.iter().sum::<i64>())
        .collect();
    let restricted_negative_definite = k > 0 && {
        let rows: Vec<Vec<BigInt>> = restricted_form
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        negative_definite_rows(&rows)
    };
    FiberInvariants {
        mu,
        h1_torsion,
        h1_rank,
        kernel_basis,
        restricted_form,
        canonical_pairing,
        restricted_negative_definite,
    }
}

fn negative_definite_rows(rows: &[Vec<BigInt>]) -> bool {
    let n = rows.len();
    for k in 1..=n {
        let sub: Vec<Vec<BigInt>> = (0..k)
            .map(|i| (0..k).map(|j| rows[i][j].clone()).collect())
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

/// Square of the orthogonal projection (in the negative definite ambient
/// form) of the canonical class `K = (1, ..., 1)` onto the kernel of the
/// incidence map. For the canonical one-free-point-per-curve configuration
/// this equals `Z_K²` of the underlying graph.
pub fn zk_via_projection(config: &Configuration) -> Result<BigRational> {
    let inv = fiber_invariants(config);
    let basis = &inv.kernel_basis;
    let k = basis.len();
    if k == 0 {
        return Ok(BigRational::zero());
    }
    // Euclidean Gram of the kernel basis (positive definite) and K-dots
    let gram: Vec<Vec<BigRational>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    BigRational::from(BigInt::from(
                        basis[a].iter().zip(&basis[b]).map(|(x, y)| x * y).sum::<i64>(),
                    ))
                })
                .collect()
        })
        .collect();
    let kdots: Vec<BigRational> = (0..k)
        .map(|a| BigRational::from(BigInt::from(basis[a].iter().sum::<i64>())))
        .collect();
    let coeffs = solve_sym(&gram, &kdots)?;
    // ‖proj‖² = cᵀ (x · K); ambient form is negative definite
    let norm: BigRational = coeffs.iter().zip(&kdots).map(|(c, d)| c * d).sum();
    Ok(-norm)
}

fn solve_sym(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Singular("kernel gram".into()))?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = m[col][col].clone();
        for j in col..n {
            m[col][j] = &m[col][j] / &p;
        }
        rhs[col] = &rhs[col] / &p;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in col..n {
                let delta = &f * &m[col][j];
                m[r][j] = &m[r][j] - delta;
            }
            let delta = &f * &rhs[col];
            rhs[r] = &rhs[r] - delta;
        }
    }
    Ok(rhs)
}

/// The unimodular-overlattice determinant check for μ = 0 configurations:
/// `|det I|² = |det Q_Γ|`. Errors when the incidence matrix is singular
/// (or not square).
pub fn qhd_det_check(config: &Configuration, form: &IntersectionForm) -> Result<bool> {
    let m = incidence_matrix(config);
    if m.len() != config.points.len() {
        return Err(Error::Singular(format!(
            "incidence matrix is {}x{}, not square",
            m.len(),
            config.points.len()
        )));
    }
    let big: Vec<Vec<BigInt>> = m
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let det_i = bareiss_determinant(&big);
    if det_i.is_zero() {
        return Err(Error::Singular("incidence matrix".into()));
    }
    let det_q = form.determinant();
    Ok(&det_i * &det_i == det_q.abs())
}

/// Elementary divisors of an integer symmetric matrix (a congruence
/// invariant used to compare the restricted form with `Q_Γ`).
pub fn elementary_divisors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    smith_form(&big).divisors
}

/// Bounded search for a unimodular `U` with `Uᵀ A U = B`, coefficient bound
/// `bound`. Exhaustive within the bound; intended for small sizes only.
pub fn congruent_bounded(a: &[Vec<i64>], b: &[Vec<i64>], bound: i64) -> Option<Vec<Vec<i64>>> {
    let n = a.len();
    if b.len() != n {
        return None;
    }
    let mut cols: Vec<Vec<i64>> = Vec::new();
    fn quad(a: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
        let n = a.len();
        let mut s = 0i64;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * a[i][j] * y[j];
            }
        }
        s
    }
    fn rec(
        a: &[Vec<i64>],
        b: &[Vec<i64>],
        bound: i64,
        cols: &mut Vec<Vec<i64>>,
    ) -> Option<Vec<Vec<i64>>> {
        let n = a.len();
        let j = cols.len();
        if j == n {
            // determinant must be ±1
            let m: Vec<Vec<BigInt>> = (0..n)
                .map(|r| (0..n).map(|c| BigInt::from(cols[c][r])).collect())
                .collect();
            let det = bareiss_determinant(&m);
            if det.abs() == BigInt::one() {
                // U has the candidate vectors as columns
                let u: Vec<Vec<i64>> = (0..n)
                    .map(|r| (0..n).map(|c| cols[c][r]).collect())
                    .collect();
                return Some(u);
            }
            return None;
        }
        let mut v = vec![0i64; n];
        fn fill(
            a: &[Vec<i64>],
            b: &[Vec<i64>],
            bound: i64,
            cols: &mut Vec<Vec<i64>>,
            v: &mut Vec<i64>,
            idx: usize,
        ) -> Option<Vec<Vec<i64>>> {
            let n = a.len();
            let j = cols.len();
            if idx == n {
                if quad(a, v, v) != b[j][j] {
                    return None;
                }
                for (i, c) in cols.iter().enumerate() {
                    if quad(a, c, v) != b[i][j] {
                        return None;
                    }
                }
                cols.push(v.clone());
                let res = rec(a, b, bound, cols);
                if res.is_some() {
                    return res;
                }
                cols.pop();
                return None;
            }
            for x in -bound..=bound {
                v[idx] = x;
                let res = fill(a, b, bound, cols, v, idx + 1);
                if res.is_some() {
                    return res;
                }
            }
            v[idx] = 0;
            None
        }
        fill(a, b, bound, cols, &mut v, 0)
    }
    rec(a, b, bound, &mut cols)
}
