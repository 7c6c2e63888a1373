//! Smith normal form over the integers.
//!
//! `smith_normal_form` returns the full decomposition with unimodular
//! transforms and is meant for small matrices. `smith_invariants` only
//! computes the divisor chain; it first eliminates unit pivots sparsely and
//! runs the dense algorithm on whatever is left, which keeps large boundary
//! matrices cheap.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::LinAlgError;
use crate::matrix::RatMatrix;
use crate::q::Q;
use crate::svec::SVec;

pub type IntMatrix = Vec<Vec<BigInt>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// Diagonal entries `d_1 | d_2 | ...`, length `min(rows, cols)`, trailing zeros included.
    pub diag: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SnfResult {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Convert to a dense integer matrix, failing on non-integral entries.
pub fn to_int_matrix(m: &RatMatrix) -> Result<IntMatrix, LinAlgError> {
    let mut out = vec![vec![BigInt::zero(); m.ncols()]; m.nrows()];
    for (i, j, v) in m.triplets() {
        if !v.is_integer() {
            return Err(LinAlgError::NonIntegral { row: i, col: j });
        }
        out[i][j] = v.numer();
    }
    Ok(out)
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn int_det(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Full Smith normal form with `left·m·right = diag`.
pub fn smith_normal_form(m: &RatMatrix) -> Result<SnfResult, LinAlgError> {
    let a = to_int_matrix(m)?;
    Ok(smith_dense(a, true))
}

fn smith_dense(mut a: IntMatrix, track: bool) -> SnfResult {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut u = if track { identity(rows) } else { Vec::new() };
    let mut v = if track { identity(cols) } else { Vec::new() };
    let r = rows.min(cols);

    let swap_rows = |a: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize| {
        a.swap(i, j);
        if track {
            u.swap(i, j);
        }
    };
    let swap_cols = |a: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        if track {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    };
    // row_i += q·row_j
    let add_row = |a: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize, q: &BigInt| {
        for c in 0..cols {
            let t = &a[j][c] * q;
            a[i][c] += t;
        }
        if track {
            for c in 0..rows {
                let t = &u[j][c] * q;
                u[i][c] += t;
            }
        }
    };
    // col_i += q·col_j
    let add_col = |a: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize, q: &BigInt| {
        for row in a.iter_mut() {
            let t = &row[j] * q;
            row[i] += t;
        }
        if track {
            for row in v.iter_mut() {
                let t = &row[j] * q;
                row[i] += t;
            }
        }
    };

    for t in 0..r {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut a, &mut u, t, pi);
        swap_cols(&mut a, &mut v, t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                add_row(&mut a, &mut u, i, t, &-q);
                if !a[i][t].is_zero() {
                    swap_rows(&mut a, &mut u, t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                add_col(&mut a, &mut v, j, t, &-q);
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, &mut v, t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Row and column are clear; enforce divisibility of the trailing block.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => add_row(&mut a, &mut u, t, i, &BigInt::one()),
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for c in 0..cols {
                a[t][c] = -&a[t][c];
            }
            if track {
                for c in 0..rows {
                    u[t][c] = -&u[t][c];
                }
            }
        }
    }
    let diag = (0..r).map(|i| a[i][i].clone()).collect();
    SnfResult { diag, left: u, right: v }
}

/// Divisor chain of an integer matrix, length `min(rows, cols)` with trailing zeros.
pub fn smith_invariants(m: &RatMatrix) -> Result<Vec<BigInt>, LinAlgError> {
    let nrows = m.nrows();
    let ncols = m.ncols();
    let mut rows: Vec<SVec> = Vec::with_capacity(nrows);
    for (i, r) in m.rows().into_iter().enumerate() {
        if let Some((j, _)) = r.iter().find(|(_, v)| !v.is_integer()) {
            return Err(LinAlgError::NonIntegral { row: i, col: j });
        }
        rows.push(r);
    }
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for j in r.indices() {
            col_rows[j].insert(i);
        }
    }
    let mut alive_row = vec![true; nrows];
    let mut alive_col = vec![true; ncols];
    let mut units = 0usize;
    loop {
        let mut progress = false;
        for c in 0..ncols {
            if !alive_col[c] || col_rows[c].is_empty() {
                continue;
            }
            // Unit entry in this column with the sparsest row.
            let pivot = col_rows[c]
                .iter()
                .copied()
                .filter(|&r| rows[r].get(c).abs().is_one())
                .min_by_key(|&r| rows[r].nnz());
            let Some(p) = pivot else { continue };
            let prow = rows[p].clone();
            let pv = prow.get(c);
            let others: Vec<usize> = col_rows[c].iter().copied().filter(|&r| r != p).collect();
            for r in others {
                let coef = &rows[r].get(c) / &pv;
                let old = std::mem::take(&mut rows[r]);
                let new = old.axpy(&-coef, &prow);
                for j in old.indices() {
                    col_rows[j].remove(&r);
                }
                for j in new.indices() {
                    col_rows[j].insert(r);
                }
                rows[r] = new;
            }
            // Column operations clear the rest of the pivot row without touching other rows.
            for j in prow.indices() {
                col_rows[j].remove(&p);
            }
            rows[p] = SVec::new();
            alive_row[p] = false;
            alive_col[c] = false;
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let rest_rows: Vec<usize> = (0..nrows).filter(|&i| alive_row[i] && !rows[i].is_zero()).collect();
    let rest_cols: Vec<usize> = (0..ncols).filter(|&j| alive_col[j] && !col_rows[j].is_empty()).collect();
    let mut col_pos = vec![usize::MAX; ncols];
    for (k, &j) in rest_cols.iter().enumerate() {
        col_pos[j] = k;
    }
    let dense: IntMatrix = rest_rows
        .iter()
        .map(|&i| {
            let mut row = vec![BigInt::zero(); rest_cols.len()];
            for (j, v) in rows[i].iter() {
                row[col_pos[j]] = v.numer();
            }
            row
        })
        .collect();
    let tail = smith_dense(dense, false).diag;
    let mut diag: Vec<BigInt> = vec![BigInt::one(); units];
    diag.extend(tail.into_iter().filter(|d| !d.is_zero()));
    diag.resize(nrows.min(ncols), BigInt::zero());
    Ok(diag)
}

/// Check that `d` is a divisor chain: each nonzero entry divides the next, zeros only at the end.
pub fn is_divisor_chain(d: &[BigInt]) -> bool {
    d.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            w[1].is_multiple_of(&w[0])
        }
    }) && d.iter().all(|x| !x.is_negative())
}

/// Dense integer matrix as a rational matrix.
pub fn from_int_matrix(a: &IntMatrix) -> RatMatrix {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    RatMatrix::from_triplets(
        rows,
        cols,
        a.iter().enumerate().flat_map(|(i, r)| {
            r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(j, v)| (i, j, Q::from(v.clone())))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn diag_two_three() {
        let m = RatMatrix::from_int_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&m).unwrap().diag, chain(&[1, 6]));
        assert_eq!(smith_invariants(&m).unwrap(), chain(&[1, 6]));
    }

    #[test]
    fn two_four_six_eight() {
        let m = RatMatrix::from_int_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_normal_form(&m).unwrap().diag, chain(&[2, 4]));
        assert_eq!(smith_invariants(&m).unwrap(), chain(&[2, 4]));
    }

    #[test]
    fn zero_matrix() {
        let m = RatMatrix::zeros(2, 3);
        assert_eq!(smith_normal_form(&m).unwrap().diag, chain(&[0, 0]));
        assert_eq!(smith_invariants(&m).unwrap(), chain(&[0, 0]));
    }

    #[test]
    fn rejects_fractions() {
        let m = RatMatrix::from_triplets(1, 1, vec![(0, 0, Q::frac(1, 2))]);
        assert_eq!(smith_normal_form(&m).unwrap_err(), LinAlgError::NonIntegral { row: 0, col: 0 });
    }

    #[test]
    fn transforms_reconstruct() {
        let m = RatMatrix::from_int_rows(&[vec![4, 6, 2], vec![2, 8, 0], vec![6, 14, 2]]);
        let s = smith_normal_form(&m).unwrap();
        let a = to_int_matrix(&m).unwrap();
        let d = int_mul(&int_mul(&s.left, &a), &s.right);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
        assert!(int_det(&s.left).abs().is_one());
        assert!(int_det(&s.right).abs().is_one());
        assert!(is_divisor_chain(&s.diag));
    }

    #[test]
    fn cycle_boundary_has_unit_chain() {
        // Boundary of the 4-cycle: vertices x edges.
        let m = RatMatrix::from_int_rows(&[
            vec![-1, 0, 0, 1],
            vec![1, -1, 0, 0],
            vec![0, 1, -1, 0],
            vec![0, 0, 1, -1],
        ]);
        assert_eq!(smith_invariants(&m).unwrap(), chain(&[1, 1, 1, 0]));
    }
}
