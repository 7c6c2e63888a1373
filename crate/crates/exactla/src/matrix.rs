//! Sparse rational matrices stored by column.

use std::fmt;

use crate::echelon::Echelon;
use crate::error::LinAlgError;
use crate::q::Q;
use crate::subspace::Subspace;
use crate::svec::SVec;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    nrows: usize,
    cols: Vec<SVec>,
}

impl RatMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> RatMatrix {
        RatMatrix { nrows, cols: vec![SVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> RatMatrix {
        RatMatrix { nrows: n, cols: (0..n).map(SVec::unit).collect() }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Q)>>(nrows: usize, ncols: usize, it: I) -> RatMatrix {
        let mut per_col: Vec<Vec<(usize, Q)>> = vec![Vec::new(); ncols];
        for (r, c, v) in it {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) outside {nrows}x{ncols}");
            per_col[c].push((r, v));
        }
        RatMatrix { nrows, cols: per_col.into_iter().map(SVec::from_pairs).collect() }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SVec>) -> RatMatrix {
        debug_assert!(cols.iter().all(|c| c.max_index().is_none_or(|m| m < nrows)));
        RatMatrix { nrows, cols }
    }

    /// Build from dense integer rows (mostly for tests and small examples).
    pub fn from_int_rows(rows: &[Vec<i64>]) -> RatMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        RatMatrix::from_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, Q::int(v)))),
        )
    }

    pub fn from_rows(ncols: usize, rows: &[SVec]) -> RatMatrix {
        RatMatrix::from_columns(ncols, rows.to_vec()).transpose()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SVec] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.cols[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// All nonzero entries as `(row, col, value)`, column by column.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Q)> + '_ {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut per_row: Vec<SVec> = vec![SVec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c.iter() {
                per_row[i].push(j, v.clone());
            }
        }
        RatMatrix { nrows: self.ncols(), cols: per_row }
    }

    /// Rows as sparse vectors.
    pub fn rows(&self) -> Vec<SVec> {
        self.transpose().cols
    }

    /// `A·x` for sparse `x`.
    pub fn apply(&self, x: &SVec) -> SVec {
        let mut acc: Vec<(usize, Q)> = Vec::new();
        for (j, xj) in x.iter() {
            for (i, v) in self.cols[j].iter() {
                acc.push((i, v * xj));
            }
        }
        SVec::from_pairs(acc)
    }

    /// `A·x` for dense `x`.
    pub fn apply_dense(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.ncols());
        let mut out = vec![Q::zero(); self.nrows];
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (i, v) in self.cols[j].iter() {
                out[i] += &(v * xj);
            }
        }
        out
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
        if self.ncols() != other.nrows {
            return Err(LinAlgError::DimensionMismatch { expected: self.ncols(), found: other.nrows });
        }
        Ok(RatMatrix { nrows: self.nrows, cols: other.cols.iter().map(|c| self.apply(c)).collect() })
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
        self.check_same_shape(other)?;
        Ok(RatMatrix { nrows: self.nrows, cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
        self.check_same_shape(other)?;
        Ok(RatMatrix { nrows: self.nrows, cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b)).collect() })
    }

    fn check_same_shape(&self, other: &RatMatrix) -> Result<(), LinAlgError> {
        if self.nrows != other.nrows {
            return Err(LinAlgError::DimensionMismatch { expected: self.nrows, found: other.nrows });
        }
        if self.ncols() != other.ncols() {
            return Err(LinAlgError::DimensionMismatch { expected: self.ncols(), found: other.ncols() });
        }
        Ok(())
    }

    pub fn scale(&self, s: &Q) -> RatMatrix {
        RatMatrix { nrows: self.nrows, cols: self.cols.iter().map(|c| c.scale(s)).collect() }
    }

    /// `diag(l)·A`.
    pub fn scale_rows(&self, l: &[Q]) -> RatMatrix {
        assert_eq!(l.len(), self.nrows);
        let cols = self.cols.iter().map(|c| SVec::from_pairs(c.iter().map(|(i, v)| (i, v * &l[i])))).collect();
        RatMatrix { nrows: self.nrows, cols }
    }

    /// `A·diag(r)`.
    pub fn scale_cols(&self, r: &[Q]) -> RatMatrix {
        assert_eq!(r.len(), self.ncols());
        RatMatrix { nrows: self.nrows, cols: self.cols.iter().zip(r).map(|(c, s)| c.scale(s)).collect() }
    }

    /// Keep the listed rows, renumbered in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> RatMatrix {
        let mut map = vec![usize::MAX; self.nrows];
        for (k, &r) in rows.iter().enumerate() {
            map[r] = k;
        }
        let cols = self
            .cols
            .iter()
            .map(|c| SVec::from_pairs(c.iter().filter(|(i, _)| map[*i] != usize::MAX).map(|(i, v)| (map[i], v.clone()))))
            .collect();
        RatMatrix { nrows: rows.len(), cols }
    }

    pub fn select_cols(&self, cols: &[usize]) -> RatMatrix {
        RatMatrix { nrows: self.nrows, cols: cols.iter().map(|&j| self.cols[j].clone()).collect() }
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.ncols()]; self.nrows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v.clone();
        }
        out
    }

    pub fn rank(&self) -> usize {
        // Eliminate along the shorter side.
        let vecs = if self.nrows < self.ncols() { self.rows() } else { self.cols.clone() };
        let dim = if self.nrows < self.ncols() { self.ncols() } else { self.nrows };
        let mut e = Echelon::new(dim);
        for v in &vecs {
            e.insert(v);
        }
        e.rank()
    }

    /// Reduced row-echelon form: pivot columns and the reduced matrix
    /// (nonzero rows first, then zero rows).
    pub fn rref(&self) -> (Vec<usize>, RatMatrix) {
        let mut e = Echelon::new(self.ncols());
        for r in self.rows() {
            e.insert(&r);
        }
        let rows = e.into_reduced_rows();
        let pivots: Vec<usize> = rows.iter().map(|r| r.leading().unwrap().0).collect();
        let mut all = rows;
        all.resize(self.nrows, SVec::new());
        (pivots, RatMatrix::from_columns(self.ncols(), all).transpose())
    }

    /// Null space `{x : A·x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let n = self.nrows;
        let mut e = Echelon::new(n + self.ncols());
        let mut ker = Vec::new();
        for (j, c) in self.cols.iter().enumerate() {
            let aug = c.concat(n, &SVec::unit(j));
            let r = e.reduce(&aug);
            let (left, right) = r.split_at(n);
            if left.is_zero() {
                ker.push(right);
            } else {
                e.insert_reduced(r);
            }
        }
        Subspace::from_independent(self.ncols(), ker)
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.nrows, &self.cols)
    }

    /// Image of a subspace of the domain.
    pub fn image_of(&self, s: &Subspace) -> Subspace {
        assert_eq!(s.ambient(), self.ncols());
        let imgs: Vec<SVec> = s.basis().iter().map(|b| self.apply(b)).collect();
        Subspace::span(self.nrows, &imgs)
    }

    /// Kernel of `A` restricted to the subspace `s`, returned in the ambient coordinates of `s`.
    pub fn kernel_on(&self, s: &Subspace) -> Subspace {
        let b = s.basis();
        let m = RatMatrix::from_columns(self.nrows, b.iter().map(|v| self.apply(v)).collect());
        let k = m.kernel();
        let vecs = k.basis().iter().map(|c| lincomb(b, c)).collect::<Vec<_>>();
        Subspace::from_independent(s.ambient(), vecs)
    }

    /// Solve `A·x = b` for some particular solution.
    pub fn solve(&self, b: &SVec) -> Result<SVec, LinAlgError> {
        let n = self.nrows;
        let mut e = Echelon::new(n + self.ncols());
        for (j, c) in self.cols.iter().enumerate() {
            e.insert(&c.concat(n, &SVec::unit(j)));
        }
        // Reducing (b | 0) leaves (0 | -x) with A·x = b when b is in the image.
        let r = e.reduce(&b.concat(n, &SVec::new()));
        let (left, right) = r.split_at(n);
        if !left.is_zero() {
            return Err(LinAlgError::NoSolution);
        }
        Ok(right.neg())
    }
}

/// Null space of the matrix with the given rows, read off the reduced
/// row-echelon form: each free column `f` gives `e_f - Σ_p R[p][f]·e_p`.
/// Sparse constraint rows give sparse kernel vectors.
pub fn null_space_of_rows(ncols: usize, rows: &[SVec]) -> Subspace {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    let reduced = e.into_reduced_rows();
    let mut is_pivot = vec![false; ncols];
    let mut by_col: Vec<Vec<(usize, Q)>> = vec![Vec::new(); ncols];
    for r in &reduced {
        let (p, _) = r.leading().unwrap();
        is_pivot[p] = true;
        for (j, v) in r.iter().skip(1) {
            by_col[j].push((p, -v));
        }
    }
    let vecs: Vec<SVec> = (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut pairs = std::mem::take(&mut by_col[f]);
            pairs.push((f, Q::one()));
            SVec::from_pairs(pairs)
        })
        .collect();
    Subspace::from_independent(ncols, vecs)
}

/// `Σ c_k · vecs[k]`.
pub fn lincomb(vecs: &[SVec], c: &SVec) -> SVec {
    let mut acc: Vec<(usize, Q)> = Vec::new();
    for (k, ck) in c.iter() {
        for (i, v) in vecs[k].iter() {
            acc.push((i, v * ck));
        }
    }
    SVec::from_pairs(acc)
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.nrows, self.ncols())?;
        if self.nrows * self.ncols() <= 400 {
            for row in self.to_dense() {
                let s: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  [{}]", s.join(", "))?;
            }
        }
        Ok(())
    }
}
