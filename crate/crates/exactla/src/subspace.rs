//! Subspaces of `Q^n` given by an independent basis plus an echelon form for membership tests.

use crate::echelon::Echelon;
use crate::error::LinAlgError;
use crate::matrix::RatMatrix;
use crate::q::Q;
use crate::svec::SVec;

#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SVec>,
    ech: Echelon,
}

/// Equality as subspaces, independent of the chosen bases.
impl PartialEq for Subspace {
    fn eq(&self, other: &Subspace) -> bool {
        self.same_as(other)
    }
}

impl Eq for Subspace {}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Vec::new(), ech: Echelon::new(ambient) }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace::from_independent(ambient, (0..ambient).map(SVec::unit).collect())
    }

    /// Span of arbitrary vectors; dependent ones are dropped, the kept ones are stored unchanged.
    pub fn span(ambient: usize, vecs: &[SVec]) -> Subspace {
        let mut s = Subspace::zero(ambient);
        for v in vecs {
            s.push(v);
        }
        s
    }

    /// Vectors known to be independent. Independence is still checked.
    pub fn from_independent(ambient: usize, vecs: Vec<SVec>) -> Subspace {
        let mut s = Subspace::zero(ambient);
        for v in vecs {
            let added = s.push(&v);
            assert!(added, "vectors passed as independent are dependent");
        }
        s
    }

    /// Add `v` to the basis if it is not already in the span.
    pub fn push(&mut self, v: &SVec) -> bool {
        debug_assert!(v.max_index().is_none_or(|m| m < self.ambient));
        if self.ech.insert(v).is_some() {
            self.basis.push(v.clone());
            true
        } else {
            false
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SVec] {
        &self.basis
    }

    /// Basis as the columns of a matrix.
    pub fn basis_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.ambient, self.basis.clone())
    }

    /// Echelon rows spanning the same space.
    pub fn echelon_rows(&self) -> &[SVec] {
        self.ech.rows()
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.ech.contains(v)
    }

    /// Residual of `v` after reduction; zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &SVec) -> SVec {
        self.ech.reduce(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.dim() == other.dim() && self.contains_subspace(other)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in &other.basis {
            s.push(v);
        }
        s
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let n = self.ambient;
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(n);
        }
        if self.contains_subspace(other) {
            return other.clone();
        }
        if other.contains_subspace(self) {
            return self.clone();
        }
        let mut e = Echelon::new(2 * n);
        for v in &self.basis {
            e.insert(&v.concat(n, v));
        }
        let mut out = Vec::new();
        for v in &other.basis {
            let r = e.reduce(&v.concat(n, &SVec::new()));
            let (left, right) = r.split_at(n);
            if left.is_zero() {
                if !right.is_zero() {
                    out.push(right);
                }
            } else {
                e.insert_reduced(r);
            }
        }
        Subspace::span(n, &out)
    }

    /// Coordinates of `v` with respect to `basis()`, or `NotContained` when `v` is outside.
    pub fn coordinates(&self, v: &SVec) -> Result<SVec, LinAlgError> {
        Ok(self.coordinates_many(std::slice::from_ref(v))?.remove(0))
    }

    /// Coordinates of several vectors; `NotContained(k)` names the first one outside.
    pub fn coordinates_many(&self, vs: &[SVec]) -> Result<Vec<SVec>, LinAlgError> {
        // Echelon rows are combinations of basis vectors; recover those combinations once.
        let to_basis = self.rows_in_basis();
        vs.iter()
            .enumerate()
            .map(|(k, v)| {
                let (res, coeffs) = self.ech.reduce_with_coeffs(v);
                if !res.is_zero() {
                    return Err(LinAlgError::NotContained(k));
                }
                let mut acc = SVec::new();
                for (row, c) in coeffs {
                    acc = acc.axpy(&c, &to_basis[row]);
                }
                Ok(acc)
            })
            .collect()
    }

    /// Express each echelon row as a combination of `basis()`.
    fn rows_in_basis(&self) -> Vec<SVec> {
        // Row k was produced by inserting basis[k] after reduction by rows 0..k:
        // row_k = (basis[k] - Σ c_j row_j) / lead.
        let rows = self.ech.rows();
        let mut out: Vec<SVec> = Vec::with_capacity(rows.len());
        let mut partial = Echelon::new(self.ambient);
        for (k, b) in self.basis.iter().enumerate() {
            let (r, coeffs) = partial.reduce_with_coeffs(b);
            let lead = r.leading().unwrap().1.clone();
            let mut comb = SVec::unit(k);
            for (j, c) in coeffs {
                comb = comb.axpy(&-c, &out[j]);
            }
            let inv = lead.inv().unwrap();
            out.push(comb.scale(&inv));
            partial.insert_reduced(r);
        }
        debug_assert_eq!(partial.rows(), rows);
        out
    }

    /// Vectors of `self` that extend a basis of `small` to a basis of `self`.
    pub fn quotient_basis(&self, small: &Subspace) -> Result<Subspace, LinAlgError> {
        for (k, v) in small.basis.iter().enumerate() {
            if !self.contains(v) {
                return Err(LinAlgError::NotContained(k));
            }
        }
        let mut e = small.ech.clone();
        let mut out = Vec::new();
        for v in &self.basis {
            if e.insert(v).is_some() {
                out.push(v.clone());
            }
        }
        Ok(Subspace::from_independent(self.ambient, out))
    }

    /// Restrict to the coordinates in `keep` (a projection), renumbered in order.
    pub fn project(&self, keep: &[usize]) -> Subspace {
        let mut map = vec![usize::MAX; self.ambient];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let vecs: Vec<SVec> = self
            .basis
            .iter()
            .map(|v| v.remap(|i| if map[i] == usize::MAX { None } else { Some(map[i]) }))
            .collect();
        Subspace::span(keep.len(), &vecs)
    }

    /// Sum of the coordinates of `v` along a quotient complement: given
    /// `self ⊇ small` and a complement `comp`, write `v ∈ self` as `w + Σ c_k comp_k`
    /// with `w ∈ small` and return `c`.
    pub fn quotient_coordinates(small: &Subspace, comp: &Subspace, v: &SVec) -> Result<SVec, LinAlgError> {
        let joined = Subspace::from_independent(small.ambient, comp.basis.iter().chain(small.basis.iter()).cloned().collect());
        let c = joined.coordinates(v)?;
        Ok(c.filter(|i| i < comp.dim()))
    }

    /// Evaluate the bilinear form `f` on the basis, as a dense Gram matrix.
    pub fn gram<F: Fn(&SVec, &SVec) -> Q>(&self, f: F) -> Vec<Vec<Q>> {
        self.basis.iter().map(|a| self.basis.iter().map(|b| f(a, b)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_examples() {
        let big = Subspace::full(2);
        let small = Subspace::span(2, &[SVec::from_ints(&[1, 0])]);
        assert_eq!(big.quotient_basis(&small).unwrap().dim(), 1);
        assert_eq!(big.quotient_basis(&big).unwrap().dim(), 0);
        let line = Subspace::span(2, &[SVec::from_ints(&[1, 1])]);
        assert_eq!(small.quotient_basis(&line).unwrap_err(), LinAlgError::NotContained(0));
    }

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::span(3, &[SVec::from_ints(&[1, 0, 0]), SVec::from_ints(&[0, 1, 0])]);
        let b = Subspace::span(3, &[SVec::from_ints(&[0, 1, 1]), SVec::from_ints(&[1, 0, 1])]);
        let i = a.intersect(&b);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&SVec::from_ints(&[1, -1, 0])));
    }

    #[test]
    fn coordinates_in_given_basis() {
        let s = Subspace::span(3, &[SVec::from_ints(&[1, 1, 0]), SVec::from_ints(&[0, 2, 1])]);
        let c = s.coordinates(&SVec::from_ints(&[3, 7, 2])).unwrap();
        assert_eq!(c.to_dense(2), vec![Q::int(3), Q::int(2)]);
        assert!(s.coordinates(&SVec::from_ints(&[0, 0, 1])).is_err());
    }

    #[test]
    fn quotient_coordinates_ignore_small_part() {
        let small = Subspace::span(2, &[SVec::from_ints(&[1, 0])]);
        let comp = Subspace::span(2, &[SVec::from_ints(&[1, 1])]);
        let c = Subspace::quotient_coordinates(&small, &comp, &SVec::from_ints(&[5, 2])).unwrap();
        assert_eq!(c.to_dense(1), vec![Q::int(2)]);
    }
}
