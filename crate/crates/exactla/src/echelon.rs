//! Incremental row-echelon bases of sparse rational vectors.
//!
//! Each stored row has a distinct leading index with coefficient 1. Reducing
//! a vector eliminates every entry that sits at a pivot index, so a vector
//! lies in the span exactly when its reduction is zero.

use crate::q::Q;
use crate::svec::SVec;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<SVec>,
    pivot_row: Vec<u32>,
}

impl Echelon {
    pub fn new(dim: usize) -> Echelon {
        Echelon { dim, rows: Vec::new(), pivot_row: vec![NONE; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SVec] {
        &self.rows
    }

    /// Leading index of each row, in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.leading().unwrap().0).collect()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivot_row[i] != NONE
    }

    fn next_pivot_entry(&self, v: &SVec, start: usize) -> Option<(usize, Q)> {
        v.iter().find(|&(i, _)| i >= start && self.pivot_row[i] != NONE).map(|(i, c)| (i, c.clone()))
    }

    /// Remove all pivot entries from `v`.
    pub fn reduce(&self, v: &SVec) -> SVec {
        let mut v = v.clone();
        let mut start = 0;
        while let Some((i, c)) = self.next_pivot_entry(&v, start) {
            let r = &self.rows[self.pivot_row[i] as usize];
            v = v.axpy(&-c, r);
            start = i + 1;
        }
        v
    }

    /// Reduce `v` and also return the multiples of the stored rows that were
    /// subtracted, so that `v = residual + Σ coeff·rows[row]`.
    pub fn reduce_with_coeffs(&self, v: &SVec) -> (SVec, Vec<(usize, Q)>) {
        let mut v = v.clone();
        let mut coeffs = Vec::new();
        let mut start = 0;
        while let Some((i, c)) = self.next_pivot_entry(&v, start) {
            let row = self.pivot_row[i] as usize;
            v = v.axpy(&-&c, &self.rows[row]);
            coeffs.push((row, c));
            start = i + 1;
        }
        (v, coeffs)
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Insert `v`; returns the new row index when `v` was independent of the current rows.
    pub fn insert(&mut self, v: &SVec) -> Option<usize> {
        let r = self.reduce(v);
        self.insert_reduced(r)
    }

    /// Insert a vector already reduced against this basis.
    pub fn insert_reduced(&mut self, r: SVec) -> Option<usize> {
        let (lead, c) = r.leading()?;
        let inv = c.inv().expect("leading entry is nonzero");
        let r = if inv.is_one() { r } else { r.scale(&inv) };
        self.pivot_row[lead] = self.rows.len() as u32;
        self.rows.push(r);
        Some(self.rows.len() - 1)
    }

    /// Back-substitute so every pivot column is zero outside its own row, and
    /// sort rows by leading index.
    pub fn into_reduced_rows(self) -> Vec<SVec> {
        let mut rows = self.rows;
        rows.sort_by_key(|r| r.leading().unwrap().0);
        let mut pivot_row = vec![NONE; self.dim];
        for (k, r) in rows.iter().enumerate() {
            pivot_row[r.leading().unwrap().0] = k as u32;
        }
        for k in (0..rows.len()).rev() {
            let lead = rows[k].leading().unwrap().0;
            let mut v = rows[k].clone();
            let mut start = lead + 1;
            loop {
                let next = v.iter().find(|&(i, _)| i >= start && pivot_row[i] != NONE).map(|(i, c)| (i, c.clone()));
                let Some((i, c)) = next else { break };
                v = v.axpy(&-c, &rows[pivot_row[i] as usize]);
                start = i + 1;
            }
            rows[k] = v;
        }
        rows
    }
}
