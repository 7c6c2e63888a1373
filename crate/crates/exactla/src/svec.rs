//! Sparse rational vectors with sorted indices and no stored zeros.

use crate::q::Q;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SVec {
    idx: Vec<u32>,
    val: Vec<Q>,
}

impl SVec {
    pub fn new() -> SVec {
        SVec::default()
    }

    /// Unit vector `e_i`.
    pub fn unit(i: usize) -> SVec {
        SVec { idx: vec![i as u32], val: vec![Q::one()] }
    }

    /// Build from arbitrary `(index, value)` pairs; duplicates are summed and zeros dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> SVec {
        let mut p: Vec<(usize, Q)> = pairs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        p.sort_by_key(|(i, _)| *i);
        let mut out = SVec::new();
        for (i, v) in p {
            if out.idx.last() == Some(&(i as u32)) {
                let last = out.val.last_mut().unwrap();
                *last += &v;
                if last.is_zero() {
                    out.idx.pop();
                    out.val.pop();
                }
            } else {
                out.idx.push(i as u32);
                out.val.push(v);
            }
        }
        out
    }

    pub fn from_dense(d: &[Q]) -> SVec {
        let mut out = SVec::new();
        for (i, v) in d.iter().enumerate() {
            if !v.is_zero() {
                out.idx.push(i as u32);
                out.val.push(v.clone());
            }
        }
        out
    }

    pub fn from_ints(d: &[i64]) -> SVec {
        SVec::from_dense(&d.iter().map(|&x| Q::int(x)).collect::<Vec<_>>())
    }

    pub fn to_dense(&self, n: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); n];
        for (i, v) in self.iter() {
            out[i] = v.clone();
        }
        out
    }

    /// Append an entry; the index must exceed every stored index.
    pub fn push(&mut self, i: usize, v: Q) {
        debug_assert!(self.idx.last().is_none_or(|&l| (l as usize) < i));
        if !v.is_zero() {
            self.idx.push(i as u32);
            self.val.push(v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.idx.iter().map(|&i| i as usize).zip(self.val.iter())
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.idx.iter().map(|&i| i as usize)
    }

    pub fn get(&self, i: usize) -> Q {
        match self.idx.binary_search(&(i as u32)) {
            Ok(p) => self.val[p].clone(),
            Err(_) => Q::zero(),
        }
    }

    /// Smallest index with a nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Q)> {
        self.idx.first().map(|&i| (i as usize, &self.val[0]))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.idx.last().map(|&i| i as usize)
    }

    pub fn scale(&self, s: &Q) -> SVec {
        if s.is_zero() {
            return SVec::new();
        }
        SVec { idx: self.idx.clone(), val: self.val.iter().map(|v| v * s).collect() }
    }

    pub fn neg(&self) -> SVec {
        SVec { idx: self.idx.clone(), val: self.val.iter().map(|v| -v).collect() }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: &Q, other: &SVec) -> SVec {
        if s.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut idx = Vec::with_capacity(self.idx.len() + other.idx.len());
        let mut val = Vec::with_capacity(self.idx.len() + other.idx.len());
        let (mut a, mut b) = (0, 0);
        while a < self.idx.len() || b < other.idx.len() {
            let ia = self.idx.get(a).copied().unwrap_or(u32::MAX);
            let ib = other.idx.get(b).copied().unwrap_or(u32::MAX);
            if ia < ib {
                idx.push(ia);
                val.push(self.val[a].clone());
                a += 1;
            } else if ib < ia {
                idx.push(ib);
                val.push(s * &other.val[b]);
                b += 1;
            } else {
                let v = &self.val[a] + &(s * &other.val[b]);
                if !v.is_zero() {
                    idx.push(ia);
                    val.push(v);
                }
                a += 1;
                b += 1;
            }
        }
        SVec { idx, val }
    }

    pub fn add(&self, other: &SVec) -> SVec {
        self.axpy(&Q::one(), other)
    }

    pub fn sub(&self, other: &SVec) -> SVec {
        self.axpy(&-Q::one(), other)
    }

    /// Euclidean dot product.
    pub fn dot(&self, other: &SVec) -> Q {
        let mut acc = Q::zero();
        let (mut a, mut b) = (0, 0);
        while a < self.idx.len() && b < other.idx.len() {
            match self.idx[a].cmp(&other.idx[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += &(&self.val[a] * &other.val[b]);
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Dot product against a dense vector.
    pub fn dot_dense(&self, d: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (i, v) in self.iter() {
            if !d[i].is_zero() {
                acc += &(v * &d[i]);
            }
        }
        acc
    }

    /// Keep only entries whose index satisfies `keep`.
    pub fn filter<F: Fn(usize) -> bool>(&self, keep: F) -> SVec {
        let mut out = SVec::new();
        for (i, v) in self.iter() {
            if keep(i) {
                out.push(i, v.clone());
            }
        }
        out
    }

    /// Relabel indices through a strictly increasing map, or drop them when the map returns `None`.
    pub fn remap<F: Fn(usize) -> Option<usize>>(&self, f: F) -> SVec {
        SVec::from_pairs(self.iter().filter_map(|(i, v)| f(i).map(|j| (j, v.clone()))))
    }

    /// Shift every index by `offset`.
    pub fn shifted(&self, offset: usize) -> SVec {
        SVec { idx: self.idx.iter().map(|&i| i + offset as u32).collect(), val: self.val.clone() }
    }

    /// Split at `n`: entries below `n`, and entries at or above `n` shifted down by `n`.
    pub fn split_at(&self, n: usize) -> (SVec, SVec) {
        let p = self.idx.partition_point(|&i| (i as usize) < n);
        let lo = SVec { idx: self.idx[..p].to_vec(), val: self.val[..p].to_vec() };
        let hi = SVec { idx: self.idx[p..].iter().map(|&i| i - n as u32).collect(), val: self.val[p..].to_vec() };
        (lo, hi)
    }

    /// Concatenate `self` (occupying `0..n`) with `other` shifted to start at `n`.
    pub fn concat(&self, n: usize, other: &SVec) -> SVec {
        debug_assert!(self.max_index().is_none_or(|m| m < n));
        let mut idx = self.idx.clone();
        let mut val = self.val.clone();
        idx.extend(other.idx.iter().map(|&i| i + n as u32));
        val.extend(other.val.iter().cloned());
        SVec { idx, val }
    }

    /// Multiply by the least common multiple of the denominators, then divide
    /// by the gcd of the numerators. The sign makes the leading entry positive.
    pub fn primitive(&self) -> SVec {
        use num_integer::Integer;
        use num_traits::{One, Zero};
        if self.is_zero() {
            return SVec::new();
        }
        let mut l = num_bigint::BigInt::one();
        for v in &self.val {
            l = l.lcm(&v.denom());
        }
        let scaled: Vec<num_bigint::BigInt> = self.val.iter().map(|v| v.numer() * (&l / v.denom())).collect();
        let mut g = num_bigint::BigInt::zero();
        for s in &scaled {
            g = g.gcd(s);
        }
        let sign = if scaled[0] < num_bigint::BigInt::zero() { -1 } else { 1 };
        let g = g * sign;
        SVec { idx: self.idx.clone(), val: scaled.into_iter().map(|s| Q::from(s / &g)).collect() }
    }
}
