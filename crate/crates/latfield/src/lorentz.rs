//! Lorentzian weights, the indefinite pairing, the codifferential, the
//! Hodge-d'Alembert operator and combinatorial causal cones.
//!
//! Cell weights carry the sign `-1` for cells extending along the time factor
//! and the ratio (dual volume / primal volume) of the spacings as magnitude.
//! The codifferential is the weight-adjoint of `d`: `δ = W⁻¹ dᵀ W`, so
//! `⟨d a, b⟩ = ⟨a, δ b⟩` holds exactly for all cochains of the finite complex.

use std::collections::{HashSet, VecDeque};

use exactla::{RatMatrix, SVec, Q};

use crate::complex::{blockwise, Cell, CubicalComplex, SubcomplexEmbedding};
use crate::error::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Future,
    Past,
}

/// Weight of a cell: sign from the time factor, magnitude from the spacings.
pub fn cell_weight(x: &CubicalComplex, c: &Cell) -> Q {
    let mut w = Q::one();
    for i in 0..x.nfactors() {
        let h = x.spacing(i);
        if c.is_edge(i) {
            w = &w / &h;
        } else {
            w = &w * &h;
        }
    }
    if x.has_time() && c.is_edge(0) {
        -w
    } else {
        w
    }
}

/// Operators of one complex: weights, `d`, `δ` and `□` in every degree.
#[derive(Clone, Debug)]
pub struct LorentzOps {
    weights: Vec<Vec<Q>>,
    d: Vec<RatMatrix>,
    /// `delta[k]`: `C^k → C^{k-1}`, empty for `k = 0`.
    delta: Vec<RatMatrix>,
    boxes: Vec<RatMatrix>,
}

impl LorentzOps {
    pub fn new(x: &CubicalComplex) -> LorentzOps {
        let m = x.dim();
        let weights: Vec<Vec<Q>> = (0..=m).map(|k| x.cells(k).iter().map(|c| cell_weight(x, c)).collect()).collect();
        let d: Vec<RatMatrix> = (0..m).map(|k| x.d_matrix(k).unwrap().clone()).collect();
        let mut delta = vec![RatMatrix::zeros(0, x.count(0))];
        for k in 1..=m {
            let inv: Vec<Q> = weights[k - 1].iter().map(|w| w.inv().unwrap()).collect();
            delta.push(d[k - 1].transpose().scale_rows(&inv).scale_cols(&weights[k]));
        }
        let mut boxes = Vec::new();
        for k in 0..=m {
            let n = x.count(k);
            let mut b = RatMatrix::zeros(n, n);
            if k < m {
                b = b.add(&delta[k + 1].mul(&d[k]).unwrap()).unwrap();
            }
            if k > 0 {
                b = b.add(&d[k - 1].mul(&delta[k]).unwrap()).unwrap();
            }
            boxes.push(b);
        }
        LorentzOps { weights, d, delta, boxes }
    }

    pub fn top(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self, k: usize) -> &[Q] {
        &self.weights[k]
    }

    pub fn count(&self, k: usize) -> usize {
        self.weights[k].len()
    }

    /// `⟨a, b⟩ = Σ_c a_c b_c w_c` for scalar or component-major cochains.
    pub fn pairing(&self, k: usize, a: &SVec, b: &SVec) -> Q {
        let w = &self.weights[k];
        let n = w.len();
        let (mut i, mut j) = (a.iter().peekable(), b.iter().peekable());
        let mut acc = Q::zero();
        while let (Some(&(ia, va)), Some(&(ib, vb))) = (i.peek(), j.peek()) {
            if ia < ib {
                i.next();
            } else if ib < ia {
                j.next();
            } else {
                acc += &(&(va * vb) * &w[ia % n]);
                i.next();
                j.next();
            }
        }
        acc
    }

    /// `⟨a, b⟩` with `b` dense.
    pub fn pairing_dense(&self, k: usize, a: &SVec, b: &[Q]) -> Q {
        let w = &self.weights[k];
        let n = w.len();
        let mut acc = Q::zero();
        for (i, v) in a.iter() {
            if !b[i].is_zero() {
                acc += &(&(v * &b[i]) * &w[i % n]);
            }
        }
        acc
    }

    /// Multiply entrywise by the weights: `W v`.
    pub fn weigh(&self, k: usize, v: &SVec) -> SVec {
        let w = &self.weights[k];
        let n = w.len();
        SVec::from_pairs(v.iter().map(|(i, x)| (i, x * &w[i % n])))
    }

    pub fn d_matrix(&self, k: usize) -> Result<&RatMatrix, ModelError> {
        self.d.get(k).ok_or(ModelError::TopDegree(k))
    }

    pub fn delta_matrix(&self, k: usize) -> Result<&RatMatrix, ModelError> {
        if k == 0 {
            return Err(ModelError::DegreeZero);
        }
        self.delta.get(k).ok_or(ModelError::TopDegree(k))
    }

    pub fn box_matrix(&self, k: usize) -> &RatMatrix {
        &self.boxes[k]
    }

    /// `d` applied per component.
    pub fn d(&self, k: usize, v: &SVec, comps: usize) -> Result<SVec, ModelError> {
        let m = self.d_matrix(k)?;
        Ok(blockwise(v, self.count(k), self.count(k + 1), comps, |b| m.apply(b)))
    }

    /// `δ` applied per component.
    pub fn delta(&self, k: usize, v: &SVec, comps: usize) -> Result<SVec, ModelError> {
        let m = self.delta_matrix(k)?;
        Ok(blockwise(v, self.count(k), self.count(k - 1), comps, |b| m.apply(b)))
    }

    /// `□` applied per component.
    pub fn box_apply(&self, k: usize, v: &SVec, comps: usize) -> SVec {
        let m = &self.boxes[k];
        blockwise(v, self.count(k), self.count(k), comps, |b| m.apply(b))
    }

    /// `□` couples only cells extending along the same set of factors.
    pub fn box_is_block_diagonal(&self, x: &CubicalComplex, k: usize) -> bool {
        let nf = x.nfactors();
        self.boxes[k]
            .triplets()
            .all(|(i, j, _)| x.cell(k, i).edge_factors(nf) == x.cell(k, j).edge_factors(nf))
    }
}

/// Hodge star from `k`-cochains to `(m-k)`-cochains on a product complex with unit spacings.
///
/// Each factor is dualized separately: an edge `[p, p+1]` goes to vertex `p`
/// and a vertex `p` goes to edge `[p-1, p]` (dropped at the lower end of an
/// open factor). The sign is `Π ε_i (-1)^i` over the edge factors `i` of the
/// output cell, with `ε = +1` on time and `-1` on space. With this choice
/// `d ∗ = ∗ δ` holds on every interior cell.
pub fn hodge_star(x: &CubicalComplex, k: usize, v: &SVec) -> Result<SVec, ModelError> {
    if x.spec().spacings.as_ref().is_some_and(|s| s.iter().any(|q| !q.is_one())) {
        return Err(ModelError::Config("the Hodge star is only available for unit spacings".into()));
    }
    if x.spec().is_carved() {
        return Err(ModelError::Config("the Hodge star needs a product complex".into()));
    }
    let mut out = Vec::new();
    'cells: for (i, q) in v.iter() {
        let c = x.cell(k, i);
        let mut dual = *c;
        let mut sign = 1i64;
        for (f, factor) in x.factors().iter().enumerate() {
            if c.is_edge(f) {
                dual = dual.with(f, false, c.pos(f));
            } else {
                let p = c.pos(f);
                let q = match (p, factor.is_open()) {
                    (0, true) => continue 'cells,
                    (0, false) => factor.n() - 1,
                    _ => p - 1,
                };
                dual = dual.with(f, true, q);
                let eps = if x.has_time() && f == 0 { 1 } else { -1 };
                sign *= if f % 2 == 0 { eps } else { -eps };
            }
        }
        if let Some(j) = x.index_of(&dual) {
            out.push((j, if sign < 0 { -q } else { q.clone() }));
        }
    }
    Ok(SVec::from_pairs(out))
}

/// One unit step in time with at most one unit step along one spatial factor.
fn step_neighbours(x: &CubicalComplex, v: &Cell, dir: Direction) -> Vec<Cell> {
    let t = v.pos(0) as isize + if dir == Direction::Future { 1 } else { -1 };
    let tf = x.factors()[0];
    if t < 0 || t as usize >= tf.n() {
        return Vec::new();
    }
    let base = v.with(0, false, t as usize);
    let mut out = vec![base];
    for (i, f) in x.factors().iter().enumerate().skip(1) {
        let p = v.pos(i);
        let n = f.n();
        if f.is_open() {
            if p + 1 < n {
                out.push(base.with(i, false, p + 1));
            }
            if p > 0 {
                out.push(base.with(i, false, p - 1));
            }
        } else {
            out.push(base.with(i, false, (p + 1) % n));
            out.push(base.with(i, false, (p + n - 1) % n));
        }
    }
    out.retain(|c| x.index_of(c).is_some());
    out
}

/// Vertices reachable from the seeds by the unit-speed step relation (seeds included).
pub fn vertex_cone(x: &CubicalComplex, seeds: &[Cell], dir: Direction) -> HashSet<Cell> {
    let mut seen: HashSet<Cell> = seeds.iter().copied().filter(|c| x.index_of(c).is_some()).collect();
    if !x.has_time() {
        return seen;
    }
    let mut queue: VecDeque<Cell> = seen.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for w in step_neighbours(x, &v, dir) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Causal future or past of a set of cells, as a vertex set.
#[derive(Clone, Debug)]
pub struct CausalCone {
    pub direction: Direction,
    pub vertices: HashSet<Cell>,
}

impl CausalCone {
    /// Whether every vertex of the cell lies in the cone.
    pub fn covers(&self, x: &CubicalComplex, c: &Cell) -> bool {
        x.vertices_of(c).iter().all(|v| self.vertices.contains(v))
    }

    /// Whether some vertex of the cell lies in the cone.
    pub fn touches(&self, x: &CubicalComplex, c: &Cell) -> bool {
        x.vertices_of(c).iter().any(|v| self.vertices.contains(v))
    }
}

fn seed_vertices(x: &CubicalComplex, cells: &[(usize, usize)]) -> Vec<Cell> {
    let mut out: Vec<Cell> = cells.iter().flat_map(|&(k, i)| x.vertices_of(x.cell(k, i))).collect();
    out.sort();
    out.dedup();
    out
}

/// `J⁺` of a set of `(degree, index)` cells.
pub fn causal_future(x: &CubicalComplex, cells: &[(usize, usize)]) -> CausalCone {
    CausalCone { direction: Direction::Future, vertices: vertex_cone(x, &seed_vertices(x, cells), Direction::Future) }
}

/// `J⁻` of a set of `(degree, index)` cells.
pub fn causal_past(x: &CubicalComplex, cells: &[(usize, usize)]) -> CausalCone {
    CausalCone { direction: Direction::Past, vertices: vertex_cone(x, &seed_vertices(x, cells), Direction::Past) }
}

/// Compare, for every source vertex, the cone computed inside the source with
/// the target cone restricted to the image. Returns the first mismatch.
pub fn causal_compatibility_witness(
    source: &CubicalComplex,
    target: &CubicalComplex,
    f: &SubcomplexEmbedding,
) -> Option<(Cell, Direction)> {
    let image: HashSet<Cell> = f.maps[0].iter().map(|&j| *target.cell(0, j)).collect();
    let to_target = |c: &Cell| *target.cell(0, f.maps[0][source.index_of(c).unwrap()]);
    for v in source.cells(0) {
        for dir in [Direction::Future, Direction::Past] {
            let inner: HashSet<Cell> = vertex_cone(source, &[*v], dir).iter().map(to_target).collect();
            let outer: HashSet<Cell> =
                vertex_cone(target, &[to_target(v)], dir).into_iter().filter(|w| image.contains(w)).collect();
            if inner != outer {
                return Some((*v, dir));
            }
        }
    }
    None
}

pub fn is_causally_compatible(source: &CubicalComplex, target: &CubicalComplex, f: &SubcomplexEmbedding) -> bool {
    causal_compatibility_witness(source, target, f).is_none()
}

/// Cells of degree `k` whose time coordinates all lie in `[t0, t1]`.
pub fn cauchy_slab(x: &CubicalComplex, k: usize, t0: usize, t1: usize) -> Vec<usize> {
    (0..x.count(k))
        .filter(|&i| {
            let c = x.cell(k, i);
            let lo = c.pos(0);
            let hi = lo + c.is_edge(0) as usize;
            lo >= t0 && hi <= t1
        })
        .collect()
}
