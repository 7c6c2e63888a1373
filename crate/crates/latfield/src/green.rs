//! Retarded and advanced Green operators of `□` by explicit time stepping.
//!
//! The rows of `□` couple a cell only to cells at most one time step away, and
//! to exactly one cell one step ahead (its time translate). Solving row `c` for
//! that translate gives an explicit recursion: starting from zero data on the
//! first slab, every later value is fixed by one earlier row. The result
//! satisfies `□ u = f` on every row except those of the final slab, and is the
//! unique such solution vanishing on the first slab.

use exactla::{SVec, Q};

use crate::complex::{blockwise, Cell, CubicalComplex, SubcomplexEmbedding, Support};
use crate::error::ModelError;
use crate::lorentz::{causal_future, causal_past, LorentzOps};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GreenDirection {
    Retarded,
    Advanced,
}

impl GreenDirection {
    pub fn reversed(self) -> GreenDirection {
        match self {
            GreenDirection::Retarded => GreenDirection::Advanced,
            GreenDirection::Advanced => GreenDirection::Retarded,
        }
    }
}

/// One step of the recursion: `u[target] = scale * (f[row] - Σ coef * u[j])`.
#[derive(Clone, Debug)]
struct Step {
    target: usize,
    row: usize,
    scale: Q,
    others: Vec<(usize, Q)>,
}

/// Precomputed stepping schedules for every degree and both directions.
#[derive(Clone, Debug)]
pub struct GreenOps {
    counts: Vec<usize>,
    /// `schedules[k][0]` retarded, `schedules[k][1]` advanced.
    schedules: Vec<[Vec<Step>; 2]>,
}

fn schedule(x: &CubicalComplex, ops: &LorentzOps, k: usize, dir: GreenDirection) -> Result<Vec<Step>, ModelError> {
    let rows = ops.box_matrix(k).transpose();
    let tf = x.factors()[0].n();
    let forward = dir == GreenDirection::Retarded;
    let mut order: Vec<usize> = (0..x.count(k)).collect();
    order.sort_by_key(|&i| {
        let tp = x.time_position(x.cell(k, i)) as isize;
        (if forward { tp } else { -tp }, i)
    });
    let mut steps = Vec::new();
    for c in order {
        let cell = *x.cell(k, c);
        let e = cell.is_edge(0) as usize;
        let next_pos = if forward {
            if cell.pos(0) + 1 + e >= tf {
                continue;
            }
            cell.pos(0) + 1
        } else {
            if cell.pos(0) == 0 {
                continue;
            }
            cell.pos(0) - 1
        };
        let nxt: Cell = cell.with(0, cell.is_edge(0), next_pos);
        let Some(target) = x.index_of(&nxt) else { continue };
        let row = rows.col(c);
        let pivot = row.get(target);
        if pivot.is_zero() {
            return Err(ModelError::Config(format!("□ does not couple cell {:?} to its time translate", cell.parts(x.nfactors()))));
        }
        let here = x.time_position(&cell) as isize;
        let mut others = Vec::new();
        for (j, v) in row.iter() {
            if j == target {
                continue;
            }
            let tp = x.time_position(x.cell(k, j)) as isize;
            let ahead = if forward { tp > here } else { tp < here };
            if ahead {
                return Err(ModelError::Config(format!(
                    "□ couples cell {:?} to more than one later cell",
                    cell.parts(x.nfactors())
                )));
            }
            others.push((j, v.clone()));
        }
        steps.push(Step { target, row: c, scale: pivot.inv()?, others });
    }
    Ok(steps)
}

impl GreenOps {
    /// Build the stepping schedules of a product complex with a time factor.
    pub fn new(x: &CubicalComplex, ops: &LorentzOps) -> Result<GreenOps, ModelError> {
        if !x.has_time() {
            return Err(ModelError::Config("Green operators need a time factor".into()));
        }
        let mut schedules = Vec::new();
        for k in 0..=x.dim() {
            schedules.push([schedule(x, ops, k, GreenDirection::Retarded)?, schedule(x, ops, k, GreenDirection::Advanced)?]);
        }
        Ok(GreenOps { counts: x.counts(), schedules })
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts[k]
    }

    /// Scalar solve without support checks.
    pub fn solve_scalar(&self, k: usize, dir: GreenDirection, f: &SVec) -> SVec {
        let n = self.counts[k];
        if f.is_zero() {
            return SVec::new();
        }
        let fd = f.to_dense(n);
        let mut u = vec![Q::zero(); n];
        for s in &self.schedules[k][dir as usize] {
            let mut acc = fd[s.row].clone();
            for (j, c) in &s.others {
                if !u[*j].is_zero() {
                    acc -= &(c * &u[*j]);
                }
            }
            if !acc.is_zero() {
                u[s.target] = &acc * &s.scale;
            }
        }
        SVec::from_dense(&u)
    }

    /// Scalar `G = G⁺ - G⁻` without support checks.
    pub fn propagate_scalar(&self, k: usize, f: &SVec) -> SVec {
        self.solve_scalar(k, GreenDirection::Retarded, f).sub(&self.solve_scalar(k, GreenDirection::Advanced, f))
    }
}

/// Green operators of a spacetime: its own recursion for products, or the
/// restriction of the host's operators for carved complexes.
#[derive(Clone, Debug)]
pub enum Propagator {
    Own(GreenOps),
    Restricted { host: Box<GreenOps>, embedding: SubcomplexEmbedding },
}

impl Propagator {
    /// Assemble the Green operators of `x`; carved complexes use their host.
    pub fn new(x: &CubicalComplex, ops: &LorentzOps) -> Result<Propagator, ModelError> {
        if !x.spec().is_carved() {
            return Ok(Propagator::Own(GreenOps::new(x, ops)?));
        }
        let host = CubicalComplex::build(&x.spec().host())?;
        let host_ops = LorentzOps::new(&host);
        let embedding = SubcomplexEmbedding::inclusion(x, &host)?;
        Ok(Propagator::Restricted { host: Box::new(GreenOps::new(&host, &host_ops)?), embedding })
    }

    pub fn solve_scalar(&self, k: usize, dir: GreenDirection, f: &SVec) -> SVec {
        match self {
            Propagator::Own(g) => g.solve_scalar(k, dir, f),
            Propagator::Restricted { host, embedding } => {
                embedding.pull(k, &host.solve_scalar(k, dir, &embedding.push(k, f)))
            }
        }
    }

    pub fn propagate_scalar(&self, k: usize, f: &SVec) -> SVec {
        match self {
            Propagator::Own(g) => g.propagate_scalar(k, f),
            Propagator::Restricted { host, embedding } => {
                embedding.pull(k, &host.propagate_scalar(k, &embedding.push(k, f)))
            }
        }
    }
}

fn check_compact(x: &CubicalComplex, k: usize, src: &SVec) -> Result<(), ModelError> {
    let n = x.count(k);
    if let Some(i) = src.indices().find(|&i| x.is_margin(k, i % n)) {
        return Err(ModelError::MarginViolation(format!(
            "{k}-cell {:?} (component {})",
            x.cell(k, i % n).parts(x.nfactors()),
            i / n
        )));
    }
    Ok(())
}

/// `G± src` for a compactly supported, component-major `k`-cochain.
pub fn green(
    x: &CubicalComplex,
    g: &Propagator,
    k: usize,
    dir: GreenDirection,
    src: &SVec,
    comps: usize,
) -> Result<SVec, ModelError> {
    check_compact(x, k, src)?;
    let n = x.count(k);
    Ok(blockwise(src, n, n, comps, |b| g.solve_scalar(k, dir, b)))
}

/// `G src = G⁺ src - G⁻ src` for a compactly supported cochain.
pub fn propagator(x: &CubicalComplex, g: &Propagator, k: usize, src: &SVec, comps: usize) -> Result<SVec, ModelError> {
    check_compact(x, k, src)?;
    let n = x.count(k);
    Ok(blockwise(src, n, n, comps, |b| g.propagate_scalar(k, b)))
}

/// Whether `v` is compactly supported, per component.
pub fn is_compact(x: &CubicalComplex, k: usize, v: &SVec) -> bool {
    let n = x.count(k);
    v.indices().all(|i| !x.is_margin(k, i % n))
}

/// Rows of `□` on which `□ u = f` is required: all but the final slab in the solve direction.
pub fn solved_rows(x: &CubicalComplex, k: usize, dir: GreenDirection) -> Vec<usize> {
    let tf = x.factors()[0].n();
    (0..x.count(k))
        .filter(|&i| {
            let c = x.cell(k, i);
            match dir {
                GreenDirection::Retarded => c.pos(0) + 1 + (c.is_edge(0) as usize) < tf,
                GreenDirection::Advanced => c.pos(0) > 0,
            }
        })
        .collect()
}

/// Cells that are neither margin cells nor in the time-margin; used to scope identity checks.
pub fn interior_cells(x: &CubicalComplex, k: usize) -> Vec<usize> {
    x.free_cells(k, Support::Compact)
}

/// Outcome of one identity over all sampled inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityTally {
    pub identity: String,
    pub checked: usize,
    pub failed: usize,
    /// Degree and source of the first failure.
    pub first_failure: Option<String>,
}

impl IdentityTally {
    fn new(identity: &str) -> IdentityTally {
        IdentityTally { identity: identity.into(), checked: 0, failed: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    pub fn passes(&self) -> bool {
        self.failed == 0
    }
}

fn random_compact(rng: &mut ChaCha8Rng, x: &CubicalComplex, k: usize, nnz: usize) -> SVec {
    let free = x.free_cells(k, Support::Compact);
    let mut v = SVec::new();
    if free.is_empty() {
        return v;
    }
    for _ in 0..nnz {
        let c = free[rng.gen_range(0..free.len())];
        v = v.add(&SVec::unit(c).scale(&Q::int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 })));
    }
    v
}

fn agree_on(a: &SVec, b: &SVec, cells: &[usize]) -> bool {
    cells.iter().all(|&i| a.get(i) == b.get(i))
}

/// Check on `samples` random compact sources: `G± d = d G±` and `G± δ = δ G±`
/// on compact cells, skew-adjointness of `G`, and support of `G±` in the causal
/// future or past of the source.
pub fn check_identities(
    x: &CubicalComplex,
    ops: &LorentzOps,
    g: &Propagator,
    samples: usize,
    seed: u64,
) -> Result<Vec<IdentityTally>, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["green_commutes_with_d", "green_commutes_with_delta", "propagator_skew_adjoint", "support_in_causal_cone"];
    let mut tallies: Vec<IdentityTally> = names.iter().map(|n| IdentityTally::new(n)).collect();
    let top = x.dim();
    for s in 0..samples {
        let k = s % (top + 1);
        let a = random_compact(&mut rng, x, k, 3);
        let b = random_compact(&mut rng, x, k, 3);
        let label = |what: &str| format!("sample {s}, degree {k}, {what}");
        for dir in [GreenDirection::Retarded, GreenDirection::Advanced] {
            let ga = green(x, g, k, dir, &a, 1)?;
            if k < top {
                let interior = x.free_cells(k + 1, Support::Compact);
                let lhs = green(x, g, k + 1, dir, &ops.d(k, &a, 1)?, 1)?;
                let rhs = ops.d(k, &ga, 1)?;
                tallies[0].record(agree_on(&lhs, &rhs, &interior), || label(&format!("{dir:?}")));
            }
            if k > 0 {
                let interior = x.free_cells(k - 1, Support::Compact);
                // `δa` may reach the margin, so solve without the compactness check.
                let lhs = g.solve_scalar(k - 1, dir, &ops.delta(k, &a, 1)?);
                let rhs = ops.delta(k, &ga, 1)?;
                tallies[1].record(agree_on(&lhs, &rhs, &interior), || label(&format!("{dir:?}")));
            }
            let seeds: Vec<(usize, usize)> = a.indices().map(|i| (k, i)).collect();
            let cone = match dir {
                GreenDirection::Retarded => causal_future(x, &seeds),
                GreenDirection::Advanced => causal_past(x, &seeds),
            };
            tallies[3].record(ga.indices().all(|i| cone.covers(x, x.cell(k, i))), || label(&format!("{dir:?}")));
        }
        let ga = propagator(x, g, k, &a, 1)?;
        let gb = propagator(x, g, k, &b, 1)?;
        let skew = ops.pairing(k, &a, &gb) == -ops.pairing(k, &ga, &b) && ops.pairing(k, &a, &ga).is_zero();
        tallies[2].record(skew, || label("pairing"));
    }
    Ok(tallies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Factor;

    #[test]
    fn zero_source_gives_zero() {
        let x = CubicalComplex::product(&[Factor::Time(5), Factor::Cycle(4)]).unwrap();
        let ops = LorentzOps::new(&x);
        let g = Propagator::new(&x, &ops).unwrap();
        for k in 0..=2 {
            assert!(propagator(&x, &g, k, &SVec::new(), 1).unwrap().is_zero());
        }
    }

    #[test]
    fn margin_source_rejected() {
        let x = CubicalComplex::product(&[Factor::Time(5), Factor::Cycle(4)]).unwrap();
        let ops = LorentzOps::new(&x);
        let g = Propagator::new(&x, &ops).unwrap();
        let v = x.index_of(&Cell::vertex(&[0, 1])).unwrap();
        assert!(matches!(
            green(&x, &g, 0, GreenDirection::Retarded, &SVec::unit(v), 1),
            Err(ModelError::MarginViolation(_))
        ));
    }
}
