//! Homology and cohomology over the integers and rationals, the evaluation
//! pairing between closed cochains and cycles, and the duality solver that
//! turns a cycle into a compactly supported coclosed cochain.

use exactla::{null_space_of_rows, smith_invariants, RatMatrix, SVec, Subspace, Q};
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::complex::{CubicalComplex, Support};
use crate::error::ModelError;
use crate::lorentz::LorentzOps;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coefficients {
    Int,
    Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HomologyMode {
    Absolute,
    /// Homology of the quotient by the margin subcomplex.
    RelMargin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub degree: usize,
    pub free_rank: usize,
    /// Invariant factors greater than one (empty over the rationals).
    pub torsion: Vec<BigInt>,
    /// Cycles whose classes form a basis of the free part, indexed by all `k`-cells.
    pub representatives: Vec<SVec>,
}

/// The `k`-th group of a chain complex `A --incoming--> C --outgoing--> B`.
#[derive(Clone, Debug)]
pub struct ChainPair<'a> {
    pub dim: usize,
    /// Map into the middle space (`dim` rows).
    pub incoming: &'a RatMatrix,
    /// Map out of the middle space (`dim` columns).
    pub outgoing: &'a RatMatrix,
}

impl ChainPair<'_> {
    pub fn free_rank(&self) -> usize {
        self.dim - self.outgoing.rank() - self.incoming.rank()
    }

    /// Invariant factors greater than one of the incoming map.
    pub fn torsion(&self) -> Result<Vec<BigInt>, ModelError> {
        Ok(smith_invariants(self.incoming)?.into_iter().filter(|d| d > &BigInt::one()).collect())
    }

    /// Basis of `ker outgoing` modulo `im incoming`, as primitive integral vectors.
    pub fn representatives(&self) -> Result<Vec<SVec>, ModelError> {
        let kernel = null_space_of_rows(self.dim, &self.outgoing.rows());
        let image = Subspace::span(self.dim, self.incoming.columns());
        Ok(kernel.quotient_basis(&image)?.basis().iter().map(|v| v.primitive()).collect())
    }
}

fn check_degree(x: &CubicalComplex, k: usize) -> Result<(), ModelError> {
    if k > x.dim() {
        return Err(ModelError::OutOfBounds(format!("degree {k} exceeds dimension {}", x.dim())));
    }
    Ok(())
}

/// Coboundary `d_k` restricted to cochains of the given support (zero matrix past the top degree or below 0).
pub fn restricted_d(x: &CubicalComplex, k: isize, mode: Support) -> RatMatrix {
    let dim = x.dim() as isize;
    let free = |j: isize| -> Vec<usize> {
        if j < 0 || j > dim {
            Vec::new()
        } else {
            x.free_cells(j as usize, mode)
        }
    };
    let (cols, rows) = (free(k), free(k + 1));
    if k < 0 || k >= dim {
        return RatMatrix::zeros(rows.len(), cols.len());
    }
    let d = x.d_matrix(k as usize).unwrap();
    if mode == Support::Full {
        return d.clone();
    }
    d.select_cols(&cols).select_rows(&rows)
}

fn lift(x: &CubicalComplex, k: usize, mode: Support, v: &SVec) -> SVec {
    if mode == Support::Full {
        return v.clone();
    }
    let free = x.free_cells(k, mode);
    SVec::from_pairs(v.iter().map(|(i, q)| (free[i], q.clone())))
}

/// Cellular homology `H_k` (absolute) or `H_k(X, margin)`.
pub fn homology(x: &CubicalComplex, k: usize, coefficients: Coefficients, mode: HomologyMode) -> Result<HomologyGroup, ModelError> {
    check_degree(x, k)?;
    let support = match mode {
        HomologyMode::Absolute => Support::Full,
        HomologyMode::RelMargin => Support::Compact,
    };
    // Boundaries are transposed coboundaries on the same cell sets.
    let incoming = restricted_d(x, k as isize, support).transpose();
    let outgoing = restricted_d(x, k as isize - 1, support).transpose();
    let pair = ChainPair { dim: x.free_cells(k, support).len(), incoming: &incoming, outgoing: &outgoing };
    let torsion = match coefficients {
        Coefficients::Int => pair.torsion()?,
        Coefficients::Rat => Vec::new(),
    };
    let representatives = pair.representatives()?.iter().map(|v| lift(x, k, support, v)).collect::<Vec<_>>();
    Ok(HomologyGroup { degree: k, free_rank: representatives.len(), torsion, representatives })
}

/// Rational cohomology `H^k` of cochains with the given support.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub mode: Support,
    /// Closed cochains, indexed by all `k`-cells, whose classes form a basis.
    pub representatives: Vec<SVec>,
}

impl CohomologyGroup {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

pub fn cohomology(x: &CubicalComplex, k: usize, mode: Support) -> Result<CohomologyGroup, ModelError> {
    check_degree(x, k)?;
    let incoming = restricted_d(x, k as isize - 1, mode);
    let outgoing = restricted_d(x, k as isize, mode);
    let pair = ChainPair { dim: x.free_cells(k, mode).len(), incoming: &incoming, outgoing: &outgoing };
    let representatives = pair.representatives()?.iter().map(|v| lift(x, k, mode, v)).collect();
    Ok(CohomologyGroup { degree: k, mode, representatives })
}

/// Rational cohomology dimensions in every degree, from ranks only.
pub fn betti_numbers(x: &CubicalComplex, mode: Support) -> Vec<usize> {
    let ranks: Vec<usize> = (0..x.dim()).map(|k| restricted_d(x, k as isize, mode).rank()).collect();
    (0..=x.dim())
        .map(|k| {
            let n = x.free_cells(k, mode).len();
            let out = if k < x.dim() { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            n - out - inc
        })
        .collect()
}

/// Integral `H^k`: free rank and torsion chain.
pub fn integer_cohomology(x: &CubicalComplex, k: usize) -> Result<(usize, Vec<BigInt>), ModelError> {
    check_degree(x, k)?;
    let incoming = restricted_d(x, k as isize - 1, Support::Full);
    let outgoing = restricted_d(x, k as isize, Support::Full);
    let pair = ChainPair { dim: x.count(k), incoming: &incoming, outgoing: &outgoing };
    Ok((pair.free_rank(), pair.torsion()?))
}

/// `J(η)(σ) = Σ_c σ_c η_c` for a closed cochain and a cycle.
pub fn de_rham_j(x: &CubicalComplex, k: usize, eta: &SVec, sigma: &SVec) -> Result<Q, ModelError> {
    check_degree(x, k)?;
    if k < x.dim() && !x.d_apply(k, eta)?.is_zero() {
        return Err(ModelError::NotClosed);
    }
    if !is_cycle(x, k, sigma) {
        return Err(ModelError::NotClosed);
    }
    Ok(eta.dot(sigma))
}

/// Whether a `k`-chain has zero boundary.
pub fn is_cycle(x: &CubicalComplex, k: usize, sigma: &SVec) -> bool {
    k == 0 || x.d_matrix(k - 1).map(|d| d.transpose().apply(sigma).is_zero()).unwrap_or(false)
}

/// Output of the duality solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityWitness {
    pub degree: usize,
    pub sigma: SVec,
    /// Compactly supported coclosed cochain with `⟨ζ, η⟩ = J(η)(σ)` for closed `η`.
    pub zeta: SVec,
}

/// Solve for a compact coclosed `ζ` with `⟨ζ, η⟩ = J(η)(σ)` for every closed `η`.
///
/// Pairing with exact cochains is automatic for coclosed `ζ`, so the system
/// consists of `δζ = 0` and one condition per cohomology class.
pub fn poincare_k(x: &CubicalComplex, ops: &LorentzOps, k: usize, sigma: &SVec) -> Result<DualityWitness, ModelError> {
    check_degree(x, k)?;
    if !is_cycle(x, k, sigma) {
        return Err(ModelError::NotACycle);
    }
    if sigma.is_zero() {
        return Ok(DualityWitness { degree: k, sigma: sigma.clone(), zeta: SVec::new() });
    }
    if x.is_supported(k, sigma, Support::Compact) {
        // `W⁻¹σ` solves the system: `δ W⁻¹σ = W⁻¹∂σ = 0` and `⟨W⁻¹σ, η⟩ = η(σ)`.
        let w = ops.weights(k);
        let zeta = SVec::from_pairs(sigma.iter().map(|(i, q)| (i, q / &w[i])));
        return Ok(DualityWitness { degree: k, sigma: sigma.clone(), zeta });
    }
    let free = x.free_cells(k, Support::Compact);
    let classes = cohomology(x, k, Support::Full)?;
    let w = ops.weights(k);
    let mut rows: Vec<SVec> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    if k > 0 {
        // δζ = 0 restricted to the free columns: rows of dᵀ W.
        let dw = x.d_matrix(k - 1)?.transpose();
        let sub = dw.select_cols(&free);
        for r in sub.rows() {
            if !r.is_zero() {
                let scaled = SVec::from_pairs(r.iter().map(|(j, q)| (j, q * &w[free[j]])));
                rows.push(scaled);
                rhs.push(Q::zero());
            }
        }
    }
    for eta in &classes.representatives {
        rows.push(SVec::from_pairs(free.iter().enumerate().map(|(j, &c)| (j, &eta.get(c) * &w[c]))));
        rhs.push(eta.dot(sigma));
    }
    let m = RatMatrix::from_rows(free.len(), &rows);
    let b = SVec::from_dense(&rhs);
    let sol = m.solve(&b).map_err(|_| ModelError::NoSolution(format!("no compact dual for the given {k}-cycle")))?;
    let zeta = SVec::from_pairs(sol.iter().map(|(j, q)| (free[j], q.clone())));
    Ok(DualityWitness { degree: k, sigma: sigma.clone(), zeta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Factor;

    #[test]
    fn five_cycle() {
        let x = CubicalComplex::product(&[Factor::Cycle(5)]).unwrap();
        for k in 0..=1 {
            let h = homology(&x, k, Coefficients::Int, HomologyMode::Absolute).unwrap();
            assert_eq!((h.free_rank, h.torsion.len()), (1, 0));
        }
    }

    #[test]
    fn contractible_block() {
        let x = CubicalComplex::product(&[Factor::Time(3), Factor::Path(4)]).unwrap();
        let ranks: Vec<usize> =
            (0..=2).map(|k| homology(&x, k, Coefficients::Int, HomologyMode::Absolute).unwrap().free_rank).collect();
        assert_eq!(ranks, vec![1, 0, 0]);
    }

    #[test]
    fn unit_holonomy_on_cycle() {
        let x = CubicalComplex::product(&[Factor::Cycle(6)]).unwrap();
        let eta = SVec::unit(0);
        let sigma = SVec::from_pairs((0..6).map(|i| (i, Q::one())));
        assert_eq!(de_rham_j(&x, 1, &eta, &sigma).unwrap(), Q::one());
        assert_eq!(de_rham_j(&x, 1, &eta, &sigma.scale(&Q::int(2))).unwrap(), Q::int(2));
        assert_eq!(de_rham_j(&x, 1, &eta, &SVec::unit(0)), Err(ModelError::NotClosed));
    }
}
