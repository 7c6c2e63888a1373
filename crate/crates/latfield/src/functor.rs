//! Morphisms between spacetime objects, the induced maps of phase spaces,
//! the structural checks (causality, time-slice, locality, charge
//! naturality) and the CCR algebra.

use std::collections::{BTreeMap, HashSet};

use exactla::{QPi, RatMatrix, SVec, Subspace, Q};
use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::complex::{Cell, CubicalComplex, SubcomplexEmbedding, Support};
use crate::error::ModelError;
use crate::gauge::SpacetimeObject;
use crate::homology::cohomology;
use crate::lorentz::{causal_future, causal_past, causal_compatibility_witness};
use crate::phasespace::{Model, Observable, PhaseSpace};

/// Facts established when a morphism is constructed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub same_spacings: bool,
    pub background_matches: bool,
    pub causally_compatible: bool,
}

/// Embedding of one spacetime object into another.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: String,
    pub target: String,
    pub embedding: SubcomplexEmbedding,
    pub certificate: Certificate,
}

impl Morphism {
    /// Validate an embedding: equal structure groups, equal spacings, matching
    /// background curvature and causal compatibility.
    pub fn new(source: &SpacetimeObject, target: &SpacetimeObject, embedding: SubcomplexEmbedding) -> Result<Morphism, ModelError> {
        if source.group != target.group {
            return Err(ModelError::Config(format!("structure groups of {} and {} differ", source.id(), target.id())));
        }
        let (xs, xt) = (&source.complex, &target.complex);
        if !embedding.is_chain_map(xs, xt) {
            return Err(ModelError::Config("embedding is not a chain map".into()));
        }
        let same_spacings = (0..xs.nfactors()).all(|i| xs.spacing(i) == xt.spacing(i));
        if !same_spacings {
            return Err(ModelError::Config("embedding changes the lattice spacings".into()));
        }
        let background_matches = embedding.pull_components(2, &target.f0_over_pi, target.components()) == source.f0_over_pi;
        if !background_matches {
            return Err(ModelError::Config(format!("background curvature of {} does not restrict to that of {}", target.id(), source.id())));
        }
        if let Some((v, dir)) = causal_compatibility_witness(xs, xt, &embedding) {
            return Err(ModelError::NotCausallyCompatible(format!("{dir:?} cone of vertex {:?}", v.parts(xs.nfactors()))));
        }
        let certificate = Certificate { same_spacings, background_matches, causally_compatible: true };
        Ok(Morphism { source: source.id().to_string(), target: target.id().to_string(), embedding, certificate })
    }

    pub fn identity(obj: &SpacetimeObject) -> Result<Morphism, ModelError> {
        Morphism::new(obj, obj, SubcomplexEmbedding::identity(&obj.complex))
    }

    /// Translation of a product object by per-factor offsets.
    pub fn translate(source: &SpacetimeObject, target: &SpacetimeObject, offsets: &[usize]) -> Result<Morphism, ModelError> {
        Morphism::new(source, target, SubcomplexEmbedding::translate(&source.complex, &target.complex, offsets)?)
    }

    /// Inclusion of a carved object into a host with the same factors.
    pub fn inclusion(source: &SpacetimeObject, target: &SpacetimeObject) -> Result<Morphism, ModelError> {
        Morphism::new(source, target, SubcomplexEmbedding::inclusion(&source.complex, &target.complex)?)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Morphism) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: g.target.clone(),
            embedding: self.embedding.then(&g.embedding),
            certificate: self.certificate.clone(),
        }
    }

    /// `f_*`: extend the linear part by zero, keep the constant.
    pub fn pushforward(&self, o: &Observable, comps: usize) -> Observable {
        Observable { constant: o.constant.clone(), alpha: self.embedding.push_components(1, &o.alpha, comps) }
    }

    pub fn push_alpha(&self, alpha: &SVec, comps: usize) -> SVec {
        self.embedding.push_components(1, alpha, comps)
    }

    /// Image of a chain: cells are carried along with their signs.
    pub fn push_chain(&self, k: usize, sigma: &SVec) -> SVec {
        self.embedding.push(k, sigma)
    }
}

/// Matrix of `PhSp(f)` in the bases (constant, representatives) of both phase spaces.
#[derive(Clone, Debug)]
pub struct PhspMap {
    pub matrix: RatMatrix,
}

impl PhspMap {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Kernel in source coordinates.
    pub fn kernel(&self) -> Subspace {
        self.matrix.kernel()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.matrix.ncols()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.matrix.nrows()
    }

    /// Image of a source coordinate vector.
    pub fn apply(&self, v: &SVec) -> SVec {
        self.matrix.apply(v)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PhspMap) -> Result<PhspMap, ModelError> {
        Ok(PhspMap { matrix: self.matrix.mul(&first.matrix)? })
    }
}

/// `PhSp(f)`: push every representative and read off its class in the target.
pub fn phsp_map(f: &Morphism, ps1: &PhaseSpace, ps2: &PhaseSpace) -> Result<PhspMap, ModelError> {
    let images: Vec<SVec> = ps1.reps.iter().map(|r| f.push_alpha(r, ps1.comps)).collect();
    if let Some(k) = images.iter().position(|v| !ps2.einv.contains(v)) {
        return Err(ModelError::NoSolution(format!("pushforward of representative {k} is not gauge invariant in the target")));
    }
    let mut cols = vec![SVec::unit(0)];
    cols.extend(ps2.coordinates_many(&images)?.into_iter().map(|c| c.shifted(1)));
    Ok(PhspMap { matrix: RatMatrix::from_columns(ps2.dim(), cols) })
}

/// Linear part of a coordinate vector (index 0 is the constant direction).
pub fn linear_part(ps: &PhaseSpace, coords: &SVec) -> SVec {
    let mut acc = SVec::new();
    for (i, c) in coords.iter() {
        if i > 0 {
            acc = acc.axpy(c, &ps.reps[i - 1]);
        }
    }
    acc
}

/// First representative pair `(i, j)` with `τ₁(rᵢ, rⱼ) ≠ τ₂(f_* rᵢ, f_* rⱼ)`.
pub fn tau_mismatch(f: &Morphism, m1: &Model, ps1: &PhaseSpace, m2: &Model) -> Result<Option<(usize, usize)>, ModelError> {
    let g1 = ps1.gram(m1)?;
    let pushed: Vec<SVec> = ps1.reps.iter().map(|r| f.push_alpha(r, ps1.comps)).collect();
    for (j, b) in pushed.iter().enumerate() {
        let gb = m2.propagate(b)?;
        for (i, a) in pushed.iter().enumerate() {
            if m2.obj.pairing(1, a, &gb) != g1[i][j] {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Free 1-cells of the source, as target cells.
fn image_cells(f: &Morphism, source: &CubicalComplex) -> Vec<usize> {
    source.free_cells(1, Support::Compact).into_iter().map(|c| f.embedding.maps[1][c]).collect()
}

/// A free 1-cell of one image that lies entirely in the causal future or past of the other image.
pub fn causal_overlap(target: &CubicalComplex, first: &[usize], second: &[usize]) -> Option<(usize, usize)> {
    for (a, b) in [(first, second), (second, first)] {
        let seeds: Vec<(usize, usize)> = a.iter().map(|&c| (1, c)).collect();
        let cones = [causal_future(target, &seeds), causal_past(target, &seeds)];
        let own: HashSet<usize> = a.iter().copied().collect();
        for &c in b {
            let cell: &Cell = target.cell(1, c);
            if own.contains(&c) || cones.iter().any(|k| k.covers(target, cell)) {
                return Some((a[0], c));
            }
        }
    }
    None
}

/// Result of the causality check for two morphisms into a common target.
#[derive(Clone, Debug, Serialize)]
pub struct CausalityReport {
    pub dims: (usize, usize),
    pub entries: usize,
    /// Nonzero cross entries `(i, j, τ)`.
    pub nonzero: Vec<(usize, usize, Q)>,
}

impl CausalityReport {
    pub fn passes(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// `τ₃(f₁_* rᵢ, f₂_* sⱼ)` for all representatives of both sources.
pub fn cross_gram(
    f1: &Morphism,
    ps1: &PhaseSpace,
    f2: &Morphism,
    ps2: &PhaseSpace,
    target: &Model,
) -> Result<CausalityReport, ModelError> {
    let comps = ps1.comps;
    let second: Vec<SVec> = ps2.reps.iter().map(|r| f2.push_alpha(r, comps)).collect();
    let mut nonzero = Vec::new();
    for (i, r) in ps1.reps.iter().enumerate() {
        let g = target.propagate(&f1.push_alpha(r, comps))?;
        for (j, b) in second.iter().enumerate() {
            let t = target.obj.pairing(1, b, &g);
            if !t.is_zero() {
                nonzero.push((i, j, -t));
            }
        }
    }
    Ok(CausalityReport { dims: (ps1.reps.len(), ps2.reps.len()), entries: ps1.reps.len() * ps2.reps.len(), nonzero })
}

/// Classical causality: the images must be causally disjoint, and then every cross entry of `τ` vanishes.
pub fn check_causality(
    f1: &Morphism,
    m1: &Model,
    ps1: &PhaseSpace,
    f2: &Morphism,
    m2: &Model,
    ps2: &PhaseSpace,
    target: &Model,
) -> Result<CausalityReport, ModelError> {
    let a = image_cells(f1, &m1.obj.complex);
    let b = image_cells(f2, &m2.obj.complex);
    if let Some((_, c)) = causal_overlap(&target.obj.complex, &a, &b) {
        let x = &target.obj.complex;
        return Err(ModelError::NotDisjoint(format!("1-cell {:?} is causally related to the other region", x.cell(1, c).parts(x.nfactors()))));
    }
    cross_gram(f1, ps1, f2, ps2, target)
}

/// Rank data of `PhSp(f)`.
#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub dim_source: usize,
    pub dim_target: usize,
    pub rank: usize,
    pub kernel_dim: usize,
}

impl RankReport {
    pub fn of(map: &PhspMap) -> RankReport {
        let rank = map.rank();
        RankReport { dim_source: map.matrix.ncols(), dim_target: map.matrix.nrows(), rank, kernel_dim: map.matrix.ncols() - rank }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.rank == self.dim_source && self.rank == self.dim_target
    }
}

/// Time-slice: `PhSp(f)` of a slab embedding is injective and surjective.
pub fn check_timeslice(f: &Morphism, ps1: &PhaseSpace, ps2: &PhaseSpace) -> Result<RankReport, ModelError> {
    Ok(RankReport::of(&phsp_map(f, ps1, ps2)?))
}

/// Closed compact 2-cochain with compact `δη` whose class in compactly
/// supported cohomology is nonzero, if one exists.
pub fn curvature_witness(m: &Model) -> Result<Option<SVec>, ModelError> {
    let x = &m.obj.complex;
    let classes = cohomology(x, 2, Support::Compact)?;
    if classes.dim() == 0 {
        return Ok(None);
    }
    let delta = m.obj.ops.delta_matrix(2)?;
    let free1 = x.free_cells(1, Support::Compact);
    let margin1: Vec<usize> = (0..x.count(1)).filter(|&i| x.is_margin(1, i)).collect();
    let dd = delta.mul(x.d_matrix(1)?)?;
    // Unknowns: class coefficients, then γ on compact 1-cells. Condition: δ(Σ cᵣ ηᵣ + dγ) vanishes on the margin.
    let r = classes.dim();
    let mut cols: Vec<SVec> = classes.representatives.iter().map(|eta| delta.apply(eta)).collect();
    cols.extend(free1.iter().map(|&c| dd.col(c).clone()));
    let system = RatMatrix::from_columns(x.count(1), cols).select_rows(&margin1);
    let kernel = system.kernel();
    let Some(v) = kernel.basis().iter().find(|v| v.indices().any(|i| i < r)) else {
        return Ok(None);
    };
    let mut eta = SVec::new();
    let mut gamma = SVec::new();
    for (i, c) in v.iter() {
        if i < r {
            eta = eta.axpy(c, &classes.representatives[i]);
        } else {
            gamma.push(free1[i - r], c.clone());
        }
    }
    Ok(Some(eta.add(&x.d_apply(1, &gamma)?)))
}

/// Locality data of `PhSp(f)` together with the `F*(η)` witness when one exists.
#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    pub ranks: RankReport,
    /// Whether `[F*(η)]` is a nonzero source class mapped to zero.
    pub witness_in_kernel: Option<bool>,
}

/// Kernel of `PhSp(f)` and the status of the curvature witness `[F*(η)]`.
pub fn check_locality(
    f: &Morphism,
    m1: &Model,
    ps1: &PhaseSpace,
    ps2: &PhaseSpace,
) -> Result<LocalityReport, ModelError> {
    let map = phsp_map(f, ps1, ps2)?;
    let ranks = RankReport::of(&map);
    let witness_in_kernel = match curvature_witness(m1)? {
        None => None,
        Some(eta) => {
            let o = m1.curvature_dual(&eta)?;
            let nonzero = !ps1.is_zero_class(&o.alpha) && ps1.einv.contains(&o.alpha);
            let killed = ps2.is_zero_class(&f.push_alpha(&o.alpha, ps1.comps));
            Some(nonzero && killed && o.constant == QPi::zero())
        }
    };
    Ok(LocalityReport { ranks, witness_in_kernel })
}

/// Whether two observables define the same class of a phase space.
pub fn same_class(ps: &PhaseSpace, a: &Observable, b: &Observable) -> bool {
    a.constant == b.constant && ps.is_zero_class(&a.alpha.sub(&b.alpha))
}

/// Naturality of the charge maps: `Ψ₂(f_* σ) = f_*(Ψ₁(σ))` as classes of the target.
#[derive(Clone, Debug, Serialize)]
pub struct NaturalityReport {
    pub magnetic: Vec<bool>,
    pub electric: Vec<bool>,
}

impl NaturalityReport {
    pub fn passes(&self) -> bool {
        self.magnetic.iter().chain(&self.electric).all(|&b| b)
    }
}

pub fn charge_naturality(
    f: &Morphism,
    m1: &Model,
    m2: &Model,
    ps2: &PhaseSpace,
    magnetic_cycles: &[SVec],
    electric_cycles: &[SVec],
    component: usize,
) -> Result<NaturalityReport, ModelError> {
    let comps = m1.components();
    let m = m1.obj.complex.dim();
    let mut magnetic = Vec::new();
    for s in magnetic_cycles {
        let left = m2.charge_mag(&f.push_chain(2, s), component)?;
        let right = f.pushforward(&m1.charge_mag(s, component)?, comps);
        magnetic.push(same_class(ps2, &left, &right));
    }
    let mut electric = Vec::new();
    for s in electric_cycles {
        let left = m2.charge_el(&f.push_chain(m - 2, s), component)?;
        let right = f.pushforward(&m1.charge_el(s, component)?, comps);
        electric.push(same_class(ps2, &left, &right));
    }
    Ok(NaturalityReport { magnetic, electric })
}

/// Complex rational coefficient.
pub type Cq = Complex<Q>;

/// Element of the CCR algebra: coefficients of nondecreasing monomials in basis indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CcrElement {
    pub terms: BTreeMap<Vec<usize>, Cq>,
}

impl CcrElement {
    pub fn zero() -> CcrElement {
        CcrElement::default()
    }

    pub fn scalar(c: Cq) -> CcrElement {
        let mut e = CcrElement::zero();
        e.add_term(Vec::new(), c);
        e
    }

    pub fn unit() -> CcrElement {
        CcrElement::scalar(Cq::new(Q::one(), Q::zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Vec<usize>, c: Cq) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Cq::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            let key: Vec<Vec<usize>> = self.terms.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, o: &CcrElement) -> CcrElement {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Cq) -> CcrElement {
        let mut out = CcrElement::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn sub(&self, o: &CcrElement) -> CcrElement {
        self.add(&o.scale(&Cq::new(-Q::one(), Q::zero())))
    }
}

/// CCR algebra of a presymplectic space with basis `0..dim`: `a·b − b·a = iτ(a,b)·1`.
#[derive(Clone, Debug)]
pub struct Ccr {
    pub tau: Vec<Vec<Q>>,
}

impl Ccr {
    pub fn from_tau(tau: Vec<Vec<Q>>) -> Ccr {
        Ccr { tau }
    }

    /// Basis index 0 is the constant class, then the representatives.
    pub fn of_phase_space(m: &Model, ps: &PhaseSpace) -> Result<Ccr, ModelError> {
        let g = ps.gram(m)?;
        let n = ps.dim();
        let mut tau = vec![vec![Q::zero(); n]; n];
        for i in 1..n {
            for j in 1..n {
                tau[i][j] = g[i - 1][j - 1].clone();
            }
        }
        Ok(Ccr { tau })
    }

    pub fn dim(&self) -> usize {
        self.tau.len()
    }

    pub fn generator(&self, i: usize) -> CcrElement {
        let mut e = CcrElement::zero();
        e.add_term(vec![i], Cq::new(Q::one(), Q::zero()));
        e
    }

    /// Normal form of `c · w[0] w[1] ⋯` for an arbitrary word.
    pub fn word(&self, w: &[usize], c: Cq) -> CcrElement {
        let mut out = CcrElement::zero();
        self.normalize(w.to_vec(), c, &mut out);
        out
    }

    /// Linear combination of generators.
    pub fn linear(&self, coords: &SVec) -> CcrElement {
        let mut e = CcrElement::zero();
        for (i, c) in coords.iter() {
            e.add_term(vec![i], Cq::new(c.clone(), Q::zero()));
        }
        e
    }

    /// Normal form of `c · w[0] w[1] ⋯`, accumulated into `out`.
    fn normalize(&self, word: Vec<usize>, c: Cq, out: &mut CcrElement) {
        match word.windows(2).position(|p| p[0] > p[1]) {
            None => out.add_term(word, c),
            Some(p) => {
                let (a, b) = (word[p], word[p + 1]);
                let mut swapped = word.clone();
                swapped.swap(p, p + 1);
                self.normalize(swapped, c.clone(), out);
                let t = &self.tau[a][b];
                if !t.is_zero() {
                    let mut shorter = word;
                    shorter.drain(p..p + 2);
                    self.normalize(shorter, c * Cq::new(Q::zero(), t.clone()), out);
                }
            }
        }
    }

    pub fn multiply(&self, a: &CcrElement, b: &CcrElement) -> CcrElement {
        let mut out = CcrElement::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let word: Vec<usize> = ma.iter().chain(mb).copied().collect();
                self.normalize(word, ca.clone() * cb.clone(), &mut out);
            }
        }
        out
    }

    pub fn commutator(&self, a: &CcrElement, b: &CcrElement) -> CcrElement {
        self.multiply(a, b).sub(&self.multiply(b, a))
    }

    /// Reverse every monomial and conjugate its coefficient.
    pub fn star(&self, a: &CcrElement) -> CcrElement {
        let mut out = CcrElement::zero();
        for (m, c) in &a.terms {
            let rev: Vec<usize> = m.iter().rev().copied().collect();
            self.normalize(rev, c.conj(), &mut out);
        }
        out
    }
}

/// Algebra map induced by a linear map of generators: a monomial goes to the product of the images.
pub fn ccr_map(map: &PhspMap, target: &Ccr, a: &CcrElement) -> CcrElement {
    let images: Vec<CcrElement> = (0..map.matrix.ncols()).map(|j| target.linear(map.matrix.col(j))).collect();
    let mut out = CcrElement::zero();
    for (m, c) in &a.terms {
        let mut acc = CcrElement::unit();
        for &g in m {
            acc = target.multiply(&acc, &images[g]);
        }
        out = out.add(&acc.scale(c));
    }
    out
}
