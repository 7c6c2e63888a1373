//! Observables, gauge-invariant observables, the phase spaces `E` and `E⁰`,
//! the presymplectic form, radicals and the charge observables.
//!
//! An observable is a pair `(c, α)`: its value on the reference connection and
//! its linear part, a compactly supported `𝔤*`-valued 1-cochain. Its value on
//! the connection with displacement `A` is `c + ⟨α, A⟩`. Affine observables
//! with vanishing linear part span a single direction (the constants), which
//! every space below contains; subspaces are therefore stored by their linear
//! parts only.

use std::sync::OnceLock;

use exactla::{null_space_of_rows, Echelon, QPi, RatMatrix, SVec, Subspace, Q};
use serde::{Deserialize, Serialize};

use crate::complex::Support;
use crate::error::ModelError;
use crate::gauge::{gauge_directions, Connection, SpacetimeObject};
use crate::green::propagator;
use crate::homology::poincare_k;
use crate::lorentz::hodge_star;

/// `E = E^inv / MW*(compact)` or `E⁰ = E^inv / F*(compact closed)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    Standard,
    ChargeZero,
}

/// Affine observable `A ↦ c + ⟨α, A⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    pub constant: QPi,
    pub alpha: SVec,
}

impl Observable {
    pub fn zero() -> Observable {
        Observable { constant: QPi::zero(), alpha: SVec::new() }
    }

    pub fn constant(c: QPi) -> Observable {
        Observable { constant: c, alpha: SVec::new() }
    }

    pub fn linear(alpha: SVec) -> Observable {
        Observable { constant: QPi::zero(), alpha }
    }

    /// Value on a connection.
    pub fn evaluate(&self, obj: &SpacetimeObject, c: &Connection) -> QPi {
        let weighted = obj.ops.weigh(1, &self.alpha);
        &self.constant + &c.a.dot(&weighted)
    }
}

/// Span of `generators` intersected with cochains vanishing on `margin`.
///
/// Coordinates are reordered with margin cells first; in an echelon basis of
/// the span, the rows whose leading entry is a non-margin cell span exactly
/// the vectors with zero margin part.
pub fn compact_image<I: IntoIterator<Item = SVec>>(margin: &[bool], generators: I) -> Subspace {
    let n = margin.len();
    let mut order: Vec<usize> = (0..n).filter(|&i| margin[i]).collect();
    let split = order.len();
    order.extend((0..n).filter(|&i| !margin[i]));
    let mut position = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }
    let mut e = Echelon::new(n);
    for g in generators {
        e.insert(&g.remap(|i| Some(position[i])));
    }
    let kept: Vec<SVec> = e
        .rows()
        .iter()
        .filter(|r| r.leading().is_some_and(|(i, _)| i >= split))
        .map(|r| r.remap(|p| Some(order[p])))
        .collect();
    Subspace::from_independent(n, kept)
}

/// Place copies of scalar subspaces side by side as a component-major subspace.
pub fn direct_sum(blocks: &[&Subspace], n: usize) -> Subspace {
    let mut vecs = Vec::new();
    for (a, b) in blocks.iter().enumerate() {
        vecs.extend(b.basis().iter().map(|v| v.shifted(a * n)));
    }
    Subspace::from_independent(n * blocks.len(), vecs)
}

fn restrict_to(cells: &[usize], n: usize, v: &SVec) -> SVec {
    let mut pos = vec![usize::MAX; n];
    for (p, &c) in cells.iter().enumerate() {
        pos[c] = p;
    }
    v.remap(|i| if pos[i] == usize::MAX { None } else { Some(pos[i]) })
}

fn lift_from(cells: &[usize], v: &SVec) -> SVec {
    v.remap(|p| Some(cells[p]))
}

/// Scalar building blocks of one object, computed on demand and cached.
#[derive(Debug, Default)]
pub struct ScalarSpaces {
    torus_direct: OnceLock<Subspace>,
    real_direct: OnceLock<Subspace>,
    torus_theorem: OnceLock<Subspace>,
    real_theorem: OnceLock<Subspace>,
    maxwell_image: OnceLock<Subspace>,
    curvature_image: OnceLock<Subspace>,
    real_radical: OnceLock<Subspace>,
    closed_compact_2: OnceLock<Vec<SVec>>,
}

/// An object together with its cached scalar spaces.
pub struct Model {
    pub obj: SpacetimeObject,
    spaces: ScalarSpaces,
}

impl Model {
    pub fn new(obj: SpacetimeObject) -> Model {
        Model { obj, spaces: ScalarSpaces::default() }
    }

    pub fn n1(&self) -> usize {
        self.obj.count(1)
    }

    pub fn components(&self) -> usize {
        self.obj.components()
    }

    fn compact1(&self) -> Vec<usize> {
        self.obj.complex.free_cells(1, Support::Compact)
    }

    /// Rows `W g` on compact 1-cells for each gauge generator `g`; their common kernel.
    fn orthogonal_to(&self, gens: &[SVec]) -> Subspace {
        let cells = self.compact1();
        let n = self.n1();
        let rows: Vec<SVec> = gens.iter().map(|g| restrict_to(&cells, n, &self.obj.ops.weigh(1, g))).filter(|r| !r.is_zero()).collect();
        let k = null_space_of_rows(cells.len(), &rows);
        Subspace::from_independent(n, k.basis().iter().map(|v| lift_from(&cells, v)).collect())
    }

    fn exact_scalar_generators(&self) -> Vec<SVec> {
        let d0 = self.obj.complex.d_matrix(0).unwrap();
        d0.columns().to_vec()
    }

    /// Torus components, direct: orthogonal to exact and integral closed directions.
    pub fn torus_direct(&self) -> Result<&Subspace, ModelError> {
        if let Some(s) = self.spaces.torus_direct.get() {
            return Ok(s);
        }
        let dirs = gauge_directions(&self.obj)?;
        let mut gens = self.exact_scalar_generators();
        gens.extend(dirs.scalar_generators.iter().cloned());
        Ok(self.spaces.torus_direct.get_or_init(|| self.orthogonal_to(&gens)))
    }

    /// Real components, direct: orthogonal to exact directions.
    pub fn real_direct(&self) -> &Subspace {
        self.spaces.real_direct.get_or_init(|| self.orthogonal_to(&self.exact_scalar_generators()))
    }

    /// Torus components, theorem: `δ(C²_c) ∩ C¹_c`.
    pub fn torus_theorem(&self) -> &Subspace {
        self.spaces.torus_theorem.get_or_init(|| {
            let x = &self.obj.complex;
            let delta = self.obj.ops.delta_matrix(2).unwrap();
            compact_image(x.margin_flags(1), x.free_cells(2, Support::Compact).into_iter().map(|c| delta.col(c).clone()))
        })
    }

    /// Real components, theorem: compactly supported coclosed 1-cochains.
    pub fn real_theorem(&self) -> &Subspace {
        self.spaces.real_theorem.get_or_init(|| {
            let cells = self.compact1();
            let k = self.obj.ops.delta_matrix(1).unwrap().select_cols(&cells).kernel();
            Subspace::from_independent(self.n1(), k.basis().iter().map(|v| lift_from(&cells, v)).collect())
        })
    }

    /// `δ d (C¹_c) ∩ C¹_c`, linear parts of `MW*` of compact cochains.
    pub fn maxwell_image(&self) -> &Subspace {
        self.spaces.maxwell_image.get_or_init(|| {
            let x = &self.obj.complex;
            let dd = self.obj.ops.delta_matrix(2).unwrap().mul(x.d_matrix(1).unwrap()).unwrap();
            compact_image(x.margin_flags(1), self.compact1().into_iter().map(|c| dd.col(c).clone()))
        })
    }

    /// Basis of compactly supported closed 2-cochains.
    pub fn closed_compact_2(&self) -> &[SVec] {
        self.spaces.closed_compact_2.get_or_init(|| {
            let x = &self.obj.complex;
            let cells = x.free_cells(2, Support::Compact);
            if x.dim() == 2 {
                return cells.iter().map(|&c| SVec::unit(c)).collect();
            }
            let rows: Vec<SVec> = x.d_matrix(2).unwrap().select_cols(&cells).rows().into_iter().filter(|r| !r.is_zero()).collect();
            null_space_of_rows(cells.len(), &rows).basis().iter().map(|v| lift_from(&cells, v)).collect()
        })
    }

    /// `δ(Z²_c) ∩ C¹_c`, linear parts of `F*` of compact closed cochains.
    pub fn curvature_image(&self) -> &Subspace {
        self.spaces.curvature_image.get_or_init(|| {
            let delta = self.obj.ops.delta_matrix(2).unwrap();
            compact_image(self.obj.complex.margin_flags(1), self.closed_compact_2().iter().map(|z| delta.apply(z)))
        })
    }

    /// Real radical part: `δ(C²_c ∩ d(C¹_tc)) ∩ C¹_c`.
    pub fn real_radical(&self) -> &Subspace {
        self.spaces.real_radical.get_or_init(|| {
            let x = &self.obj.complex;
            let d1 = x.d_matrix(1).unwrap();
            let exact_compact =
                compact_image(x.margin_flags(2), x.free_cells(1, Support::TimelikeCompact).into_iter().map(|c| d1.col(c).clone()));
            let delta = self.obj.ops.delta_matrix(2).unwrap();
            compact_image(x.margin_flags(1), exact_compact.basis().iter().map(|z| delta.apply(z)))
        })
    }

    fn per_component<F: Fn(bool) -> Result<Subspace, ModelError>>(&self, f: F) -> Result<Subspace, ModelError> {
        let g = &self.obj.group;
        let blocks: Vec<Subspace> = (0..g.rank()).map(|a| f(g.is_torus(a))).collect::<Result<_, _>>()?;
        Ok(direct_sum(&blocks.iter().collect::<Vec<_>>(), self.n1()))
    }

    /// Linear parts of `E^inv` from orthogonality to the gauge directions.
    pub fn einv_direct(&self) -> Result<Subspace, ModelError> {
        self.per_component(|torus| if torus { self.torus_direct().cloned() } else { Ok(self.real_direct().clone()) })
    }

    /// Linear parts of `E^inv` from the characterization theorem.
    pub fn einv_theorem(&self) -> Result<Subspace, ModelError> {
        self.per_component(|torus| Ok(if torus { self.torus_theorem().clone() } else { self.real_theorem().clone() }))
    }

    /// Upper bound: compactly supported coclosed linear parts in every component.
    pub fn emax(&self) -> Result<Subspace, ModelError> {
        self.per_component(|_| Ok(self.real_theorem().clone()))
    }

    /// Lower bound: `δ` of compact 2-cochains in every component.
    pub fn emin(&self) -> Result<Subspace, ModelError> {
        self.per_component(|_| Ok(self.torus_theorem().clone()))
    }

    /// Linear parts of the quotient subspace of the given variant.
    pub fn quotient(&self, variant: Variant) -> Result<Subspace, ModelError> {
        self.per_component(|_| {
            Ok(match variant {
                Variant::Standard => self.maxwell_image().clone(),
                Variant::ChargeZero => self.curvature_image().clone(),
            })
        })
    }

    /// Constant parts `⟨η, F₀⟩` of `F*(η)` over a basis of compact closed 2-cochains.
    pub fn curvature_constants(&self) -> Vec<QPi> {
        let n2 = self.obj.count(2);
        let f0 = &self.obj.f0_over_pi;
        let mut out = Vec::new();
        for a in 0..self.components() {
            for z in self.closed_compact_2() {
                out.push(QPi::pi_times(self.obj.pairing(2, &z.shifted(a * n2), f0)));
            }
        }
        out
    }

    /// `h⁻¹ G α` for a compactly supported component-major 1-cochain.
    pub fn propagate(&self, alpha: &SVec) -> Result<SVec, ModelError> {
        let g = propagator(&self.obj.complex, &self.obj.green, 1, alpha, self.components())?;
        Ok(self.obj.group.mix(&self.obj.group.h_inv, &g, self.n1()))
    }

    /// `τ(a, b) = ⟨a, h⁻¹ G b⟩`.
    pub fn tau(&self, a: &SVec, b: &SVec) -> Result<Q, ModelError> {
        Ok(self.obj.pairing(1, a, &self.propagate(b)?))
    }

    pub fn phase_space(&self, variant: Variant) -> Result<PhaseSpace, ModelError> {
        let einv = self.einv_theorem()?;
        let quotient = self.quotient(variant)?;
        let reps = einv.quotient_basis(&quotient)?.basis().to_vec();
        Ok(PhaseSpace { variant, n1: self.n1(), comps: self.components(), einv, quotient, reps, gram: OnceLock::new(), images: OnceLock::new(), joined: OnceLock::new() })
    }

    /// Linear parts of the radical predicted by the characterization theorem (quotient included).
    ///
    /// For `E⁰` the prediction is that only classes with zero linear part are
    /// degenerate, which is the statement for torus groups.
    pub fn radical_theorem(&self, ps: &PhaseSpace) -> Result<Subspace, ModelError> {
        if ps.variant == Variant::ChargeZero {
            return Ok(ps.quotient.clone());
        }
        let g = &self.obj.group;
        let parts = self.per_component(|torus| Ok(if torus { self.curvature_image().clone() } else { self.real_radical().clone() }))?;
        let mixed: Vec<SVec> = parts.basis().iter().map(|v| g.mix(&g.h, v, self.n1())).collect();
        let mixed = Subspace::span(ps.einv.ambient(), &mixed);
        Ok(mixed.intersect(&ps.einv).sum(&ps.quotient))
    }

    /// `MW*(η) = (0, δ d η)` for a component-major 1-cochain.
    pub fn maxwell_dual(&self, eta: &SVec) -> Result<Observable, ModelError> {
        let d = self.obj.d(1, eta)?;
        Ok(Observable::linear(self.obj.delta(2, &d)?))
    }

    /// `F*(η) = (⟨η, F₀⟩, δ η)` for a component-major 2-cochain.
    pub fn curvature_dual(&self, eta: &SVec) -> Result<Observable, ModelError> {
        let c = QPi::pi_times(self.obj.pairing(2, eta, &self.obj.f0_over_pi));
        Ok(Observable { constant: c, alpha: self.obj.delta(2, eta)? })
    }

    /// Magnetic charge of a 2-cycle in one component: `F*(K(σ))`.
    pub fn charge_mag(&self, sigma: &SVec, component: usize) -> Result<Observable, ModelError> {
        let w = poincare_k(&self.obj.complex, &self.obj.ops, 2, sigma)?;
        self.curvature_dual(&w.zeta.shifted(component * self.obj.count(2)))
    }

    /// Electric charge of an `(m-2)`-cycle in one component: `F*(∗K(σ))`.
    pub fn charge_el(&self, sigma: &SVec, component: usize) -> Result<Observable, ModelError> {
        let x = &self.obj.complex;
        let m = x.dim();
        let w = poincare_k(x, &self.obj.ops, m - 2, sigma)?;
        let psi = hodge_star(x, m - 2, &w.zeta)?;
        if !x.is_supported(2, &psi, Support::Compact) {
            return Err(ModelError::MarginViolation("dual of the charge cycle reaches the margin".into()));
        }
        let o = self.curvature_dual(&psi.shifted(component * self.obj.count(2)))?;
        if !o.alpha.indices().all(|i| !x.is_margin(1, i % self.n1())) {
            return Err(ModelError::MarginViolation("electric charge observable reaches the margin".into()));
        }
        Ok(o)
    }
}

/// Explicit coset model of `E` or `E⁰`: representatives of `E^inv / Q` plus the constant direction.
#[derive(Debug)]
pub struct PhaseSpace {
    pub variant: Variant,
    pub n1: usize,
    pub comps: usize,
    pub einv: Subspace,
    pub quotient: Subspace,
    /// Linear parts whose classes, together with the constants, form a basis.
    pub reps: Vec<SVec>,
    gram: OnceLock<Vec<Vec<Q>>>,
    images: OnceLock<Vec<SVec>>,
    joined: OnceLock<Subspace>,
}

impl PhaseSpace {
    /// Dimension including the constant direction.
    pub fn dim(&self) -> usize {
        1 + self.reps.len()
    }

    /// `h⁻¹ G rep_j` for every representative.
    pub fn propagated(&self, model: &Model) -> Result<&[SVec], ModelError> {
        if let Some(v) = self.images.get() {
            return Ok(v);
        }
        let v: Vec<SVec> = self.reps.iter().map(|r| model.propagate(r)).collect::<Result<_, _>>()?;
        Ok(self.images.get_or_init(|| v))
    }

    /// Gram matrix of `τ` on the representatives (the constant direction has a zero row).
    pub fn gram(&self, model: &Model) -> Result<&Vec<Vec<Q>>, ModelError> {
        if let Some(g) = self.gram.get() {
            return Ok(g);
        }
        let images = self.propagated(model)?;
        let g: Vec<Vec<Q>> =
            self.reps.iter().map(|a| images.iter().map(|gb| model.obj.pairing(1, a, gb)).collect()).collect();
        Ok(self.gram.get_or_init(|| g))
    }

    /// Coordinates of a linear part along the representatives (it must lie in `E^inv`).
    pub fn coordinates(&self, alpha: &SVec) -> Result<SVec, ModelError> {
        Ok(self.coordinates_many(std::slice::from_ref(alpha))?.remove(0))
    }

    /// Coordinates of several linear parts along the representatives.
    pub fn coordinates_many(&self, alphas: &[SVec]) -> Result<Vec<SVec>, ModelError> {
        let joined = self.joined.get_or_init(|| {
            Subspace::from_independent(self.einv.ambient(), self.reps.iter().chain(self.quotient.basis()).cloned().collect())
        });
        let r = self.reps.len();
        Ok(joined.coordinates_many(alphas)?.into_iter().map(|c| c.filter(|i| i < r)).collect())
    }

    /// Whether the class of a linear part vanishes.
    pub fn is_zero_class(&self, alpha: &SVec) -> bool {
        self.quotient.contains(alpha)
    }

    /// Linear parts of the brute-force radical (null space of the Gram matrix), quotient included.
    pub fn radical(&self, model: &Model) -> Result<Subspace, ModelError> {
        let g = self.gram(model)?;
        let r = self.reps.len();
        let m = RatMatrix::from_triplets(r, r, (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| (i, j, g[i][j].clone())));
        let mut vecs: Vec<SVec> = m
            .kernel()
            .basis()
            .iter()
            .map(|c| {
                let mut acc = SVec::new();
                for (i, q) in c.iter() {
                    acc = acc.axpy(q, &self.reps[i]);
                }
                acc
            })
            .collect();
        vecs.extend(self.quotient.basis().iter().cloned());
        Ok(Subspace::span(self.einv.ambient(), &vecs))
    }

    /// `τ(rep_i, v)` for every representative, with `v` a linear part.
    pub fn gram_row(&self, model: &Model, alpha: &SVec) -> Result<Vec<Q>, ModelError> {
        let gv = model.propagate(alpha)?;
        Ok(self.reps.iter().map(|a| model.obj.pairing(1, a, &gv)).collect())
    }

    /// Whether the Gram matrix is skew-symmetric.
    pub fn gram_is_skew(&self, model: &Model) -> Result<bool, ModelError> {
        let g = self.gram(model)?;
        Ok((0..g.len()).all(|i| (0..g.len()).all(|j| g[i][j] == -&g[j][i])))
    }
}
