//! Structure group `𝕋^k × ℝ^l`, spacetime objects with a background curvature,
//! connections, curvature and Maxwell operators, gauge directions and the
//! obstruction group of non-exponential gauge transformations.
//!
//! Component `a` of a `𝔤`-valued cochain is a torus component for `a < k` and a
//! real component otherwise. Cochains with several components are stored
//! component-major. The curvature's linear part is `+d`.

use exactla::{RatMatrix, SVec, Subspace, QPi, Q};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::complex::{blockwise, Cell, ComplexSpec, CubicalComplex, Factor, Support};
use crate::error::ModelError;
use crate::green::Propagator;
use crate::homology::{cohomology, homology, integer_cohomology, Coefficients, HomologyMode};
use crate::lorentz::LorentzOps;

/// A cochain with values `r + π p`, `r` and `p` rational.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiCochain {
    pub rational: SVec,
    pub pi: SVec,
}

impl PiCochain {
    pub fn zero() -> PiCochain {
        PiCochain::default()
    }

    pub fn from_rational(v: SVec) -> PiCochain {
        PiCochain { rational: v, pi: SVec::new() }
    }

    pub fn from_pi(v: SVec) -> PiCochain {
        PiCochain { rational: SVec::new(), pi: v }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.pi.is_zero()
    }

    pub fn add(&self, o: &PiCochain) -> PiCochain {
        PiCochain { rational: self.rational.add(&o.rational), pi: self.pi.add(&o.pi) }
    }

    pub fn sub(&self, o: &PiCochain) -> PiCochain {
        PiCochain { rational: self.rational.sub(&o.rational), pi: self.pi.sub(&o.pi) }
    }

    /// Apply a rational linear map to both parts.
    pub fn map<F: Fn(&SVec) -> SVec>(&self, f: F) -> PiCochain {
        PiCochain { rational: f(&self.rational), pi: f(&self.pi) }
    }

    /// `Σ_i coef_i · value_i` against a rational vector.
    pub fn dot(&self, v: &SVec) -> QPi {
        QPi { rational: self.rational.dot(v), pi: self.pi.dot(v) }
    }
}

/// `G = 𝕋^k × ℝ^l` with an invariant inner product `h` on the Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSignature {
    pub torus: usize,
    pub real: usize,
    pub h: Vec<Vec<Q>>,
    pub h_inv: Vec<Vec<Q>>,
}

impl GroupSignature {
    /// Validate `h` (identity when absent): symmetric and invertible.
    pub fn new(torus: usize, real: usize, h: Option<Vec<Vec<Q>>>) -> Result<GroupSignature, ModelError> {
        let r = torus + real;
        if r == 0 {
            return Err(ModelError::Config("the group needs at least one factor".into()));
        }
        let h = h.unwrap_or_else(|| (0..r).map(|i| (0..r).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect());
        if h.len() != r || h.iter().any(|row| row.len() != r) {
            return Err(ModelError::Config(format!("h must be {r}x{r}")));
        }
        for i in 0..r {
            for j in 0..r {
                if h[i][j] != h[j][i] {
                    return Err(ModelError::Config("h must be symmetric".into()));
                }
            }
        }
        let m = RatMatrix::from_triplets(r, r, (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| (i, j, h[i][j].clone())));
        let mut h_inv = vec![vec![Q::zero(); r]; r];
        for (j, col) in h_inv.iter_mut().enumerate() {
            let sol = m.solve(&SVec::unit(j)).map_err(|_| ModelError::Config("h must be invertible".into()))?;
            for (i, v) in col.iter_mut().enumerate() {
                *v = sol.get(i);
            }
        }
        // `h_inv` was filled by columns of a symmetric inverse, so it is symmetric.
        Ok(GroupSignature { torus, real, h, h_inv })
    }

    pub fn rank(&self) -> usize {
        self.torus + self.real
    }

    pub fn is_torus(&self, a: usize) -> bool {
        a < self.torus
    }

    /// Whether `h` couples torus components to real ones.
    pub fn is_block_diagonal(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| self.is_torus(i) == self.is_torus(j) || self.h[i][j].is_zero()))
    }

    /// Apply a `r × r` matrix across the components of a component-major vector.
    pub fn mix(&self, m: &[Vec<Q>], v: &SVec, n: usize) -> SVec {
        let blocks: Vec<SVec> = (0..self.rank()).map(|a| v.filter(|i| i / n == a).remap(|i| Some(i - a * n))).collect();
        let mut out = SVec::new();
        for (a, row) in m.iter().enumerate() {
            let mut acc = SVec::new();
            for (b, coef) in row.iter().enumerate() {
                if !coef.is_zero() && !blocks[b].is_zero() {
                    acc = acc.axpy(coef, &blocks[b]);
                }
            }
            out = out.concat(a * n, &acc);
        }
        out
    }
}

/// Background flux `n` through the spatial plane spanned by two cycle factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxSpec {
    pub component: usize,
    pub plane: [usize; 2],
    pub n: i64,
}

/// Serializable description of a spacetime object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    #[serde(flatten)]
    pub complex: ComplexSpec,
    /// Number of torus factors `k`.
    pub torus: usize,
    /// Number of real factors `l`.
    pub real: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<Q>>>,
    #[serde(default)]
    pub flux: Vec<FluxSpec>,
}

/// A spacetime with structure group, operators and background curvature `F₀`.
#[derive(Clone, Debug)]
pub struct SpacetimeObject {
    pub spec: ObjectSpec,
    pub complex: CubicalComplex,
    pub ops: LorentzOps,
    pub green: Propagator,
    pub group: GroupSignature,
    /// `F₀ / π`, a component-major rational 2-cochain.
    pub f0_over_pi: SVec,
}

impl SpacetimeObject {
    pub fn new(spec: ObjectSpec) -> Result<SpacetimeObject, ModelError> {
        let complex = CubicalComplex::build(&spec.complex)?;
        let group = GroupSignature::new(spec.torus, spec.real, spec.h.clone())?;
        let ops = LorentzOps::new(&complex);
        let green = Propagator::new(&complex, &ops)?;
        let f0_over_pi = background_flux(&complex, &group, &spec.flux)?;
        let obj = SpacetimeObject { spec, complex, ops, green, group, f0_over_pi };
        obj.validate_background()?;
        Ok(obj)
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn components(&self) -> usize {
        self.group.rank()
    }

    pub fn count(&self, k: usize) -> usize {
        self.complex.count(k)
    }

    /// `F₀` as a cochain with values in `ℚ + ℚπ`.
    pub fn f0(&self) -> PiCochain {
        PiCochain::from_pi(self.f0_over_pi.clone())
    }

    /// `d` on component-major cochains.
    pub fn d(&self, k: usize, v: &SVec) -> Result<SVec, ModelError> {
        self.ops.d(k, v, self.components())
    }

    /// `δ` on component-major cochains.
    pub fn delta(&self, k: usize, v: &SVec) -> Result<SVec, ModelError> {
        self.ops.delta(k, v, self.components())
    }

    /// Indefinite pairing summed over components.
    pub fn pairing(&self, k: usize, a: &SVec, b: &SVec) -> Q {
        self.ops.pairing(k, a, b)
    }

    fn validate_background(&self) -> Result<(), ModelError> {
        if self.f0_over_pi.is_zero() {
            return Ok(());
        }
        if self.complex.dim() > 2 && !self.d(2, &self.f0_over_pi)?.is_zero() {
            return Err(ModelError::Config("background curvature is not closed".into()));
        }
        if !self.delta(2, &self.f0_over_pi)?.is_zero() {
            return Err(ModelError::Config("background curvature is not coclosed".into()));
        }
        let cycles = homology(&self.complex, 2, Coefficients::Int, HomologyMode::Absolute)?;
        let n = self.count(2);
        for a in 0..self.group.torus {
            let block = self.f0_over_pi.filter(|i| i / n == a).remap(|i| Some(i - a * n));
            for s in &cycles.representatives {
                // Periods of F₀ / 2π must be integers.
                let period = &block.dot(s) * &Q::frac(1, 2);
                if !period.is_integer() {
                    return Err(ModelError::Config(format!("flux period {period} on component {a} is not an integer")));
                }
            }
        }
        Ok(())
    }
}

/// `F₀ / π`: the constant form `2n / (N_i N_j)` on plaquettes of each flux plane.
fn background_flux(x: &CubicalComplex, g: &GroupSignature, flux: &[FluxSpec]) -> Result<SVec, ModelError> {
    let n = x.count(2);
    let mut out = SVec::new();
    for f in flux {
        if f.component >= g.rank() {
            return Err(ModelError::Config(format!("flux component {} out of range", f.component)));
        }
        if !g.is_torus(f.component) {
            return Err(ModelError::Config("background flux is only allowed on torus components".into()));
        }
        let [i, j] = f.plane;
        let sizes: Vec<usize> = [i, j]
            .iter()
            .map(|&p| match x.factors().get(p) {
                Some(Factor::Cycle(m)) => Ok(*m),
                _ => Err(ModelError::Config(format!("flux plane factor {p} is not a spatial cycle"))),
            })
            .collect::<Result<_, _>>()?;
        if i == j {
            return Err(ModelError::Config("flux plane needs two distinct factors".into()));
        }
        let value = Q::frac(2 * f.n, (sizes[0] * sizes[1]) as i64);
        let nf = x.nfactors();
        let cells = (0..n).filter(|&c| {
            let e = x.cell(2, c).edge_factors(nf);
            e == vec![i.min(j), i.max(j)]
        });
        let v = SVec::from_pairs(cells.map(|c| (c + f.component * n, value.clone())));
        out = out.add(&v);
    }
    Ok(out)
}

/// A connection relative to the reference one: its displacement `A`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Connection {
    pub a: PiCochain,
}

impl Connection {
    pub fn reference() -> Connection {
        Connection::default()
    }
}

/// `F(c) = F₀ + dA`.
pub fn curvature(obj: &SpacetimeObject, c: &Connection) -> Result<PiCochain, ModelError> {
    let r = obj.components();
    let (n1, n2) = (obj.count(1), obj.count(2));
    let d1 = obj.complex.d_matrix(1)?;
    let da = c.a.map(|v| blockwise(v, n1, n2, r, |b| d1.apply(b)));
    Ok(obj.f0().add(&da))
}

/// `MW(c) = δ F(c)`.
pub fn maxwell(obj: &SpacetimeObject, c: &Connection) -> Result<PiCochain, ModelError> {
    let f = curvature(obj, c)?;
    let r = obj.components();
    let m = obj.ops.delta_matrix(2)?;
    Ok(f.map(|v| blockwise(v, obj.count(2), obj.count(1), r, |b| m.apply(b))))
}

/// Holonomy `J(A)(σ)` of one component along a 1-cycle.
pub fn holonomy(obj: &SpacetimeObject, c: &Connection, component: usize, sigma: &SVec) -> QPi {
    let n = obj.count(1);
    c.a.dot(&sigma.shifted(component * n))
}

/// Free rank and torsion of `A_G ≅ H¹(M, ℤ)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn gauge_group_obstruction(obj: &SpacetimeObject) -> Result<Obstruction, ModelError> {
    let (free, torsion) = integer_cohomology(&obj.complex, 1)?;
    let k = obj.group.torus;
    Ok(Obstruction { free_rank: free * k, torsion: (0..k).flat_map(|_| torsion.clone()).collect() })
}

/// Infinitesimal and large gauge directions.
#[derive(Clone, Debug)]
pub struct GaugeDirections {
    /// `d(vertex indicator)` for every vertex and component.
    pub exact_generators: Vec<SVec>,
    /// Closed 1-cochains with integral periods, one per torus component and `H¹` generator.
    /// The gauge shift is `2π` times a generator.
    pub integral_closed: Vec<SVec>,
    /// Integral generators of `H¹(M, ℤ)` as scalar cochains.
    pub scalar_generators: Vec<SVec>,
}

impl GaugeDirections {
    pub fn exact_span(&self, ambient: usize) -> Subspace {
        Subspace::span(ambient, &self.exact_generators)
    }
}

/// Integral closed 1-cochains whose classes form a basis of `H¹(M, ℤ)`.
///
/// Products use cut cochains (the indicator of the edges of a cycle factor at
/// position 0); carved complexes use the basis dual to an `H₁` basis.
pub fn integral_h1_generators(x: &CubicalComplex) -> Result<Vec<SVec>, ModelError> {
    if !x.spec().is_carved() {
        let mut out = Vec::new();
        for (i, f) in x.factors().iter().enumerate() {
            if let Factor::Cycle(_) = f {
                let cells = (0..x.count(1)).filter(|&c| {
                    let cell: &Cell = x.cell(1, c);
                    cell.is_edge(i) && cell.pos(i) == 0
                });
                out.push(SVec::from_pairs(cells.map(|c| (c, Q::one()))));
            }
        }
        return Ok(out);
    }
    let classes = cohomology(x, 1, Support::Full)?;
    let cycles = homology(x, 1, Coefficients::Int, HomologyMode::Absolute)?;
    let r = classes.dim();
    // Period matrix P[i][j] = z_i(σ_j); the dual basis is P⁻ᵀ z.
    let p = RatMatrix::from_triplets(
        r,
        r,
        (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| (i, j, classes.representatives[i].dot(&cycles.representatives[j]))),
    );
    let pt = p.transpose();
    let mut out = Vec::new();
    for j in 0..r {
        let coef = pt.solve(&SVec::unit(j))?;
        let mut z = SVec::new();
        for (i, c) in coef.iter() {
            z = z.axpy(c, &classes.representatives[i]);
        }
        out.push(z);
    }
    Ok(out)
}

pub fn gauge_directions(obj: &SpacetimeObject) -> Result<GaugeDirections, ModelError> {
    let r = obj.components();
    let (n0, n1) = (obj.count(0), obj.count(1));
    let d0 = obj.complex.d_matrix(0)?;
    let mut exact_generators = Vec::new();
    for a in 0..r {
        for v in 0..n0 {
            exact_generators.push(d0.col(v).shifted(a * n1));
        }
    }
    let scalar_generators = integral_h1_generators(&obj.complex)?;
    let mut integral_closed = Vec::new();
    for a in 0..obj.group.torus {
        for z in &scalar_generators {
            integral_closed.push(z.shifted(a * n1));
        }
    }
    Ok(GaugeDirections { exact_generators, integral_closed, scalar_generators })
}

/// `A ↦ A + dχ + 2π Σ n_j z_j` with `χ` a component-major 0-cochain.
pub fn apply_gauge(
    obj: &SpacetimeObject,
    c: &Connection,
    chi: &SVec,
    windings: &[(usize, i64)],
    dirs: &GaugeDirections,
) -> Result<Connection, ModelError> {
    let dchi = obj.d(0, chi)?;
    let mut shift = SVec::new();
    for &(j, n) in windings {
        let z = dirs
            .integral_closed
            .get(j)
            .ok_or_else(|| ModelError::OutOfBounds(format!("no integral gauge generator {j}")))?;
        shift = shift.axpy(&Q::int(2 * n), z);
    }
    Ok(Connection { a: c.a.add(&PiCochain { rational: dchi, pi: shift }) })
}
