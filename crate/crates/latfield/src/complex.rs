//! Product cubical complexes built from cycle, path and time factors.
//!
//! A cell picks, in every factor, either a vertex `p` or the edge `[p, p+1]`
//! (indices wrap on a cycle). The time factor, when present, is factor 0.
//! Cells are ordered lexicographically by factor, and the boundary of a cell
//! is `Σ_i (-1)^{#edges before i} (hi_i - lo_i)` over its edge factors.
//!
//! A complex may also be a face-closed part of a product ("carved"): every
//! cell touching a removed vertex is dropped. The margin of a complex is the
//! set of cells all of whose vertices lie in the outer `margin_width` layers
//! of the path and time factors, together with the retained faces of removed
//! cells. Cochains vanishing on the margin model compactly supported forms.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use exactla::{RatMatrix, SVec, Subspace, Q};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::lorentz;

/// Largest number of factors a complex may have.
pub const MAX_FACTORS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `n` vertices on a circle, `n` edges.
    Cycle(usize),
    /// `n` vertices on a segment, `n - 1` edges.
    Path(usize),
    /// Like `Path`, but the time direction of the Lorentzian structure.
    Time(usize),
}

impl Factor {
    pub fn n(&self) -> usize {
        match *self {
            Factor::Cycle(n) | Factor::Path(n) | Factor::Time(n) => n,
        }
    }

    pub fn edges(&self) -> usize {
        match *self {
            Factor::Cycle(n) => n,
            Factor::Path(n) | Factor::Time(n) => n - 1,
        }
    }

    /// Path and time factors have end points.
    pub fn is_open(&self) -> bool {
        !matches!(self, Factor::Cycle(_))
    }

    pub fn is_time(&self) -> bool {
        matches!(self, Factor::Time(_))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n() as i64 - self.edges() as i64
    }

    /// Vertex at the far end of edge `p`.
    pub fn edge_head(&self, p: usize) -> usize {
        (p + 1) % self.n()
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Cycle(n) => write!(f, "CYCLE({n})"),
            Factor::Path(n) => write!(f, "PATH({n})"),
            Factor::Time(n) => write!(f, "TIME({n})"),
        }
    }
}

impl FromStr for Factor {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Factor, ModelError> {
        let bad = || ModelError::Config(format!("cannot parse factor {s:?}"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let n: usize = s[open + 1..s.len() - 1].trim().parse().map_err(|_| bad())?;
        match s[..open].trim().to_ascii_uppercase().as_str() {
            "CYCLE" => Ok(Factor::Cycle(n)),
            "PATH" => Ok(Factor::Path(n)),
            "TIME" => Ok(Factor::Time(n)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Factor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Factor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Factor, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A cell: per factor, `(1, p)` for edge `p` or `(0, p)` for vertex `p`. Unused slots are `(0, 0)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cell {
    slots: [(u8, u16); MAX_FACTORS],
}

impl Cell {
    pub fn new(parts: &[(bool, usize)]) -> Cell {
        assert!(parts.len() <= MAX_FACTORS);
        let mut slots = [(0u8, 0u16); MAX_FACTORS];
        for (s, &(e, p)) in slots.iter_mut().zip(parts) {
            *s = (e as u8, p as u16);
        }
        Cell { slots }
    }

    pub fn vertex(coords: &[usize]) -> Cell {
        let parts: Vec<(bool, usize)> = coords.iter().map(|&p| (false, p)).collect();
        Cell::new(&parts)
    }

    pub fn is_edge(&self, i: usize) -> bool {
        self.slots[i].0 == 1
    }

    pub fn pos(&self, i: usize) -> usize {
        self.slots[i].1 as usize
    }

    pub fn with(&self, i: usize, edge: bool, pos: usize) -> Cell {
        let mut c = *self;
        c.slots[i] = (edge as u8, pos as u16);
        c
    }

    pub fn dim(&self) -> usize {
        self.slots.iter().filter(|s| s.0 == 1).count()
    }

    /// Factor indices along which the cell extends.
    pub fn edge_factors(&self, nf: usize) -> Vec<usize> {
        (0..nf).filter(|&i| self.is_edge(i)).collect()
    }

    /// Per-factor description, e.g. `[(true, 2), (false, 0)]`.
    pub fn parts(&self, nf: usize) -> Vec<(bool, usize)> {
        (0..nf).map(|i| (self.is_edge(i), self.pos(i))).collect()
    }
}

/// Which cochains count as supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Support {
    /// Every cochain.
    Full,
    /// Vanishing on all margin cells.
    Compact,
    /// Vanishing on the temporal margin; unrestricted towards spatial walls.
    TimelikeCompact,
}

fn default_width() -> usize {
    1
}

/// Serializable description of a complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub factors: Vec<Factor>,
    #[serde(default = "default_width")]
    pub margin_width: usize,
    /// Lattice spacing per factor; unit spacing when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacings: Option<Vec<Q>>,
    /// Remove the causal hull `J(p)` of this vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remove_cone: Option<Vec<usize>>,
    /// Remove every vertex inside this box (inclusive ranges per factor).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remove_box: Option<Vec<[usize; 2]>>,
    /// Remove every vertex outside this box (inclusive ranges per factor).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep_box: Option<Vec<[usize; 2]>>,
}

impl ComplexSpec {
    pub fn product(factors: Vec<Factor>) -> ComplexSpec {
        ComplexSpec { factors, margin_width: 1, spacings: None, remove_cone: None, remove_box: None, keep_box: None }
    }

    pub fn is_carved(&self) -> bool {
        self.remove_cone.is_some() || self.remove_box.is_some() || self.keep_box.is_some()
    }

    /// The same spec without any carving.
    pub fn host(&self) -> ComplexSpec {
        ComplexSpec { remove_cone: None, remove_box: None, keep_box: None, ..self.clone() }
    }
}

/// A finite cubical complex with boundary data and margin flags.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    spec: ComplexSpec,
    cells: Vec<Vec<Cell>>,
    index: Vec<HashMap<Cell, usize>>,
    /// `d[k]`: coboundary from degree `k` to `k + 1`; rows are `(k+1)`-cells.
    d: Vec<RatMatrix>,
    margin: Vec<Vec<bool>>,
    tmargin: Vec<Vec<bool>>,
}

impl CubicalComplex {
    /// Build the complex described by `spec`.
    pub fn build(spec: &ComplexSpec) -> Result<CubicalComplex, ModelError> {
        validate(spec)?;
        let product = assemble(spec, None);
        if !spec.is_carved() {
            return Ok(product);
        }
        let removed = removed_vertices(&product, spec)?;
        Ok(assemble(spec, Some(&removed)))
    }

    /// Product of the given factors with the default margin width.
    pub fn product(factors: &[Factor]) -> Result<CubicalComplex, ModelError> {
        CubicalComplex::build(&ComplexSpec::product(factors.to_vec()))
    }

    pub fn spec(&self) -> &ComplexSpec {
        &self.spec
    }

    pub fn factors(&self) -> &[Factor] {
        &self.spec.factors
    }

    pub fn nfactors(&self) -> usize {
        self.spec.factors.len()
    }

    /// Top cell dimension.
    pub fn dim(&self) -> usize {
        self.nfactors()
    }

    pub fn margin_width(&self) -> usize {
        self.spec.margin_width
    }

    pub fn has_time(&self) -> bool {
        self.spec.factors.first().is_some_and(|f| f.is_time())
    }

    pub fn spacing(&self, i: usize) -> Q {
        self.spec.spacings.as_ref().map_or(Q::one(), |s| s[i].clone())
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, |c| c.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim()).map(|k| self.count(k)).collect()
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        &self.cells[k]
    }

    pub fn cell(&self, k: usize, i: usize) -> &Cell {
        &self.cells[k][i]
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        self.index.get(c.dim())?.get(c).copied()
    }

    /// Coboundary matrix `C^k → C^{k+1}`.
    pub fn d_matrix(&self, k: usize) -> Result<&RatMatrix, ModelError> {
        self.d.get(k).ok_or(ModelError::TopDegree(k))
    }

    /// Boundary matrix `∂_k : C_k → C_{k-1}` (the transpose of the coboundary).
    pub fn boundary(&self, k: usize) -> Result<RatMatrix, ModelError> {
        if k == 0 {
            return Err(ModelError::DegreeZero);
        }
        Ok(self.d_matrix(k - 1)?.transpose())
    }

    pub fn is_margin(&self, k: usize, i: usize) -> bool {
        self.margin[k][i]
    }

    pub fn is_temporal_margin(&self, k: usize, i: usize) -> bool {
        self.tmargin[k][i]
    }

    pub fn margin_flags(&self, k: usize) -> &[bool] {
        &self.margin[k]
    }

    fn excluded(&self, k: usize, i: usize, mode: Support) -> bool {
        match mode {
            Support::Full => false,
            Support::Compact => self.margin[k][i],
            Support::TimelikeCompact => self.tmargin[k][i],
        }
    }

    /// Cells on which cochains of the given support class may be nonzero.
    pub fn free_cells(&self, k: usize, mode: Support) -> Vec<usize> {
        (0..self.count(k)).filter(|&i| !self.excluded(k, i, mode)).collect()
    }

    /// Cells on which cochains of the given support class must vanish.
    pub fn constrained_cells(&self, k: usize, mode: Support) -> Vec<usize> {
        (0..self.count(k)).filter(|&i| self.excluded(k, i, mode)).collect()
    }

    /// Whether a scalar cochain vanishes where `mode` requires.
    pub fn is_supported(&self, k: usize, v: &SVec, mode: Support) -> bool {
        v.indices().all(|i| !self.excluded(k, i, mode))
    }

    /// Subspace of scalar `k`-cochains with the given support.
    pub fn relative_subspace(&self, k: usize, mode: Support) -> Subspace {
        Subspace::from_independent(self.count(k), self.free_cells(k, mode).into_iter().map(SVec::unit).collect())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts().iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// Vertices of a cell.
    pub fn vertices_of(&self, c: &Cell) -> Vec<Cell> {
        let nf = self.nfactors();
        let mut out = vec![Cell::new(&[])];
        for i in 0..nf {
            let p = c.pos(i);
            let choices: Vec<usize> =
                if c.is_edge(i) { vec![p, self.spec.factors[i].edge_head(p)] } else { vec![p] };
            out = out.into_iter().flat_map(|v| choices.iter().map(move |&q| v.with(i, false, q))).collect();
        }
        out
    }

    /// Position along the time axis in half steps: `2t` for a time vertex, `2t + 1` for a time edge.
    pub fn time_position(&self, c: &Cell) -> usize {
        2 * c.pos(0) + c.is_edge(0) as usize
    }

    /// Scalar cochain `d v`.
    pub fn d_apply(&self, k: usize, v: &SVec) -> Result<SVec, ModelError> {
        Ok(self.d_matrix(k)?.apply(v))
    }

    /// Check `∂∂ = 0` on every degree.
    pub fn boundary_squares_to_zero(&self) -> bool {
        (0..self.dim().saturating_sub(1)).all(|k| self.d[k + 1].mul(&self.d[k]).map(|m| m.is_zero()).unwrap_or(false))
    }

    /// Check that the margin is closed under taking faces.
    pub fn margin_is_face_closed(&self) -> bool {
        (1..=self.dim()).all(|k| {
            (0..self.count(k))
                .filter(|&i| self.margin[k][i])
                .all(|i| self.faces(k, i).into_iter().all(|(f, _)| self.margin[k - 1][f]))
        })
    }

    /// Face indices (in degree `k - 1`) of cell `i` of degree `k`, with incidence signs.
    pub fn faces(&self, k: usize, i: usize) -> Vec<(usize, i64)> {
        faces_of(&self.spec.factors, &self.cells[k][i])
            .into_iter()
            .filter_map(|(f, s)| self.index[k - 1].get(&f).map(|&j| (j, s)))
            .collect()
    }
}

fn validate(spec: &ComplexSpec) -> Result<(), ModelError> {
    let f = &spec.factors;
    if f.is_empty() || f.len() > MAX_FACTORS {
        return Err(ModelError::BadFactor(format!("need between 1 and {MAX_FACTORS} factors")));
    }
    for (i, x) in f.iter().enumerate() {
        if x.n() < 3 {
            return Err(ModelError::BadFactor(format!("{x} has fewer than 3 vertices")));
        }
        if x.is_time() && i != 0 {
            return Err(ModelError::BadFactor("the time factor must come first".into()));
        }
        if x.n() > u16::MAX as usize {
            return Err(ModelError::BadFactor(format!("{x} is too large")));
        }
    }
    let w = spec.margin_width;
    if f.iter().any(|x| x.is_open()) {
        if w == 0 {
            return Err(ModelError::BadFactor("margin width must be at least 1".into()));
        }
        if let Some(x) = f.iter().find(|x| x.is_open() && x.n() <= 2 * w) {
            return Err(ModelError::BadFactor(format!("{x} leaves no interior for margin width {w}")));
        }
    }
    if let Some(s) = &spec.spacings {
        if s.len() != f.len() || s.iter().any(|q| q.signum() <= 0) {
            return Err(ModelError::BadFactor("spacings must be positive, one per factor".into()));
        }
    }
    let check_point = |p: &[usize], what: &str| -> Result<(), ModelError> {
        if p.len() != f.len() || p.iter().zip(f).any(|(&x, fac)| x >= fac.n()) {
            return Err(ModelError::OutOfBounds(format!("{what} {p:?} does not fit {}", describe_factors(f))));
        }
        Ok(())
    };
    if let Some(p) = &spec.remove_cone {
        check_point(p, "cone center")?;
    }
    for b in [&spec.remove_box, &spec.keep_box].into_iter().flatten() {
        if b.len() != f.len() || b.iter().zip(f).any(|(r, fac)| r[0] > r[1] || r[1] >= fac.n()) {
            return Err(ModelError::OutOfBounds(format!("box {b:?} does not fit {}", describe_factors(f))));
        }
    }
    Ok(())
}

pub fn describe_factors(f: &[Factor]) -> String {
    f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x")
}

/// Faces of a cell with their incidence signs.
fn faces_of(factors: &[Factor], c: &Cell) -> Vec<(Cell, i64)> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    for (i, fac) in factors.iter().enumerate() {
        if c.is_edge(i) {
            let p = c.pos(i);
            out.push((c.with(i, false, fac.edge_head(p)), sign));
            out.push((c.with(i, false, p), -sign));
            sign = -sign;
        }
    }
    out
}

fn all_cells(factors: &[Factor]) -> Vec<Cell> {
    let mut out = vec![Cell::new(&[])];
    for (i, f) in factors.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * (f.n() + f.edges()));
        for c in &out {
            for p in 0..f.n() {
                next.push(c.with(i, false, p));
            }
            for p in 0..f.edges() {
                next.push(c.with(i, true, p));
            }
        }
        out = next;
    }
    out
}

fn removed_vertices(product: &CubicalComplex, spec: &ComplexSpec) -> Result<HashSet<Cell>, ModelError> {
    let mut removed = HashSet::new();
    if let Some(p) = &spec.remove_cone {
        if !product.has_time() {
            return Err(ModelError::Config("remove_cone needs a time factor".into()));
        }
        let v = Cell::vertex(p);
        removed.extend(lorentz::vertex_cone(product, &[v], lorentz::Direction::Future));
        removed.extend(lorentz::vertex_cone(product, &[v], lorentz::Direction::Past));
    }
    let nf = product.nfactors();
    let inside = |v: &Cell, b: &[[usize; 2]]| (0..nf).all(|i| v.pos(i) >= b[i][0] && v.pos(i) <= b[i][1]);
    for v in product.cells(0) {
        if spec.remove_box.as_ref().is_some_and(|b| inside(v, b)) || spec.keep_box.as_ref().is_some_and(|b| !inside(v, b)) {
            removed.insert(*v);
        }
    }
    Ok(removed)
}

fn assemble(spec: &ComplexSpec, removed: Option<&HashSet<Cell>>) -> CubicalComplex {
    let factors = &spec.factors;
    let nf = factors.len();
    let w = spec.margin_width;
    let mut probe = CubicalComplex {
        spec: spec.clone(),
        cells: vec![],
        index: vec![],
        d: vec![],
        margin: vec![],
        tmargin: vec![],
    };
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); nf + 1];
    let mut frontier: HashSet<Cell> = HashSet::new();
    let all = all_cells(factors);
    let touches_removed = |c: &Cell, probe: &CubicalComplex| match removed {
        Some(r) => probe.vertices_of(c).iter().any(|v| r.contains(v)),
        None => false,
    };
    let mut dropped = Vec::new();
    for c in all {
        if touches_removed(&c, &probe) {
            dropped.push(c);
        } else {
            cells[c.dim()].push(c);
        }
    }
    for c in &mut cells {
        c.sort();
    }
    let index: Vec<HashMap<Cell, usize>> =
        cells.iter().map(|cs| cs.iter().enumerate().map(|(i, c)| (*c, i)).collect()).collect();
    // Retained faces (of every codimension) of dropped cells form the frontier.
    for c in &dropped {
        for f in all_faces(factors, c) {
            if index[f.dim()].contains_key(&f) {
                frontier.insert(f);
            }
        }
    }
    let mut d = Vec::with_capacity(nf);
    for k in 0..nf {
        let mut trip = Vec::new();
        for (row, c) in cells[k + 1].iter().enumerate() {
            for (f, s) in faces_of(factors, c) {
                if let Some(&col) = index[k].get(&f) {
                    trip.push((row, col, Q::int(s)));
                }
            }
        }
        d.push(RatMatrix::from_triplets(cells[k + 1].len(), cells[k].len(), trip));
    }
    let collar = |v: &Cell, time_only: bool| {
        factors.iter().enumerate().any(|(i, f)| {
            f.is_open() && (!time_only || f.is_time()) && (v.pos(i) < w || v.pos(i) > f.n() - 1 - w)
        })
    };
    probe.cells = cells;
    let margin: Vec<Vec<bool>> = probe
        .cells
        .iter()
        .map(|cs| cs.iter().map(|c| frontier.contains(c) || probe.vertices_of(c).iter().all(|v| collar(v, false))).collect())
        .collect();
    let tmargin: Vec<Vec<bool>> = probe
        .cells
        .iter()
        .map(|cs| cs.iter().map(|c| probe.vertices_of(c).iter().all(|v| collar(v, true))).collect())
        .collect();
    probe.index = index;
    probe.d = d;
    probe.margin = margin;
    probe.tmargin = tmargin;
    probe
}

/// All faces of a cell, of every dimension, including the cell itself.
fn all_faces(factors: &[Factor], c: &Cell) -> Vec<Cell> {
    let mut out = vec![*c];
    for (i, f) in factors.iter().enumerate() {
        if c.is_edge(i) {
            let p = c.pos(i);
            let mut next = Vec::with_capacity(out.len() * 3);
            for x in &out {
                next.push(*x);
                next.push(x.with(i, false, p));
                next.push(x.with(i, false, f.edge_head(p)));
            }
            out = next;
        }
    }
    out
}

/// A cochain with values in `Q^components`, stored component-major:
/// entry `comp * count(k) + cell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub components: usize,
    pub values: SVec,
}

impl Cochain {
    pub fn zero(degree: usize, components: usize) -> Cochain {
        Cochain { degree, components, values: SVec::new() }
    }

    pub fn scalar(degree: usize, values: SVec) -> Cochain {
        Cochain { degree, components: 1, values }
    }

    /// Exterior derivative, applied per component.
    pub fn d(&self, x: &CubicalComplex) -> Result<Cochain, ModelError> {
        let m = x.d_matrix(self.degree)?;
        Ok(Cochain {
            degree: self.degree + 1,
            components: self.components,
            values: blockwise(&self.values, x.count(self.degree), x.count(self.degree + 1), self.components, |v| m.apply(v)),
        })
    }

    /// Values of one component as a scalar cochain.
    pub fn component(&self, x: &CubicalComplex, a: usize) -> SVec {
        let n = x.count(self.degree);
        self.values.filter(|i| i / n == a).remap(|i| Some(i - a * n))
    }
}

/// Apply a scalar map to each component block of a component-major vector.
pub fn blockwise<F: Fn(&SVec) -> SVec>(v: &SVec, n_in: usize, n_out: usize, comps: usize, f: F) -> SVec {
    if comps == 1 {
        return f(v);
    }
    let mut out = SVec::new();
    let mut rest = v.clone();
    for a in 0..comps {
        let (block, tail) = rest.split_at(n_in);
        rest = tail;
        let img = f(&block);
        out = out.concat(a * n_out, &img);
    }
    out
}

/// Injective cell map from a source complex into a target complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcomplexEmbedding {
    pub source_counts: Vec<usize>,
    pub target_counts: Vec<usize>,
    /// `maps[k][i]`: target index of source `k`-cell `i`.
    pub maps: Vec<Vec<usize>>,
    /// Orientation sign of each mapped cell.
    pub signs: Vec<Vec<i8>>,
}

impl SubcomplexEmbedding {
    pub fn identity(x: &CubicalComplex) -> SubcomplexEmbedding {
        SubcomplexEmbedding {
            source_counts: x.counts(),
            target_counts: x.counts(),
            maps: x.counts().iter().map(|&n| (0..n).collect()).collect(),
            signs: x.counts().iter().map(|&n| vec![1; n]).collect(),
        }
    }

    /// Translate a product complex into a target complex by per-factor offsets.
    pub fn translate(source: &CubicalComplex, target: &CubicalComplex, offsets: &[usize]) -> Result<SubcomplexEmbedding, ModelError> {
        let nf = source.nfactors();
        if target.nfactors() != nf || offsets.len() != nf {
            return Err(ModelError::OutOfBounds("factor counts differ".into()));
        }
        for i in 0..nf {
            let (s, t) = (source.factors()[i], target.factors()[i]);
            let ok = match (s, t) {
                (Factor::Cycle(a), Factor::Cycle(b)) => a == b,
                (Factor::Path(a), Factor::Path(b)) | (Factor::Time(a), Factor::Time(b)) => a + offsets[i] <= b,
                _ => false,
            };
            if !ok {
                return Err(ModelError::OutOfBounds(format!("{s} at offset {} does not fit into {t}", offsets[i])));
            }
        }
        let shift = |c: &Cell| {
            let mut out = *c;
            for i in 0..nf {
                let n = target.factors()[i].n();
                out = out.with(i, c.is_edge(i), (c.pos(i) + offsets[i]) % n);
            }
            out
        };
        let mut maps = Vec::new();
        for k in 0..=source.dim() {
            let mut m = Vec::with_capacity(source.count(k));
            for c in source.cells(k) {
                let t = target
                    .index_of(&shift(c))
                    .ok_or_else(|| ModelError::OutOfBounds(format!("translated cell {:?} is not in the target", c.parts(nf))))?;
                m.push(t);
            }
            maps.push(m);
        }
        Ok(SubcomplexEmbedding {
            source_counts: source.counts(),
            target_counts: target.counts(),
            signs: maps.iter().map(|m| vec![1; m.len()]).collect(),
            maps,
        })
    }

    /// Inclusion of a carved complex into its host, matching cells by coordinates.
    pub fn inclusion(source: &CubicalComplex, target: &CubicalComplex) -> Result<SubcomplexEmbedding, ModelError> {
        if source.factors() != target.factors() {
            return Err(ModelError::OutOfBounds("inclusion needs identical factors".into()));
        }
        let mut maps = Vec::new();
        for k in 0..=source.dim() {
            let m: Result<Vec<usize>, ModelError> = source
                .cells(k)
                .iter()
                .map(|c| target.index_of(c).ok_or_else(|| ModelError::OutOfBounds("cell missing in host".into())))
                .collect();
            maps.push(m?);
        }
        Ok(SubcomplexEmbedding {
            source_counts: source.counts(),
            target_counts: target.counts(),
            signs: maps.iter().map(|m| vec![1; m.len()]).collect(),
            maps,
        })
    }

    /// `g ∘ self` for `self: A → B` and `g: B → C`.
    pub fn then(&self, g: &SubcomplexEmbedding) -> SubcomplexEmbedding {
        let maps: Vec<Vec<usize>> = self.maps.iter().enumerate().map(|(k, m)| m.iter().map(|&j| g.maps[k][j]).collect()).collect();
        let signs = self
            .signs
            .iter()
            .enumerate()
            .map(|(k, s)| s.iter().zip(&self.maps[k]).map(|(&a, &j)| a * g.signs[k][j]).collect())
            .collect();
        SubcomplexEmbedding { source_counts: self.source_counts.clone(), target_counts: g.target_counts.clone(), maps, signs }
    }

    /// Extension by zero of a scalar source `k`-cochain.
    pub fn push(&self, k: usize, v: &SVec) -> SVec {
        SVec::from_pairs(v.iter().map(|(i, x)| (self.maps[k][i], if self.signs[k][i] < 0 { -x } else { x.clone() })))
    }

    /// Restriction of a scalar target `k`-cochain.
    pub fn pull(&self, k: usize, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (i, (&t, &s)) in self.maps[k].iter().zip(&self.signs[k]).enumerate() {
            let x = v.get(t);
            out.push(i, if s < 0 { -x } else { x });
        }
        out
    }

    pub fn push_components(&self, k: usize, v: &SVec, comps: usize) -> SVec {
        blockwise(v, self.source_counts[k], self.target_counts[k], comps, |b| self.push(k, b))
    }

    pub fn pull_components(&self, k: usize, v: &SVec, comps: usize) -> SVec {
        blockwise(v, self.target_counts[k], self.source_counts[k], comps, |b| self.pull(k, b))
    }

    /// Check injectivity and `ι∘∂ = ∂∘ι` on every cell.
    pub fn is_chain_map(&self, source: &CubicalComplex, target: &CubicalComplex) -> bool {
        for k in 0..self.maps.len() {
            let mut seen = HashSet::new();
            if !self.maps[k].iter().all(|&t| seen.insert(t)) {
                return false;
            }
        }
        for k in 1..=source.dim() {
            for i in 0..source.count(k) {
                let img: SVec = self.push(k - 1, &SVec::from_pairs(source.faces(k, i).into_iter().map(|(j, s)| (j, Q::int(s)))));
                let t = self.maps[k][i];
                let tb = SVec::from_pairs(target.faces(k, t).into_iter().map(|(j, s)| (j, Q::int(s * self.signs[k][i] as i64))));
                if img != tb {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_counts() {
        let x = CubicalComplex::product(&[Factor::Cycle(4)]).unwrap();
        assert_eq!(x.counts(), vec![4, 4]);
        assert_eq!(x.euler_characteristic(), 0);
    }

    #[test]
    fn time_cycle_counts() {
        let x = CubicalComplex::product(&[Factor::Time(3), Factor::Cycle(4)]).unwrap();
        assert_eq!(x.counts(), vec![12, 20, 8]);
        assert_eq!(x.euler_characteristic(), 0);
        assert!(x.boundary_squares_to_zero());
    }

    #[test]
    fn block_is_contractible() {
        let x = CubicalComplex::product(&[Factor::Time(3), Factor::Path(3), Factor::Path(3)]).unwrap();
        assert_eq!(x.euler_characteristic(), 1);
        assert!(x.boundary_squares_to_zero());
        assert!(x.margin_is_face_closed());
    }

    #[test]
    fn small_factor_rejected() {
        assert!(matches!(CubicalComplex::product(&[Factor::Cycle(2)]), Err(ModelError::BadFactor(_))));
    }

    #[test]
    fn factor_parsing() {
        assert_eq!("TIME(8)".parse::<Factor>().unwrap(), Factor::Time(8));
        assert_eq!(" cycle( 5 ) ".parse::<Factor>().unwrap(), Factor::Cycle(5));
        assert!("BALL(3)".parse::<Factor>().is_err());
    }

    #[test]
    fn vertex_coboundary_on_cycle() {
        let x = CubicalComplex::product(&[Factor::Cycle(4)]).unwrap();
        let v = x.index_of(&Cell::vertex(&[2])).unwrap();
        let dv = x.d_apply(0, &SVec::unit(v)).unwrap();
        assert_eq!(dv.nnz(), 2);
        let into = x.index_of(&Cell::new(&[(true, 1)])).unwrap();
        let out = x.index_of(&Cell::new(&[(true, 2)])).unwrap();
        assert_eq!(dv.get(into), Q::one());
        assert_eq!(dv.get(out), -Q::one());
        let constant = SVec::from_pairs((0..4).map(|i| (i, Q::one())));
        assert!(x.d_apply(0, &constant).unwrap().is_zero());
    }

    #[test]
    fn top_degree_has_no_d() {
        let x = CubicalComplex::product(&[Factor::Cycle(4)]).unwrap();
        assert!(matches!(Cochain::zero(1, 1).d(&x), Err(ModelError::TopDegree(1))));
    }

    #[test]
    fn support_modes_on_cycle_slab() {
        let x = CubicalComplex::product(&[Factor::Time(5), Factor::Cycle(4)]).unwrap();
        for k in 0..=2 {
            let temporal = (0..x.count(k)).filter(|&i| x.is_temporal_margin(k, i)).count();
            assert_eq!(x.count(k) - x.relative_subspace(k, Support::Compact).dim(), temporal);
            assert_eq!(x.relative_subspace(k, Support::Full).dim(), x.count(k));
        }
    }

    #[test]
    fn slab_translation() {
        let s = CubicalComplex::product(&[Factor::Time(4), Factor::Cycle(6)]).unwrap();
        let t = CubicalComplex::product(&[Factor::Time(8), Factor::Cycle(6)]).unwrap();
        let e = SubcomplexEmbedding::translate(&s, &t, &[2, 0]).unwrap();
        for (i, c) in s.cells(0).iter().enumerate() {
            assert_eq!(t.cell(0, e.maps[0][i]).pos(0), c.pos(0) + 2);
        }
        assert!(e.is_chain_map(&s, &t));
        assert!(SubcomplexEmbedding::translate(&s, &t, &[5, 0]).is_err());
    }
}
