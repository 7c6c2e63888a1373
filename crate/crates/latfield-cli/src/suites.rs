//! The property suites. Each suite records asserted identities, measurements
//! and negative controls; a model error stops the suite and counts as a failure.

use exactla::{QPi, RatMatrix, SVec, Q};
use latfield::complex::{Cell, CubicalComplex, Factor};
use latfield::functor::{
    ccr_map, check_causality, check_locality, check_timeslice, charge_naturality, cross_gram, curvature_witness, phsp_map,
    tau_mismatch, Ccr, CcrElement, Cq,
};
use latfield::gauge::{integral_h1_generators, Connection, PiCochain};
use latfield::green::check_identities;
use latfield::phasespace::{Model, Observable, Variant};
use latfield::ModelError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Check, SuiteSpec};
use crate::inspect::cell_label;
use crate::report::{count, flag, ratio, Recorder, SuiteReport};
use crate::workspace::Workspace;

type Outcome = Result<(), ModelError>;

/// Run one suite against the shared workspace.
pub fn run_suite(ws: &Workspace, spec: &SuiteSpec, seed: u64) -> SuiteReport {
    let mut rec = Recorder::new(&spec.id, spec.check.name(), seed);
    let result = match &spec.check {
        Check::GaugeInvariance { objects } => gauge_invariance(ws, &mut rec, objects),
        Check::Sandwich { objects } => sandwich(ws, &mut rec, objects),
        Check::Radical { objects, variants, asserted } => radical(ws, &mut rec, objects, variants, *asserted),
        Check::RadicalWitness { objects, compact_slices } => radical_witness(ws, &mut rec, objects, compact_slices),
        Check::Separation { object, control } => separation(ws, &mut rec, object, control),
        Check::Green { objects, samples } => green(ws, &mut rec, objects, *samples, seed),
        Check::Causality { first, second, control } => causality(ws, &mut rec, first, second, control.as_ref()),
        Check::Timeslice { morphisms, controls } => timeslice(ws, &mut rec, morphisms, controls),
        Check::Locality { morphism } => locality(ws, &mut rec, morphism),
        Check::Functoriality { first, second } => functoriality(ws, &mut rec, first, second),
        Check::Charges { objects } => charges(ws, &mut rec, objects),
        Check::Naturality { morphisms } => naturality(ws, &mut rec, morphisms),
        Check::Ccr { object, morphism, disjoint, samples } => ccr(ws, &mut rec, object, morphism.as_deref(), disjoint.as_ref(), *samples, seed),
    };
    if let Err(e) = result {
        rec.error(&spec.id, e.to_string());
    }
    rec.finish()
}

const VARIANTS: [Variant; 2] = [Variant::Standard, Variant::ChargeZero];

fn space_name(v: Variant) -> &'static str {
    match v {
        Variant::Standard => "E",
        Variant::ChargeZero => "E0",
    }
}

/// Charge-zero spaces are built only for purely toroidal groups.
fn has_variant(m: &Model, v: Variant) -> bool {
    v == Variant::Standard || m.obj.group.real == 0
}

/// Sparse cochain as `[[cell, "p/q"], ...]`.
fn cochain_json(x: &CubicalComplex, k: usize, v: &SVec) -> Value {
    let n = x.count(k);
    Value::Array(v.iter().map(|(i, q)| json!([format!("{}#{}", cell_label(x, k, i % n), i / n), ratio(q)])).collect())
}

fn coords_json(v: &SVec) -> Value {
    Value::Array(v.iter().map(|(i, q)| json!([i, ratio(q)])).collect())
}

fn gauge_invariance(ws: &Workspace, rec: &mut Recorder, objects: &[String]) -> Outcome {
    for id in objects {
        let m = ws.model(id)?;
        let direct = m.einv_direct()?;
        let theorem = m.einv_theorem()?;
        rec.measure(id, "einv_direct_dim", count(direct.dim()));
        rec.measure(id, "einv_theorem_dim", count(theorem.dim()));
        rec.assert(id, "einv_direct_equals_theorem", direct == theorem, flag(direct == theorem));
        let x = &m.obj.complex;
        let n1 = m.n1();
        let mut coclosed = true;
        let mut compact = true;
        for v in theorem.basis() {
            coclosed &= m.obj.delta(1, v)?.is_zero();
            compact &= v.indices().all(|i| !x.is_margin(1, i % n1));
        }
        rec.assert(id, "einv_coclosed", coclosed, flag(coclosed));
        rec.assert(id, "einv_compact", compact, flag(compact));
    }
    Ok(())
}

fn sandwich(ws: &Workspace, rec: &mut Recorder, objects: &[String]) -> Outcome {
    for id in objects {
        let m = ws.model(id)?;
        let (emin, einv, emax) = (m.emin()?, m.einv_theorem()?, m.emax()?);
        for (name, space) in [("emin_dim", &emin), ("einv_dim", &einv), ("emax_dim", &emax)] {
            rec.measure(id, name, count(space.dim()));
        }
        let lower = einv.contains_subspace(&emin);
        let upper = emax.contains_subspace(&einv);
        rec.assert(id, "emin_in_einv", lower, flag(lower));
        rec.assert(id, "einv_in_emax", upper, flag(upper));
        // Each torus component contributes one direction per class of H¹.
        let b1 = latfield::homology::betti_numbers(&m.obj.complex, latfield::complex::Support::Full)[1];
        let expected = m.obj.group.torus * b1;
        let gap = emax.dim() - einv.dim();
        rec.measure(id, "expected_gap", count(expected));
        rec.assert(id, "emax_minus_einv", gap == expected, count(gap));
    }
    Ok(())
}

fn radical(ws: &Workspace, rec: &mut Recorder, objects: &[String], variants: &[Variant], asserted: bool) -> Outcome {
    for id in objects {
        let m = ws.model(id)?;
        for &v in variants.iter().filter(|&&v| has_variant(m, v)) {
            let ps = ws.phase_space(id, v)?;
            let s = space_name(v);
            let q = ps.quotient.dim();
            let brute = ps.radical(m)?;
            let theorem = m.radical_theorem(ps)?;
            rec.measure(id, &format!("{s}.dim"), count(ps.dim()));
            rec.measure(id, &format!("{s}.radical_brute_dim"), count(brute.dim() - q));
            rec.measure(id, &format!("{s}.radical_theorem_dim"), count(theorem.dim() - q));
            let skew = ps.gram_is_skew(m)?;
            rec.assert(id, &format!("{s}.gram_skew"), skew, flag(skew));
            let contained = brute.contains_subspace(&theorem);
            rec.assert(id, &format!("{s}.theorem_in_brute"), contained, flag(contained));
            let equal = brute == theorem;
            let quantity = format!("{s}.radical_brute_equals_theorem");
            if asserted {
                rec.assert(id, &quantity, equal, flag(equal));
            } else {
                rec.measure(id, &quantity, flag(equal));
            }
        }
    }
    Ok(())
}

fn radical_witness(ws: &Workspace, rec: &mut Recorder, objects: &[String], compact_slices: &[String]) -> Outcome {
    for id in objects {
        let m = ws.model(id)?;
        let Some(eta) = curvature_witness(m)? else {
            rec.assert(id, "witness_exists", false, flag(false));
            continue;
        };
        rec.assert(id, "witness_exists", true, flag(true));
        let ps = ws.phase_space(id, Variant::Standard)?;
        let psi = m.curvature_dual(&eta)?;
        rec.measure(id, "witness_constant/pi", ratio(&psi.constant.pi));
        let invariant = ps.einv.contains(&psi.alpha);
        rec.assert(id, "witness_gauge_invariant", invariant, flag(invariant));
        let central = ps.gram_row(m, &psi.alpha)?.iter().all(Q::is_zero);
        rec.assert(id, "witness_in_brute_radical", central, flag(central));
        let predicted = m.real_radical().contains(&psi.alpha);
        rec.assert(id, "witness_in_theorem_radical", predicted, flag(predicted));
        let nontrivial = !ps.is_zero_class(&psi.alpha);
        rec.assert(id, "witness_has_no_zero_linear_part_representative", nontrivial, flag(nontrivial));
        rec.witness(&format!("{id}.eta"), cochain_json(&m.obj.complex, 2, &eta));
    }
    for id in compact_slices {
        let m = ws.model(id)?;
        let all = m.maxwell_image().contains_subspace(m.real_radical());
        rec.measure(id, "real_radical_dim", count(m.real_radical().dim()));
        rec.assert(id, "radical_classes_have_zero_linear_part_representatives", all, flag(all));
    }
    Ok(())
}

/// Flat connection `π z` with `z` the first integral generator of `H¹`.
fn half_period_connection(m: &Model) -> Result<(SVec, Connection), ModelError> {
    let z = integral_h1_generators(&m.obj.complex)?
        .into_iter()
        .next()
        .ok_or_else(|| ModelError::Config(format!("object {:?} has no noncontractible loop", m.obj.id())))?;
    Ok((z.clone(), Connection { a: PiCochain::from_pi(z) }))
}

fn separation(ws: &Workspace, rec: &mut Recorder, object: &str, control: &str) -> Outcome {
    for (id, is_control) in [(object, false), (control, true)] {
        let m = ws.model(id)?;
        let (z, flat) = half_period_connection(m)?;
        let closed = m.obj.complex.dim() < 2 || m.obj.complex.d_apply(1, &z)?.is_zero();
        rec.assert(id, "connection_is_flat", closed, flag(closed));
        let reference = Connection::reference();
        let einv = m.einv_theorem()?;
        let differing = einv
            .basis()
            .iter()
            .filter(|alpha| {
                let o = Observable::linear((*alpha).clone());
                o.evaluate(&m.obj, &flat) != o.evaluate(&m.obj, &reference)
            })
            .count();
        rec.measure(id, "einv_basis_size", count(einv.dim()));
        if is_control {
            rec.control(id, "basis_elements_separating", differing > 0, count(differing));
        } else {
            rec.assert(id, "basis_elements_separating", differing == 0, count(differing));
        }
    }
    Ok(())
}

fn green(ws: &Workspace, rec: &mut Recorder, objects: &[String], samples: usize, seed: u64) -> Outcome {
    for id in objects {
        let obj = &ws.model(id)?.obj;
        let tallies = check_identities(&obj.complex, &obj.ops, &obj.green, samples, seed)?;
        rec.measure(id, "samples", count(samples));
        for t in tallies {
            rec.assert(id, &format!("{}.checked", t.identity), t.passes(), count(t.checked));
            if let Some(w) = &t.first_failure {
                rec.witness(&format!("{id}.{}", t.identity), json!(w));
            }
        }
    }
    Ok(())
}

fn causality(ws: &Workspace, rec: &mut Recorder, first: &str, second: &str, control: Option<&[String; 2]>) -> Outcome {
    let label = format!("{first}&{second}");
    let (f1, f2) = (ws.morphism(first)?, ws.morphism(second)?);
    if f1.target != f2.target {
        return Err(ModelError::Config(format!("{first} and {second} have different targets")));
    }
    let (m1, m2, mt) = (ws.model(&f1.source)?, ws.model(&f2.source)?, ws.model(&f1.target)?);
    let (p1, p2) = (ws.phase_space(&f1.source, Variant::Standard)?, ws.phase_space(&f2.source, Variant::Standard)?);
    match check_causality(f1, m1, p1, f2, m2, p2, mt) {
        Ok(r) => {
            rec.measure(&label, "first_dim", count(r.dims.0));
            rec.measure(&label, "second_dim", count(r.dims.1));
            rec.measure(&label, "cross_entries", count(r.entries));
            rec.assert(&label, "nonzero_cross_entries", r.passes(), count(r.nonzero.len()));
            if let Some((i, j, q)) = r.nonzero.first() {
                rec.witness("first_nonzero_entry", json!([i, j, ratio(q)]));
            }
        }
        Err(ModelError::NotDisjoint(w)) => {
            rec.assert(&label, "causally_disjoint", false, w);
        }
        Err(e) => return Err(e),
    }
    if let Some([c1, c2]) = control {
        let label = format!("{c1}&{c2}");
        let (g1, g2) = (ws.morphism(c1)?, ws.morphism(c2)?);
        let (n1, n2, nt) = (ws.model(&g1.source)?, ws.model(&g2.source)?, ws.model(&g1.target)?);
        let (q1, q2) = (ws.phase_space(&g1.source, Variant::Standard)?, ws.phase_space(&g2.source, Variant::Standard)?);
        let rejected = matches!(check_causality(g1, n1, q1, g2, n2, q2, nt), Err(ModelError::NotDisjoint(_)));
        rec.control(&label, "related_pair_rejected", rejected, flag(rejected));
        let raw = cross_gram(g1, q1, g2, q2, nt)?;
        rec.control(&label, "nonzero_cross_entries", !raw.nonzero.is_empty(), count(raw.nonzero.len()));
        if let Some((i, j, q)) = raw.nonzero.first() {
            rec.witness("control_nonzero_entry", json!([i, j, ratio(q)]));
        }
    }
    Ok(())
}

fn timeslice(ws: &Workspace, rec: &mut Recorder, morphisms: &[String], controls: &[String]) -> Outcome {
    for (id, is_control) in morphisms.iter().map(|m| (m, false)).chain(controls.iter().map(|m| (m, true))) {
        let f = ws.morphism(id)?;
        let (m1, m2) = (ws.model(&f.source)?, ws.model(&f.target)?);
        for v in VARIANTS.into_iter().filter(|&v| has_variant(m1, v)) {
            if is_control && v == Variant::ChargeZero {
                continue;
            }
            let (p1, p2) = (ws.phase_space(&f.source, v)?, ws.phase_space(&f.target, v)?);
            let r = check_timeslice(f, p1, p2)?;
            let s = space_name(v);
            rec.measure(id, &format!("{s}.source_dim"), count(r.dim_source));
            rec.measure(id, &format!("{s}.target_dim"), count(r.dim_target));
            if is_control {
                rec.control(id, &format!("{s}.rank"), !r.is_isomorphism(), count(r.rank));
                continue;
            }
            rec.assert(id, &format!("{s}.rank"), r.is_isomorphism(), count(r.rank));
            let mismatch = tau_mismatch(f, m1, p1, m2)?;
            rec.assert(id, &format!("{s}.tau_preserved"), mismatch.is_none(), flag(mismatch.is_none()));
        }
    }
    Ok(())
}

fn locality(ws: &Workspace, rec: &mut Recorder, id: &str) -> Outcome {
    let f = ws.morphism(id)?;
    let m1 = ws.model(&f.source)?;
    for v in VARIANTS.into_iter().filter(|&v| has_variant(m1, v)) {
        let (p1, p2) = (ws.phase_space(&f.source, v)?, ws.phase_space(&f.target, v)?);
        let r = check_locality(f, m1, p1, p2)?;
        let s = space_name(v);
        rec.measure(id, &format!("{s}.source_dim"), count(r.ranks.dim_source));
        rec.measure(id, &format!("{s}.target_dim"), count(r.ranks.dim_target));
        let kernel = r.ranks.kernel_dim;
        match v {
            Variant::Standard => {
                rec.assert(id, "E.kernel_dim_positive", kernel >= 1, count(kernel));
                let witnessed = r.witness_in_kernel == Some(true);
                rec.assert(id, "E.curvature_witness_in_kernel", witnessed, flag(witnessed));
                let k = phsp_map(f, p1, p2)?.kernel();
                rec.witness("E.kernel", Value::Array(k.basis().iter().map(coords_json).collect()));
            }
            Variant::ChargeZero => {
                rec.assert(id, "E0.kernel_dim_zero", kernel == 0, count(kernel));
            }
        }
    }
    Ok(())
}

fn functoriality(ws: &Workspace, rec: &mut Recorder, first: &str, second: &str) -> Outcome {
    let (a, b) = (ws.morphism(first)?, ws.morphism(second)?);
    if a.target != b.source {
        return Err(ModelError::Config(format!("{first} does not end where {second} starts")));
    }
    let label = format!("{first}&{second}");
    let (m1, m2, m3) = (ws.model(&a.source)?, ws.model(&a.target)?, ws.model(&b.target)?);
    let ab = a.then(b);
    let identity = latfield::functor::Morphism::identity(&m2.obj)?;
    for v in VARIANTS.into_iter().filter(|&v| has_variant(m1, v)) {
        let s = space_name(v);
        let (p1, p2, p3) = (ws.phase_space(&a.source, v)?, ws.phase_space(&a.target, v)?, ws.phase_space(&b.target, v)?);
        let composed = phsp_map(&ab, p1, p3)?;
        let stepwise = phsp_map(b, p2, p3)?.after(&phsp_map(a, p1, p2)?)?;
        let same = composed.matrix == stepwise.matrix;
        rec.assert(&label, &format!("{s}.composition"), same, flag(same));
        let id_map = phsp_map(&identity, p2, p2)?;
        let is_id = id_map.matrix == RatMatrix::identity(p2.dim());
        rec.assert(&a.target, &format!("{s}.identity"), is_id, flag(is_id));
        for (name, f, src, ps, tgt) in [(first, a, m1, p1, m2), (second, b, m2, p2, m3), (label.as_str(), &ab, m1, p1, m3)] {
            let ok = tau_mismatch(f, src, ps, tgt)?.is_none();
            rec.assert(name, &format!("{s}.tau_preserved"), ok, flag(ok));
        }
    }
    Ok(())
}

/// Middle time slice of an object.
fn middle_time(x: &CubicalComplex) -> usize {
    x.factors()[0].n() / 2
}

/// Spatial `k`-cycles spanned by `k` cycle factors at time `t`, labelled by the factor indices.
pub fn spatial_cycles(x: &CubicalComplex, k: usize, t: usize) -> Vec<(String, SVec)> {
    let cyclic: Vec<usize> = (1..x.nfactors()).filter(|&i| matches!(x.factors()[i], Factor::Cycle(_))).collect();
    let mut out = Vec::new();
    for subset in subsets(&cyclic, k) {
        let base: Vec<(bool, usize)> = x
            .factors()
            .iter()
            .enumerate()
            .map(|(i, f)| match f {
                _ if i == 0 => (false, t),
                Factor::Path(n) => (false, n / 2),
                _ => (false, 0),
            })
            .collect();
        let mut cells = vec![base];
        for &i in &subset {
            let n = x.factors()[i].edges();
            cells = cells.into_iter().flat_map(|c| (0..n).map(move |p| { let mut c = c.clone(); c[i] = (true, p); c })).collect();
        }
        let sigma = SVec::from_pairs(cells.iter().map(|c| (x.index_of(&Cell::new(c)).expect("cell of the product"), Q::one())));
        let label = subset.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("x");
        out.push((if label.is_empty() { "point".into() } else { label }, sigma));
    }
    out
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out: Vec<Vec<usize>> = subsets(&items[1..], k - 1).into_iter().map(|mut s| { s.insert(0, items[0]); s }).collect();
    out.extend(subsets(&items[1..], k));
    out
}

fn charges(ws: &Workspace, rec: &mut Recorder, objects: &[String]) -> Outcome {
    for id in objects {
        let m = ws.model(id)?;
        let x = &m.obj.complex;
        let t = middle_time(x);
        let ps = ws.phase_space(id, Variant::Standard)?;
        let ps0 = if has_variant(m, Variant::ChargeZero) { Some(ws.phase_space(id, Variant::ChargeZero)?) } else { None };
        for a in 0..m.components() {
            for (label, sigma) in spatial_cycles(x, 2, t) {
                let o = m.charge_mag(&sigma, a)?;
                let n: i64 = m
                    .obj
                    .spec
                    .flux
                    .iter()
                    .filter(|f| f.component == a && format!("{}x{}", f.plane[0].min(f.plane[1]), f.plane[0].max(f.plane[1])) == label)
                    .map(|f| f.n)
                    .sum();
                let expected = QPi::pi_times(Q::int(2 * n));
                let ok = o.alpha.is_zero() && o.constant == expected;
                rec.measure(id, &format!("psi_mag[{a}][{label}].expected/pi"), ratio(&expected.pi));
                rec.assert(id, &format!("psi_mag[{a}][{label}]/pi"), ok, ratio(&o.constant.pi));
                let central = ps.gram_row(m, &o.alpha)?.iter().all(Q::is_zero);
                rec.assert(id, &format!("psi_mag[{a}][{label}].central"), central, flag(central));
            }
            for (label, sigma) in spatial_cycles(x, x.dim() - 2, t) {
                let o = m.charge_el(&sigma, a)?;
                let central = ps.gram_row(m, &o.alpha)?.iter().all(Q::is_zero);
                rec.assert(id, &format!("psi_el[{a}][{label}].central"), central, flag(central));
                rec.measure(id, &format!("psi_el[{a}][{label}].nonzero_in_E"), flag(!ps.is_zero_class(&o.alpha)));
                if let Some(ps0) = ps0 {
                    let vanishes = ps0.is_zero_class(&o.alpha) && o.constant == QPi::zero();
                    rec.assert(id, &format!("psi_el[{a}][{label}].vanishes_in_E0"), vanishes, flag(vanishes));
                }
            }
        }
    }
    Ok(())
}

fn naturality(ws: &Workspace, rec: &mut Recorder, morphisms: &[String]) -> Outcome {
    for id in morphisms {
        let f = ws.morphism(id)?;
        let (m1, m2) = (ws.model(&f.source)?, ws.model(&f.target)?);
        let ps2 = ws.phase_space(&f.target, Variant::Standard)?;
        let x = &m1.obj.complex;
        let t = middle_time(x);
        let (mag, el) = (spatial_cycles(x, 2, t), spatial_cycles(x, x.dim() - 2, t));
        let mag_chains: Vec<SVec> = mag.iter().map(|(_, s)| s.clone()).collect();
        let el_chains: Vec<SVec> = el.iter().map(|(_, s)| s.clone()).collect();
        for a in 0..m1.components() {
            let r = charge_naturality(f, m1, m2, ps2, &mag_chains, &el_chains, a)?;
            for ((label, _), ok) in mag.iter().zip(&r.magnetic) {
                rec.assert(id, &format!("psi_mag[{a}][{label}].square_commutes"), *ok, flag(*ok));
            }
            for ((label, _), ok) in el.iter().zip(&r.electric) {
                rec.assert(id, &format!("psi_el[{a}][{label}].square_commutes"), *ok, flag(*ok));
            }
        }
    }
    Ok(())
}

fn random_element(rng: &mut ChaCha8Rng, a: &Ccr) -> CcrElement {
    let mut e = CcrElement::zero();
    for _ in 0..rng.gen_range(1..4) {
        let w: Vec<usize> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..a.dim())).collect();
        let c = Cq::new(Q::int(rng.gen_range(-3..=3)), Q::int(rng.gen_range(-2..=2)));
        e = e.add(&a.word(&w, c));
    }
    e
}

fn ccr(
    ws: &Workspace,
    rec: &mut Recorder,
    object: &str,
    morphism: Option<&str>,
    disjoint: Option<&[String; 2]>,
    samples: usize,
    seed: u64,
) -> Outcome {
    let m = ws.model(object)?;
    let alg = Ccr::of_phase_space(m, ws.phase_space(object, Variant::Standard)?)?;
    let n = alg.dim();
    let i = Cq::new(Q::zero(), Q::one());
    let relation_failures = (0..n)
        .flat_map(|p| (0..n).map(move |q| (p, q)))
        .filter(|&(p, q)| {
            alg.commutator(&alg.generator(p), &alg.generator(q)) != CcrElement::scalar(i.clone() * Cq::new(alg.tau[p][q].clone(), Q::zero()))
        })
        .count();
    rec.measure(object, "generators", count(n));
    rec.assert(object, "defining_relation_failures", relation_failures == 0, count(relation_failures));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut assoc, mut anti, mut invol) = (0, 0, 0);
    for _ in 0..samples {
        let (x, y, z) = (random_element(&mut rng, &alg), random_element(&mut rng, &alg), random_element(&mut rng, &alg));
        assoc += (alg.multiply(&alg.multiply(&x, &y), &z) != alg.multiply(&x, &alg.multiply(&y, &z))) as usize;
        anti += (alg.star(&alg.multiply(&x, &y)) != alg.multiply(&alg.star(&y), &alg.star(&x))) as usize;
        invol += (alg.star(&alg.star(&x)) != x) as usize;
    }
    rec.measure(object, "random_triples", count(samples));
    rec.assert(object, "associativity_failures", assoc == 0, count(assoc));
    rec.assert(object, "star_antimultiplicative_failures", anti == 0, count(anti));
    rec.assert(object, "star_involution_failures", invol == 0, count(invol));
    if let Some(id) = morphism {
        let f = ws.morphism(id)?;
        let (m1, m2) = (ws.model(&f.source)?, ws.model(&f.target)?);
        let (p1, p2) = (ws.phase_space(&f.source, Variant::Standard)?, ws.phase_space(&f.target, Variant::Standard)?);
        let map = phsp_map(f, p1, p2)?;
        let (a1, a2) = (Ccr::of_phase_space(m1, p1)?, Ccr::of_phase_space(m2, p2)?);
        let unital = ccr_map(&map, &a2, &CcrElement::unit()) == CcrElement::unit();
        rec.assert(id, "unital", unital, flag(unital));
        let (mut mult, mut star) = (0, 0);
        for _ in 0..samples {
            let (x, y) = (random_element(&mut rng, &a1), random_element(&mut rng, &a1));
            let fx = ccr_map(&map, &a2, &x);
            mult += (ccr_map(&map, &a2, &a1.multiply(&x, &y)) != a2.multiply(&fx, &ccr_map(&map, &a2, &y))) as usize;
            star += (ccr_map(&map, &a2, &a1.star(&x)) != a2.star(&fx)) as usize;
        }
        rec.assert(id, "multiplicative_failures", mult == 0, count(mult));
        rec.assert(id, "star_preserving_failures", star == 0, count(star));
    }
    if let Some([first, second]) = disjoint {
        let label = format!("{first}&{second}");
        let (fa, fb) = (ws.morphism(first)?, ws.morphism(second)?);
        let target = ws.model(&fa.target)?;
        let (pa, pb) = (ws.phase_space(&fa.source, Variant::Standard)?, ws.phase_space(&fb.source, Variant::Standard)?);
        let images: Vec<SVec> =
            pa.reps.iter().map(|r| fa.push_alpha(r, pa.comps)).chain(pb.reps.iter().map(|r| fb.push_alpha(r, pb.comps))).collect();
        let propagated: Vec<SVec> = images.iter().map(|v| target.propagate(v)).collect::<Result<_, _>>()?;
        let tau: Vec<Vec<Q>> = images.iter().map(|u| propagated.iter().map(|gv| target.obj.pairing(1, u, gv)).collect()).collect();
        let joint = Ccr::from_tau(tau);
        let split = pa.reps.len();
        let gens = |r: std::ops::Range<usize>, s: std::ops::Range<usize>| -> Vec<(usize, usize)> {
            r.flat_map(|i| s.clone().map(move |j| (i, j))).collect()
        };
        let noncommuting = |pairs: Vec<(usize, usize)>| {
            pairs.into_iter().filter(|&(i, j)| !joint.commutator(&joint.generator(i), &joint.generator(j)).is_zero()).count()
        };
        let cross = noncommuting(gens(0..split, split..images.len()));
        rec.measure(&label, "cross_pairs", count(split * (images.len() - split)));
        rec.assert(&label, "noncommuting_cross_pairs", cross == 0, count(cross));
        let within = noncommuting(gens(0..split, 0..split));
        rec.control(&label, "noncommuting_pairs_within_first", within > 0, count(within));
    }
    Ok(())
}
