//! Morphisms, induced phase-space maps, structural checks and the CCR algebra.

use exactla::{RatMatrix, SVec, Q};
use latfield::complex::{Cell, ComplexSpec, Factor};
use latfield::functor::{
    ccr_map, check_causality, check_locality, check_timeslice, charge_naturality, cross_gram, curvature_witness, phsp_map,
    tau_mismatch, Ccr, CcrElement, Cq, Morphism,
};
use latfield::gauge::{FluxSpec, ObjectSpec, SpacetimeObject};
use latfield::phasespace::{Model, Observable, Variant};
use latfield::ModelError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(c: ComplexSpec, torus: usize, real: usize, flux: Vec<FluxSpec>) -> Model {
    let spec = ObjectSpec { id: format!("{:?}", c.factors), complex: c, torus, real, h: None, flux };
    Model::new(SpacetimeObject::new(spec).unwrap())
}

fn product(f: Vec<Factor>, torus: usize, real: usize) -> Model {
    model(ComplexSpec::product(f), torus, real, vec![])
}

fn boxed(host: &ComplexSpec, ranges: &[[usize; 2]], torus: usize, real: usize) -> Model {
    let mut s = host.clone();
    s.keep_box = Some(ranges.to_vec());
    model(s, torus, real, vec![])
}

fn flux_slab(t: usize, n: i64) -> Model {
    model(
        ComplexSpec::product(vec![Factor::Time(t), Factor::Cycle(4), Factor::Cycle(4)]),
        1,
        0,
        vec![FluxSpec { component: 0, plane: [1, 2], n }],
    )
}

#[test]
fn pushforward_basics() {
    let m1 = product(vec![Factor::Time(4), Factor::Cycle(5)], 0, 1);
    let m2 = product(vec![Factor::Time(7), Factor::Cycle(5)], 0, 1);
    let f = Morphism::translate(&m1.obj, &m2.obj, &[2, 0]).unwrap();
    assert_eq!(f.pushforward(&Observable::zero(), 1), Observable::zero());
    let id = Morphism::identity(&m1.obj).unwrap();
    let o = Observable::linear(SVec::from_pairs([(3, Q::int(2)), (7, Q::frac(-1, 3))]));
    assert_eq!(id.pushforward(&o, 1), o);
    // Restricting the pushforward recovers the observable.
    let pushed = f.pushforward(&o, 1);
    assert_eq!(f.embedding.pull_components(1, &pushed.alpha, 1), o.alpha);
    // Gauge invariance is preserved.
    let einv2 = m2.einv_theorem().unwrap();
    for v in m1.einv_theorem().unwrap().basis() {
        assert!(einv2.contains(&f.push_alpha(v, 1)));
    }
}

#[test]
fn morphism_validation() {
    let a = product(vec![Factor::Time(4), Factor::Cycle(5)], 1, 0);
    let b = product(vec![Factor::Time(6), Factor::Cycle(5)], 0, 1);
    assert!(matches!(Morphism::translate(&a.obj, &b.obj, &[1, 0]), Err(ModelError::Config(_))));
    let host = ComplexSpec::product(vec![Factor::Time(7), Factor::Path(9)]);
    let mut hole = host.clone();
    hole.remove_box = Some(vec![[2, 4], [3, 5]]);
    let h = model(hole, 0, 1, vec![]);
    let t = model(host, 0, 1, vec![]);
    assert!(matches!(Morphism::inclusion(&h.obj, &t.obj), Err(ModelError::NotCausallyCompatible(_))));
    // Flux mismatch: the source has no flux, the target has one.
    let plain = product(vec![Factor::Time(4), Factor::Cycle(4), Factor::Cycle(4)], 1, 0);
    assert!(matches!(Morphism::translate(&plain.obj, &flux_slab(5, 1).obj, &[1, 0, 0]), Err(ModelError::Config(_))));
}

#[test]
fn functoriality_and_tau_preservation() {
    let f = |t| vec![Factor::Time(t), Factor::Cycle(4), Factor::Cycle(3)];
    let (m1, m2, m3) = (product(f(4), 0, 1), product(f(5), 0, 1), product(f(6), 0, 1));
    let a = Morphism::translate(&m1.obj, &m2.obj, &[1, 0, 0]).unwrap();
    let b = Morphism::translate(&m2.obj, &m3.obj, &[0, 0, 0]).unwrap();
    for v in [Variant::Standard, Variant::ChargeZero] {
        let (p1, p2, p3) = (m1.phase_space(v).unwrap(), m2.phase_space(v).unwrap(), m3.phase_space(v).unwrap());
        let composed = phsp_map(&a.then(&b), &p1, &p3).unwrap();
        let stepwise = phsp_map(&b, &p2, &p3).unwrap().after(&phsp_map(&a, &p1, &p2).unwrap()).unwrap();
        assert_eq!(composed.matrix, stepwise.matrix);
        let id = phsp_map(&Morphism::identity(&m2.obj).unwrap(), &p2, &p2).unwrap();
        assert_eq!(id.matrix, RatMatrix::identity(p2.dim()));
        assert_eq!(tau_mismatch(&a, &m1, &p1, &m2).unwrap(), None);
        assert_eq!(tau_mismatch(&a.then(&b), &m1, &p1, &m3).unwrap(), None);
    }
}

#[test]
fn slab_embeddings_are_isomorphisms() {
    for (torus, real) in [(1, 0), (0, 1)] {
        let m1 = product(vec![Factor::Time(5), Factor::Cycle(7)], torus, real);
        let m2 = product(vec![Factor::Time(9), Factor::Cycle(7)], torus, real);
        let f = Morphism::translate(&m1.obj, &m2.obj, &[2, 0]).unwrap();
        for v in [Variant::Standard, Variant::ChargeZero] {
            assert!(check_timeslice(&f, &m1.phase_space(v).unwrap(), &m2.phase_space(v).unwrap()).unwrap().is_isomorphism());
        }
    }
    let m1 = flux_slab(4, 1);
    let m2 = flux_slab(6, 1);
    let f = Morphism::translate(&m1.obj, &m2.obj, &[1, 0, 0]).unwrap();
    for v in [Variant::Standard, Variant::ChargeZero] {
        let r = check_timeslice(&f, &m1.phase_space(v).unwrap(), &m2.phase_space(v).unwrap()).unwrap();
        assert!(r.is_isomorphism(), "{v:?} {r:?}");
    }
}

#[test]
fn causality_for_separated_blocks_and_negative_control() {
    let host = ComplexSpec::product(vec![Factor::Time(6), Factor::Cycle(12), Factor::Cycle(3)]);
    let target = model(host.clone(), 0, 1, vec![]);
    let run = |r1: &[[usize; 2]], r2: &[[usize; 2]]| {
        let (a, b) = (boxed(&host, r1, 0, 1), boxed(&host, r2, 0, 1));
        let (fa, fb) = (Morphism::inclusion(&a.obj, &target.obj).unwrap(), Morphism::inclusion(&b.obj, &target.obj).unwrap());
        let (pa, pb) = (a.phase_space(Variant::Standard).unwrap(), b.phase_space(Variant::Standard).unwrap());
        (check_causality(&fa, &a, &pa, &fb, &b, &pb, &target), cross_gram(&fa, &pa, &fb, &pb, &target).unwrap())
    };
    let (checked, _) = run(&[[1, 4], [0, 4], [0, 2]], &[[1, 4], [6, 10], [0, 2]]);
    let report = checked.unwrap();
    assert!(report.entries > 100 && report.passes());
    let (checked, raw) = run(&[[0, 3], [0, 4], [0, 2]], &[[2, 5], [0, 4], [0, 2]]);
    assert!(matches!(checked, Err(ModelError::NotDisjoint(_))));
    assert!(!raw.nonzero.is_empty());
}

#[test]
fn locality_fails_for_e_and_holds_for_e0() {
    let host = ComplexSpec::product(vec![Factor::Time(9), Factor::Path(11), Factor::Path(11)]);
    let mut cone = host.clone();
    cone.remove_cone = Some(vec![4, 5, 5]);
    let (m1, m2) = (model(cone, 1, 0, vec![]), model(host, 1, 0, vec![]));
    let f = Morphism::inclusion(&m1.obj, &m2.obj).unwrap();
    assert!(curvature_witness(&m1).unwrap().is_some());
    let e = check_locality(&f, &m1, &m1.phase_space(Variant::Standard).unwrap(), &m2.phase_space(Variant::Standard).unwrap()).unwrap();
    assert_eq!(e.ranks.kernel_dim, 1);
    assert_eq!(e.witness_in_kernel, Some(true));
    let e0 = check_locality(&f, &m1, &m1.phase_space(Variant::ChargeZero).unwrap(), &m2.phase_space(Variant::ChargeZero).unwrap()).unwrap();
    assert_eq!(e0.ranks.kernel_dim, 0);
}

fn cell(m: &Model, parts: &[(bool, usize)]) -> usize {
    m.obj.complex.index_of(&Cell::new(parts)).unwrap()
}

#[test]
fn charge_maps_are_natural() {
    for n in [1, 2] {
        let (m1, m2) = (flux_slab(4, n), flux_slab(6, n));
        let f = Morphism::translate(&m1.obj, &m2.obj, &[1, 0, 0]).unwrap();
        let torus = SVec::from_pairs((0..16).map(|i| (cell(&m1, &[(false, 2), (true, i / 4), (true, i % 4)]), Q::one())));
        let loops: Vec<SVec> = (1..3)
            .map(|axis| {
                SVec::from_pairs((0..4).map(|p| {
                    let mut parts = vec![(false, 2), (false, 0), (false, 0)];
                    parts[axis] = (true, p);
                    (cell(&m1, &parts), Q::one())
                }))
            })
            .collect();
        let ps2 = m2.phase_space(Variant::Standard).unwrap();
        let report = charge_naturality(&f, &m1, &m2, &ps2, &[torus], &loops, 0).unwrap();
        assert!(report.passes(), "{report:?}");
    }
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

#[test]
fn ccr_algebra_laws() {
    let m = flux_slab(4, 1);
    let ps = m.phase_space(Variant::Standard).unwrap();
    let a = Ccr::of_phase_space(&m, &ps).unwrap();
    let n = a.dim();
    let i = Cq::new(Q::zero(), Q::one());
    for p in 0..n.min(12) {
        for q in 0..n.min(12) {
            let lhs = a.commutator(&a.generator(p), &a.generator(q));
            assert_eq!(lhs, CcrElement::scalar(i.clone() * Cq::new(a.tau[p][q].clone(), Q::zero())));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let (x, y, z) = (random_element(&mut rng, &a), random_element(&mut rng, &a), random_element(&mut rng, &a));
        assert_eq!(a.multiply(&a.multiply(&x, &y), &z), a.multiply(&x, &a.multiply(&y, &z)));
        assert_eq!(a.star(&a.multiply(&x, &y)), a.multiply(&a.star(&y), &a.star(&x)));
        assert_eq!(a.star(&a.star(&x)), x);
    }
}

#[test]
fn induced_algebra_maps_are_star_homomorphisms() {
    let (m1, m2) = (flux_slab(4, 1), flux_slab(6, 1));
    let f = Morphism::translate(&m1.obj, &m2.obj, &[1, 0, 0]).unwrap();
    let (p1, p2) = (m1.phase_space(Variant::Standard).unwrap(), m2.phase_space(Variant::Standard).unwrap());
    let map = phsp_map(&f, &p1, &p2).unwrap();
    let (a1, a2) = (Ccr::of_phase_space(&m1, &p1).unwrap(), Ccr::of_phase_space(&m2, &p2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    assert_eq!(ccr_map(&map, &a2, &CcrElement::unit()), CcrElement::unit());
    for _ in 0..20 {
        let (x, y) = (random_element(&mut rng, &a1), random_element(&mut rng, &a1));
        let fx = ccr_map(&map, &a2, &x);
        assert_eq!(ccr_map(&map, &a2, &a1.multiply(&x, &y)), a2.multiply(&fx, &ccr_map(&map, &a2, &y)));
        assert_eq!(ccr_map(&map, &a2, &a1.star(&x)), a2.star(&fx));
    }
}

#[test]
fn disjoint_generators_commute() {
    let host = ComplexSpec::product(vec![Factor::Time(6), Factor::Cycle(12), Factor::Cycle(3)]);
    let target = model(host.clone(), 0, 1, vec![]);
    let (a, b) = (boxed(&host, &[[1, 4], [0, 4], [0, 2]], 0, 1), boxed(&host, &[[1, 4], [6, 10], [0, 2]], 0, 1));
    let (fa, fb) = (Morphism::inclusion(&a.obj, &target.obj).unwrap(), Morphism::inclusion(&b.obj, &target.obj).unwrap());
    let (pa, pb) = (a.phase_space(Variant::Standard).unwrap(), b.phase_space(Variant::Standard).unwrap());
    // Algebra on the images of both generator sets, with τ of the target.
    let images: Vec<SVec> = pa.reps.iter().map(|r| fa.push_alpha(r, 1)).chain(pb.reps.iter().map(|r| fb.push_alpha(r, 1))).collect();
    let propagated: Vec<SVec> = images.iter().map(|v| target.propagate(v).unwrap()).collect();
    let tau: Vec<Vec<Q>> = images.iter().map(|u| propagated.iter().map(|gv| target.obj.pairing(1, u, gv)).collect()).collect();
    let alg = Ccr::from_tau(tau);
    let split = pa.reps.len();
    for i in 0..split {
        for j in split..images.len() {
            assert!(alg.commutator(&alg.generator(i), &alg.generator(j)).is_zero());
        }
    }
    assert!((0..split).any(|i| (0..split).any(|j| !alg.commutator(&alg.generator(i), &alg.generator(j)).is_zero())));
}
