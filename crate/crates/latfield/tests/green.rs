//! Green operator identities checked against independent computations.

use exactla::{SVec, Q};
use latfield::complex::{Cell, ComplexSpec, CubicalComplex, Factor, SubcomplexEmbedding, Support};
use latfield::green::{green, propagator, solved_rows, GreenDirection, Propagator};
use latfield::lorentz::{causal_future, causal_past, LorentzOps};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(f: &[Factor]) -> (CubicalComplex, LorentzOps, Propagator) {
    let x = CubicalComplex::product(f).unwrap();
    let ops = LorentzOps::new(&x);
    let g = Propagator::new(&x, &ops).unwrap();
    (x, ops, g)
}

fn random_compact(rng: &mut ChaCha8Rng, x: &CubicalComplex, k: usize, nnz: usize) -> SVec {
    let free = x.free_cells(k, Support::Compact);
    let pairs: Vec<(usize, Q)> = (0..nnz).map(|_| (free[rng.gen_range(0..free.len())], Q::int(rng.gen_range(-3..=3)))).collect();
    let mut v = SVec::new();
    for (i, q) in pairs {
        v = v.add(&SVec::unit(i).scale(&q));
    }
    v
}

fn restrict(v: &SVec, cells: &[usize]) -> Vec<Q> {
    cells.iter().map(|&i| v.get(i)).collect()
}

/// Dense oracle: unknowns on slabs 1.., equations on every row but the last slab.
#[test]
fn retarded_wave_matches_dense_solve() {
    let (x, ops, g) = setup(&[Factor::Time(9), Factor::Cycle(7)]);
    let src = x.index_of(&Cell::vertex(&[4, 3])).unwrap();
    let f = SVec::unit(src);
    let u = green(&x, &g, 0, GreenDirection::Retarded, &f, 1).unwrap();
    let unknowns: Vec<usize> = (0..x.count(0)).filter(|&i| x.cell(0, i).pos(0) >= 1).collect();
    let rows: Vec<usize> = (0..x.count(0)).filter(|&i| x.cell(0, i).pos(0) <= 7).collect();
    assert_eq!(unknowns.len(), rows.len());
    let b = ops.box_matrix(0).select_rows(&rows).select_cols(&unknowns);
    let rhs = SVec::from_pairs(rows.iter().enumerate().map(|(r, &i)| (r, f.get(i))));
    let sol = b.solve(&rhs).unwrap();
    let want = SVec::from_pairs(unknowns.iter().enumerate().map(|(j, &i)| (i, sol.get(j))));
    assert_eq!(u, want);
    // A discrete wave: nothing before the source slab, something at the next one.
    assert!(u.indices().all(|i| x.cell(0, i).pos(0) > 4));
    assert!(!u.is_zero());
}

#[test]
fn box_inverts_on_solved_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for f in [
        vec![Factor::Time(6), Factor::Cycle(5)],
        vec![Factor::Time(6), Factor::Path(6)],
        vec![Factor::Time(5), Factor::Path(5), Factor::Cycle(4)],
    ] {
        let (x, ops, g) = setup(&f);
        for k in 0..=x.dim() {
            for dir in [GreenDirection::Retarded, GreenDirection::Advanced] {
                for _ in 0..5 {
                    let src = random_compact(&mut rng, &x, k, 4);
                    let u = green(&x, &g, k, dir, &src, 1).unwrap();
                    let bu = ops.box_apply(k, &u, 1);
                    let rows = solved_rows(&x, k, dir);
                    assert_eq!(restrict(&bu, &rows), restrict(&src, &rows), "{f:?} k={k} {dir:?}");
                    // Vanishes strictly before (after) the source's time support.
                    let tps: Vec<usize> = src.indices().map(|i| x.time_position(x.cell(k, i))).collect();
                    if let (Some(&lo), Some(&hi)) = (tps.iter().min(), tps.iter().max()) {
                        for i in u.indices() {
                            let tp = x.time_position(x.cell(k, i));
                            match dir {
                                GreenDirection::Retarded => assert!(tp > lo),
                                GreenDirection::Advanced => assert!(tp < hi),
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Time reflection maps the retarded solve to the advanced one.
#[test]
fn advanced_is_reflected_retarded() {
    let (x, _, g) = setup(&[Factor::Time(7), Factor::Cycle(5)]);
    let t = 7;
    let reflect = |k: usize, v: &SVec| -> SVec {
        SVec::from_pairs(v.iter().map(|(i, q)| {
            let c = x.cell(k, i);
            let e = c.is_edge(0);
            let r = c.with(0, e, t - 1 - c.pos(0) - e as usize);
            (x.index_of(&r).unwrap(), if e { -q } else { q.clone() })
        }))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..=2 {
        for _ in 0..5 {
            let src = random_compact(&mut rng, &x, k, 3);
            let adv = green(&x, &g, k, GreenDirection::Advanced, &src, 1).unwrap();
            let ret = green(&x, &g, k, GreenDirection::Retarded, &reflect(k, &src), 1).unwrap();
            assert_eq!(adv, reflect(k, &ret), "k={k}");
        }
    }
}

#[test]
fn propagator_is_skew_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for f in [vec![Factor::Time(6), Factor::Cycle(4), Factor::Cycle(4)], vec![Factor::Time(6), Factor::Path(5), Factor::Path(5)]] {
        let (x, ops, g) = setup(&f);
        for k in 0..=x.dim() {
            for _ in 0..50 / (x.dim() + 1) + 1 {
                let a = random_compact(&mut rng, &x, k, 3);
                let b = random_compact(&mut rng, &x, k, 3);
                let ga = propagator(&x, &g, k, &a, 1).unwrap();
                let gb = propagator(&x, &g, k, &b, 1).unwrap();
                assert_eq!(ops.pairing(k, &a, &gb), -ops.pairing(k, &ga, &b), "{f:?} k={k}");
                assert!(ops.pairing(k, &a, &ga).is_zero());
            }
        }
    }
}

#[test]
fn green_intertwines_d_and_delta_on_interior() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for f in [vec![Factor::Time(6), Factor::Cycle(4), Factor::Cycle(4)], vec![Factor::Time(6), Factor::Path(5), Factor::Path(5)]] {
        let (x, ops, g) = setup(&f);
        for dir in [GreenDirection::Retarded, GreenDirection::Advanced] {
            for k in 1..=x.dim() {
                let interior = x.free_cells(k, Support::Compact);
                for _ in 0..4 {
                    let a = random_compact(&mut rng, &x, k - 1, 3);
                    let lhs = green(&x, &g, k, dir, &ops.d(k - 1, &a, 1).unwrap(), 1).unwrap();
                    let rhs = ops.d(k - 1, &g.solve_scalar(k - 1, dir, &a), 1).unwrap();
                    assert_eq!(restrict(&lhs, &interior), restrict(&rhs, &interior), "d {f:?} k={k}");
                }
                let interior = x.free_cells(k - 1, Support::Compact);
                for _ in 0..4 {
                    let b = random_compact(&mut rng, &x, k, 3);
                    let lhs = g.solve_scalar(k - 1, dir, &ops.delta(k, &b, 1).unwrap());
                    let rhs = ops.delta(k, &g.solve_scalar(k, dir, &b), 1).unwrap();
                    assert_eq!(restrict(&lhs, &interior), restrict(&rhs, &interior), "delta {f:?} k={k}");
                }
            }
        }
    }
}

#[test]
fn support_stays_in_causal_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in [vec![Factor::Time(7), Factor::Cycle(6), Factor::Cycle(5)], vec![Factor::Time(7), Factor::Path(7), Factor::Path(6)]] {
        let (x, _, g) = setup(&f);
        for k in 0..=x.dim() {
            let free = x.free_cells(k, Support::Compact);
            for _ in 0..10 {
                let c = free[rng.gen_range(0..free.len())];
                let src = SVec::unit(c);
                let fut = causal_future(&x, &[(k, c)]);
                let past = causal_past(&x, &[(k, c)]);
                let u = green(&x, &g, k, GreenDirection::Retarded, &src, 1).unwrap();
                assert!(u.indices().all(|i| fut.covers(&x, x.cell(k, i))), "{f:?} k={k}");
                let u = green(&x, &g, k, GreenDirection::Advanced, &src, 1).unwrap();
                assert!(u.indices().all(|i| past.covers(&x, x.cell(k, i))), "{f:?} k={k}");
            }
        }
    }
}

#[test]
fn forward_cone_is_light_cone() {
    let x = CubicalComplex::product(&[Factor::Time(7), Factor::Path(9)]).unwrap();
    let p = x.index_of(&Cell::vertex(&[2, 4])).unwrap();
    let cone = causal_future(&x, &[(0, p)]);
    let want: std::collections::HashSet<Cell> = (0..7usize)
        .flat_map(|t| (0..9usize).map(move |s| (t, s)))
        .filter(|&(t, s)| t >= 2 && (s as isize - 4).unsigned_abs() <= t - 2)
        .map(|(t, s)| Cell::vertex(&[t, s]))
        .collect();
    assert_eq!(cone.vertices, want);
}

/// A time slab with its own recursion agrees with the restricted host solve.
#[test]
fn slab_green_is_restricted_host_green() {
    let (s, _, gs) = setup(&[Factor::Time(5), Factor::Cycle(6)]);
    let (t, _, gt) = setup(&[Factor::Time(9), Factor::Cycle(6)]);
    let e = SubcomplexEmbedding::translate(&s, &t, &[2, 0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..=2 {
        let interior = s.free_cells(k, Support::Compact);
        for _ in 0..5 {
            let a = random_compact(&mut rng, &s, k, 3);
            let own = propagator(&s, &gs, k, &a, 1).unwrap();
            let host = e.pull(k, &propagator(&t, &gt, k, &e.push(k, &a), 1).unwrap());
            assert_eq!(restrict(&own, &interior), restrict(&host, &interior), "k={k}");
        }
    }
}

/// Carved complexes inherit the host operators; identities still hold.
#[test]
fn carved_complex_green_identities() {
    let mut spec = ComplexSpec::product(vec![Factor::Time(7), Factor::Path(7), Factor::Path(7)]);
    spec.remove_cone = Some(vec![3, 3, 3]);
    let x = CubicalComplex::build(&spec).unwrap();
    let ops = LorentzOps::new(&x);
    let g = Propagator::new(&x, &ops).unwrap();
    assert!(matches!(g, Propagator::Restricted { .. }));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..=2 {
        for _ in 0..5 {
            let a = random_compact(&mut rng, &x, k, 3);
            let b = random_compact(&mut rng, &x, k, 3);
            let ga = propagator(&x, &g, k, &a, 1).unwrap();
            let gb = propagator(&x, &g, k, &b, 1).unwrap();
            assert_eq!(ops.pairing(k, &a, &gb), -ops.pairing(k, &ga, &b));
            let interior = x.free_cells(k + 1, Support::Compact);
            let lhs = propagator(&x, &g, k + 1, &ops.d(k, &a, 1).unwrap(), 1).unwrap();
            let rhs = ops.d(k, &ga, 1).unwrap();
            assert_eq!(restrict(&lhs, &interior), restrict(&rhs, &interior));
        }
    }
}

#[test]
fn identity_check_counts_and_reproducibility() {
    let (x, ops, g) = setup(&[Factor::Time(6), Factor::Path(5), Factor::Cycle(4)]);
    let tallies = latfield::green::check_identities(&x, &ops, &g, 40, 11).unwrap();
    assert_eq!(tallies.len(), 4);
    assert!(tallies.iter().all(|t| t.passes()), "{tallies:?}");
    // Ten samples per degree, both directions for the commutation and cone checks.
    let checked: Vec<usize> = tallies.iter().map(|t| t.checked).collect();
    assert_eq!(checked, vec![60, 60, 40, 80]);
    assert_eq!(latfield::green::check_identities(&x, &ops, &g, 40, 11).unwrap(), tallies);
}
