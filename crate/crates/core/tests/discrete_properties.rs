use grsk_core::lattice::{self, enumerate_multipaths, is_endpoint_pair, uparrow, uparrow_composed, DomainProfile, Point};
use grsk_core::numerics::{logsumexp, LogValue};
use grsk_core::partition::{self, partition_function, partition_function_brute, partition_function_lgv, path_weight};
use grsk_core::pitman::{self, odot, otimes, tau_rm, StairFunction};
use grsk_core::random::bottom_to_top_pair;
use grsk_core::{Error, PosRational, WeightField};
use itertools::Itertools;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pos() -> impl Strategy<Value = PosRational> {
    (1u64..=20, 1u64..=20).prop_map(|(p, q)| PosRational::new(p, q).unwrap())
}

fn field(n: usize, width: usize) -> impl Strategy<Value = WeightField> {
    prop::collection::vec(prop::collection::vec(pos(), width), n).prop_map(|d| WeightField::from_vertex_weights(&d).unwrap())
}

/// A field with a bottom-to-top endpoint pair drawn from `seed`.
fn instance(n: (usize, usize), width: (usize, usize), k: usize) -> impl Strategy<Value = (WeightField, Vec<Point>, Vec<Point>)> {
    (n.0..=n.1, width.0..=width.1, 1..=k, any::<u64>()).prop_flat_map(|(n, width, k, seed)| {
        let width = width.max(n);
        field(n, width).prop_filter_map("no endpoint pair", move |d| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (us, vs) = bottom_to_top_pair(&mut rng, n, width, k.min(width), 200_000, 200)?;
            Some((d, us.iter().map(|&x| Point::new(x, n)).collect(), vs.iter().map(|&x| Point::new(x, 1)).collect()))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(a in pos(), b in pos(), c in pos()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn logsumexp_is_between_max_and_max_plus_log_len(xs in prop::collection::vec(-50.0f64..50.0, 1..20)) {
        let vals: Vec<LogValue> = xs.iter().map(|&x| LogValue(x)).collect();
        let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s = logsumexp(&vals).value();
        prop_assert!(s >= m - 1e-12);
        prop_assert!(s <= m + (xs.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn enumerated_steps_are_unit_moves((d, u, v) in instance((2, 4), (2, 6), 3)) {
        for pi in enumerate_multipaths(d.profile(), &u, &v).unwrap() {
            for p in &pi.paths {
                for w in p.windows(2) {
                    let right = w[1].x == w[0].x + 1 && w[1].level == w[0].level;
                    let up = w[1].x == w[0].x && w[1].level + 1 == w[0].level;
                    prop_assert!(right ^ up);
                }
            }
        }
    }

    #[test]
    fn endpoint_pair_iff_enumeration_nonempty(n in 2usize..=4, width in 2usize..=6, seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dom = DomainProfile::rectangular(n);
        let k = k.min(width);
        let us = grsk_core::random::sorted_columns(&mut rng, width, k);
        let vs = grsk_core::random::sorted_columns(&mut rng, width, k);
        let u: Vec<Point> = us.iter().map(|&x| Point::new(x, n)).collect();
        let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
        let listed = enumerate_multipaths(&dom, &u, &v).unwrap();
        prop_assert_eq!(is_endpoint_pair(&dom, &u, &v), !listed.is_empty());
    }

    #[test]
    fn brute_force_and_lgv_agree((d, u, v) in instance((2, 5), (2, 9), 3)) {
        let brute = partition_function_brute(&d, &u, &v).unwrap();
        prop_assert_eq!(&partition_function_lgv(&d, &u, &v).unwrap(), &brute);
        prop_assert_eq!(&partition_function(&d, &u, &v).unwrap(), &brute);
        prop_assert!(*brute.as_rational() > grsk_core::Rational::from_integer(0.into()));
    }

    #[test]
    fn pitman_pair_preserves_products(f in prop::collection::vec(pos(), 1..8), g in prop::collection::vec(pos(), 1..8), r in 1usize..4) {
        let len = f.len().min(g.len());
        let f = StairFunction::new(r, f[..len].to_vec()).unwrap();
        let g = StairFunction::new(r, g[..len].to_vec()).unwrap();
        let up = odot(&g, &f).unwrap();
        let down = otimes(&f, &g).unwrap();
        for x in r + 1..r + len {
            prop_assert_eq!(&up.at(x) * &down.at(x), &f.at(x) * &g.at(x));
        }
    }

    #[test]
    fn w_packs_leading_products(d in (2usize..=4, 1usize..=8).prop_flat_map(|(n, w)| field(n, w))) {
        prop_assert!(grsk_core::grsk::check_w_products(&d).unwrap().holds);
    }
}

#[test]
fn uparrow_matches_composition_exhaustively() {
    for n in 2..=6 {
        for k in 1..=4 {
            for cols in (1..=8usize).combinations(k) {
                let u: Vec<Point> = cols.iter().map(|&x| Point::new(x, n)).collect();
                assert_eq!(uparrow(&u, n).unwrap(), uparrow_composed(&u, n), "n={n} U={cols:?}");
            }
        }
    }
}

#[test]
fn single_path_count_is_v() {
    let dom = DomainProfile::rectangular(2);
    for v in 1..=12 {
        let listed = enumerate_multipaths(&dom, &[Point::new(1, 2)], &[Point::new(v, 1)]).unwrap();
        assert_eq!(listed.len(), v);
    }
}

#[test]
fn figure_configuration_is_an_endpoint_pair() {
    let dom = DomainProfile::rectangular(5);
    let u = [Point::new(3, 5), Point::new(5, 5)];
    let v = [Point::new(8, 1), Point::new(9, 1)];
    assert!(is_endpoint_pair(&dom, &u, &v));
}

#[test]
fn horizontal_runs_telescope() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = WeightField::random(&mut rng, 3, 7);
    for m in 1..=3 {
        for a in 1..=7 {
            for b in a..=7 {
                let run = lattice::Multipath { paths: vec![(a..=b).map(|x| Point::new(x, m)).collect()] };
                let level = d.level(m);
                assert_eq!(path_weight(&d, &run).unwrap(), &level.at(b) / &level.at(a - 1));
            }
        }
    }
}

/// Every multipath leaves level 2 at some columns `Z`, so
/// `D[U → V] = Σ_Z D[U → (Z, 2)] · D[(Z, 1) → V]`.
#[test]
fn pinch_factorization_on_three_levels() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let width = 6;
        let d = WeightField::random(&mut rng, 3, width);
        let k = 1 + (seed as usize % 2);
        let (us, vs) = bottom_to_top_pair(&mut rng, 3, width, k, 1_000_000, 1000).unwrap();
        let u: Vec<Point> = us.iter().map(|&x| Point::new(x, 3)).collect();
        let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
        let mut total = grsk_core::Rational::from_integer(0.into());
        for zs in (1..=width).combinations(k) {
            let z: Vec<Point> = zs.iter().map(|&x| Point::new(x, 2)).collect();
            let zm: Vec<Point> = zs.iter().map(|&x| Point::new(x, 1)).collect();
            let upper = partition_function(&d, &u, &z);
            let lower = partition_function(&d, &zm, &v);
            match (upper, lower) {
                (Ok(a), Ok(b)) => total += (&a * &b).into_rational(),
                (Err(Error::EmptyPathSet), _) | (_, Err(Error::EmptyPathSet)) => {}
                (Err(e), _) | (_, Err(e)) => panic!("{e}"),
            }
        }
        assert_eq!(total, partition_function(&d, &u, &v).unwrap().into_rational(), "seed {seed}");
    }
}

#[test]
fn two_level_scalar_identity_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g: Vec<PosRational> = (0..10).map(|_| partition::random_weight(&mut rng)).collect();
    let sum = |a: usize, b: usize| -> grsk_core::Rational {
        (a..=b).map(|m| g[m - 1].as_rational().clone()).sum()
    };
    // u = 1 makes both sides infinite through G_{1,0} = 0
    for u in 2..=10 {
        for v in u..=10 {
            let lhs = sum(u, v) / (sum(1, v) * sum(1, u - 1));
            let rhs: grsk_core::Rational = (u..=v).map(|m| g[m - 1].as_rational() / (sum(1, m) * sum(1, m - 1))).sum();
            assert_eq!(lhs, rhs, "u={u} v={v}");
        }
    }
}

#[test]
fn w_ends_on_the_staircase() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 2..=6 {
        let d = WeightField::random(&mut rng, n, 7);
        let wd = pitman::w(&d).unwrap();
        assert_eq!(wd.profile().starts(), (1..=n).collect::<Vec<_>>().as_slice());
    }
}

#[test]
fn canonical_order_is_the_only_valid_one_for_three_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = WeightField::random(&mut rng, 3, 5);
    let factors = [(1, 2), (1, 1), (2, 2)];
    let run = |order: &[(usize, usize)]| order.iter().try_fold(d.clone(), |acc, &(r, m)| tau_rm(&acc, r, m));
    for order in factors.iter().copied().permutations(3) {
        let out = run(&order);
        if order == factors {
            assert_eq!(out.unwrap(), pitman::w(&d).unwrap());
        } else {
            assert!(matches!(out, Err(Error::DomainMismatch(_))), "order {order:?} should fail");
        }
    }
}
