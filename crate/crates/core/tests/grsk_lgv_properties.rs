use grsk_core::grsk::{self, check_tableau_matches_w, check_w_q_sequence, check_w_shape, compare_tableaux, p_tableau, q_tableau, tau_kl, verify_h_chain, z_from_tau, Word};
use grsk_core::lattice::{uparrow, Point};
use grsk_core::lgv::{build_matrices, check_a_priori, contiguous_minor, dj_induction_verify, minor_det};
use grsk_core::partition::{partition_function, WeightField};
use grsk_core::{pitman, PosRational, Rational};
use itertools::Itertools;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pos() -> impl Strategy<Value = PosRational> {
    (1u64..=20, 1u64..=20).prop_map(|(p, q)| PosRational::new(p, q).unwrap())
}

fn rows(n: (usize, usize), width: (usize, usize)) -> impl Strategy<Value = Vec<Vec<PosRational>>> {
    (n.0..=n.1, width.0..=width.1).prop_flat_map(|(n, w)| prop::collection::vec(prop::collection::vec(pos(), w), n))
}

fn field(n: (usize, usize), width: (usize, usize)) -> impl Strategy<Value = WeightField> {
    rows(n, width).prop_map(|d| WeightField::from_vertex_weights(&d).unwrap())
}

fn q(s: &str) -> PosRational {
    s.parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tableau_equals_tau_ratios(r in rows((1, 5), (1, 4))) {
        let v = compare_tableaux(&p_tableau(&r).unwrap(), &z_from_tau(&r).unwrap());
        prop_assert!(v.holds, "{:?}", v);
    }

    #[test]
    fn tableau_pipeline_matches_w(d in field((2, 5), (1, 4))) {
        prop_assert!(check_tableau_matches_w(&d).unwrap().holds);
        prop_assert!(check_w_shape(&d).unwrap().holds);
        prop_assert!(check_w_q_sequence(&d).unwrap().holds);
        prop_assert!(verify_h_chain(&d).unwrap().holds);
    }

    #[test]
    fn q_is_consistent_as_rows_are_added(r in rows((2, 5), (1, 4))) {
        let all = q_tableau(&r).unwrap();
        let prefix = q_tableau(&r[..r.len() - 1]).unwrap();
        prop_assert_eq!(&all[..prefix.len()], prefix.as_slice());
    }

    #[test]
    fn minors_are_partition_functions(d in field((2, 4), (2, 6)), seed in any::<u64>(), k in 1usize..=3) {
        let (m, mt) = build_matrices(&d).unwrap();
        let wd = pitman::w(&d).unwrap();
        let n = d.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(d.width());
        let us = grsk_core::random::sorted_columns(&mut rng, d.width(), k);
        let vs = grsk_core::random::sorted_columns(&mut rng, d.width(), k);
        let u: Vec<Point> = us.iter().map(|&x| Point::new(x, n)).collect();
        let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
        let det = minor_det(&m, &us, &vs).unwrap();
        let det_t = minor_det(&mt, &us, &vs).unwrap();
        match partition_function(&d, &u, &v) {
            Ok(z) => {
                prop_assert_eq!(&det, z.as_rational());
                let zt = partition_function(&wd, &uparrow(&u, n).unwrap(), &v).unwrap();
                prop_assert_eq!(&det_t, zt.as_rational());
            }
            Err(grsk_core::Error::EmptyPathSet) => {
                prop_assert!(det.is_zero());
                prop_assert!(det_t.is_zero());
            }
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn diagonal_minors_agree(d in field((2, 4), (1, 6))) {
        let (m, mt) = build_matrices(&d).unwrap();
        let size = m.size();
        for i in 1..=size {
            for k in 1..=size + 1 - i {
                prop_assert_eq!(contiguous_minor(&m, i, i, k), contiguous_minor(&mt, i, i, k));
            }
        }
        for v in 1..=size {
            prop_assert_eq!(m.get(1, v), mt.get(1, v));
        }
    }
}

#[test]
fn induction_replay_on_small_fields() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed as usize % 2);
        let width = 1 + (seed as usize % 6);
        let d = WeightField::random(&mut rng, n, width);
        let (m, mt) = build_matrices(&d).unwrap();
        for (i, v) in check_a_priori(&m, &mt, n).unwrap().into_iter().enumerate() {
            assert!(v.holds, "seed {seed} a-priori {}: {v:?}", i + 1);
        }
        let v = dj_induction_verify(&m, &mt, n).unwrap();
        assert!(v.holds, "seed {seed}: {v:?}");
    }
}

#[test]
fn sentinel_insertion() {
    let (next, bumped) = grsk::row_insert(&Word::Empty { start: 1, len: 2 }, &Word::entries(1, vec![q("5"), q("7")])).unwrap();
    assert_eq!(next, Word::entries(1, vec![q("5"), q("35")]));
    assert!(bumped.is_none());
}

#[test]
fn packed_and_impossible_tau() {
    let ones = vec![vec![PosRational::one(); 4]; 2];
    assert_eq!(tau_kl(&ones, 2, 3, 3).unwrap(), Rational::one());
    assert_eq!(tau_kl(&ones, 2, 4, 3).unwrap(), Rational::zero());
    // one path (1,1) → (2,2) of the all-ones 2×2 array has 2 choices
    let small = vec![vec![PosRational::one(); 2]; 2];
    assert_eq!(tau_kl(&small, 2, 2, 1).unwrap(), Rational::from_integer(2.into()));
}

#[test]
fn all_ones_square() {
    let p = p_tableau(&vec![vec![PosRational::one(); 2]; 2]).unwrap();
    assert_eq!(p.z(1, 1), &q("1"));
    assert_eq!(p.z(2, 1), &q("2"));
    assert_eq!(p.z(2, 2), &q("1/2"));
}

#[test]
fn single_row_is_cumulative_products() {
    let row = vec![q("2"), q("1/3"), q("5")];
    let p = p_tableau(std::slice::from_ref(&row)).unwrap();
    let products: Vec<PosRational> = row.iter().scan(PosRational::one(), |acc, x| {
        *acc = &*acc * x;
        Some(acc.clone())
    }).collect();
    assert_eq!(p.diagonal(1), products.as_slice());
}

#[test]
fn infeasible_minors_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let d = WeightField::random(&mut rng, 2, 5);
    let (m, _) = build_matrices(&d).unwrap();
    for rows in (1..=5).combinations(2) {
        for cols in (1..=5).combinations(2) {
            if rows.iter().zip(&cols).any(|(r, c)| r > c) {
                assert!(minor_det(&m, &rows, &cols).unwrap().is_zero(), "{rows:?} {cols:?}");
            }
        }
    }
}
