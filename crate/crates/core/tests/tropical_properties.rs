use grsk_core::lattice::Point;
use grsk_core::random::bottom_to_top_pair;
use grsk_core::tropical::{beta_bridge, check_dzero, h_product0, lpp_brute, lpp_dp, tau0, HeightField, HeightFunction};
use grsk_core::{Rational, TropValue};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int() -> impl Strategy<Value = Rational> {
    (-10i64..=10).prop_map(|x| Rational::from_integer(x.into()))
}

fn field(n: (usize, usize), width: (usize, usize)) -> impl Strategy<Value = HeightField> {
    (n.0..=n.1, width.0..=width.1)
        .prop_flat_map(|(n, w)| prop::collection::vec(prop::collection::vec(int(), w.max(n)), n))
        .prop_map(|inc| HeightField::from_increments(&inc).unwrap())
}

fn pair(f: &HeightField, seed: u64, k: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bottom_to_top_pair(&mut rng, f.n(), f.width(), k.min(f.width()), 200_000, 200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_plus_products_are_single_path_lpp(f in field((2, 5), (1, 8))) {
        let h = h_product0(&f);
        let n = f.n();
        for u in 1..=f.width() {
            for v in u..=f.width() {
                let want = lpp_brute(&f, &[Point::new(u, n)], &[Point::new(v, 1)]).unwrap();
                prop_assert_eq!(h.get(u, v), &TropValue::Finite(want));
            }
        }
    }

    #[test]
    fn tropical_pair_preserves_sums(f in prop::collection::vec(int(), 1..8), g in prop::collection::vec(int(), 1..8)) {
        let len = f.len().min(g.len());
        let f = HeightFunction::new(1, f[..len].to_vec()).unwrap();
        let g = HeightFunction::new(1, g[..len].to_vec()).unwrap();
        let (up, down) = tau0(&f, &g).unwrap();
        for x in 2..=len {
            prop_assert_eq!(up.at(x) + down.at(x), f.at(x) + g.at(x));
        }
    }

    #[test]
    fn zero_temperature_invariance(f in field((2, 5), (2, 9)), seed in any::<u64>(), k in 1usize..=3) {
        if let Some((us, vs)) = pair(&f, seed, k) {
            let v = check_dzero(&f, &us, &vs).unwrap();
            prop_assert!(v.holds, "{:?}", v);
            let u: Vec<Point> = us.iter().map(|&x| Point::new(x, f.n())).collect();
            let w: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
            prop_assert_eq!(lpp_dp(&f, &u, &w).unwrap(), lpp_brute(&f, &u, &w).unwrap());
        }
    }

    #[test]
    fn bridge_gap_is_bounded(f in field((2, 4), (2, 6)), seed in any::<u64>(), k in 1usize..=2) {
        if let Some((us, vs)) = pair(&f, seed, k) {
            let u: Vec<Point> = us.iter().map(|&x| Point::new(x, f.n())).collect();
            let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
            let rep = beta_bridge(&f, &[1, 2, 4, 8], &u, &v).unwrap();
            prop_assert!(rep.verdict.holds, "{:?}", rep.verdict);
        }
    }
}

#[test]
fn flat_field_gap_is_the_path_count() {
    let f = HeightField::zeros(2, 3);
    let rep = beta_bridge(&f, &[1, 2], &[Point::new(1, 2)], &[Point::new(3, 1)]).unwrap();
    assert_eq!(rep.lpp, Rational::from_integer(0.into()));
    assert_eq!(rep.paths, 3.into());
    // every path has energy 0, so S_β = 3 and the gap is log2(3)/β
    for row in &rep.rows {
        assert!((row.gap - 3f64.log2() / row.beta as f64).abs() < 1e-12);
    }
}
