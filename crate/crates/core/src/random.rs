//! Seeded instance generators shared by tests, the CLI and benchmarks.

use rand::seq::index::sample;
use rand::Rng;

use crate::lattice::{self, DomainProfile, Point};

/// `k` distinct sorted columns drawn uniformly from `[1, width]`.
pub fn sorted_columns(rng: &mut impl Rng, width: usize, k: usize) -> Vec<usize> {
    let mut cols: Vec<usize> = sample(rng, width, k).into_iter().map(|c| c + 1).collect();
    cols.sort_unstable();
    cols
}

/// Random columns `U = ((u_i, n))`, `V = ((v_i, 1))` forming an endpoint
/// pair on the rectangular domain whose oracle size stays within `bound`.
/// Gives up after `tries` rejected draws.
pub fn bottom_to_top_pair(
    rng: &mut impl Rng,
    n: usize,
    width: usize,
    k: usize,
    bound: u128,
    tries: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if k == 0 || k > width {
        return None;
    }
    let dom = DomainProfile::rectangular(n);
    for _ in 0..tries {
        let us = sorted_columns(rng, width, k);
        let vs = sorted_columns(rng, width, k);
        let u: Vec<Point> = us.iter().map(|&x| Point::new(x, n)).collect();
        let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
        if lattice::candidate_count(&u, &v) <= bound && lattice::is_endpoint_pair(&dom, &u, &v) {
            return Some((us, vs));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairs_are_feasible_and_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (us, vs) = bottom_to_top_pair(&mut rng, 3, 6, 2, 1_000_000, 1000).unwrap();
            assert!(us.windows(2).all(|w| w[0] < w[1]));
            assert!(us.iter().zip(&vs).all(|(u, v)| u <= v));
        }
    }
}
