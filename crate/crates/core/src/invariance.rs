//! The invariance `D[U → V] = (W D)[↑U → V]` for `U` on level `n` and `V`
//! on level 1, evaluated through every partition-function route on both
//! sides.

use crate::error::Result;
use crate::grsk;
use crate::lattice::{self, Point};
use crate::numerics::PosRational;
use crate::partition::{self, WeightField};
use crate::pitman;
use crate::verify::Verdict;

/// One partition function computed four ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteValues {
    pub brute: PosRational,
    pub h_matrix: PosRational,
    pub lgv: PosRational,
    pub transfer: PosRational,
}

impl RouteValues {
    pub fn compute(d: &WeightField, u: &[Point], v: &[Point]) -> Result<Self> {
        Ok(RouteValues {
            brute: partition::partition_function_brute(d, u, v)?,
            h_matrix: partition::partition_function_h(d, u, v)?,
            lgv: partition::partition_function_lgv(d, u, v)?,
            transfer: partition::partition_function_transfer(d, u, v)?,
        })
    }

    fn pairs(&self, side: &str) -> Vec<(String, PosRational, PosRational)> {
        vec![
            (format!("{side}: H-matrix vs brute force"), self.h_matrix.clone(), self.brute.clone()),
            (format!("{side}: LGV vs brute force"), self.lgv.clone(), self.brute.clone()),
            (format!("{side}: transfer vs brute force"), self.transfer.clone(), self.brute.clone()),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub lhs: RouteValues,
    pub rhs: RouteValues,
    pub verdict: Verdict,
}

/// Checks the invariance with `W D` computed from `d`.
pub fn check_invariance(d: &WeightField, us: &[usize], vs: &[usize]) -> Result<InvarianceReport> {
    check_invariance_with(d, &pitman::w(d)?, us, vs)
}

/// Checks the invariance against a supplied transformed field, so that a
/// corrupted `W D` can be planted.
pub fn check_invariance_with(d: &WeightField, wd: &WeightField, us: &[usize], vs: &[usize]) -> Result<InvarianceReport> {
    let n = d.n();
    let u: Vec<Point> = us.iter().map(|&x| Point::new(x, n)).collect();
    let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
    let up = lattice::uparrow(&u, n)?;
    let lhs = RouteValues::compute(d, &u, &v)?;
    let rhs = RouteValues::compute(wd, &up, &v)?;
    let mut pairs = lhs.pairs("D[U->V]");
    pairs.extend(rhs.pairs("(WD)[^U->V]"));
    pairs.push(("D[U->V] vs (WD)[^U->V]".into(), lhs.brute.clone(), rhs.brute.clone()));
    let mut verdict = Verdict::all_equal("route comparisons", pairs);
    if verdict.holds {
        verdict.lhs = lhs.brute.to_string();
        verdict.rhs = rhs.brute.to_string();
    }
    Ok(InvarianceReport { lhs, rhs, verdict })
}

/// The whole-matrix form: `M = M̃` entrywise, i.e. every `k = 1` instance.
pub fn check_single_paths(d: &WeightField) -> Result<Verdict> {
    grsk::verify_h_chain(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_paths_on_three_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let d = WeightField::random(&mut rng, 3, 6);
        let report = check_invariance(&d, &[1, 3], &[4, 6]).unwrap();
        assert!(report.verdict.holds, "{:?}", report.verdict);
        assert_eq!(report.lhs, report.rhs);
    }

    #[test]
    fn planted_fault_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let d = WeightField::random(&mut rng, 2, 4);
        let wd = pitman::w(&d).unwrap();
        let bad = wd.with_value(4, 1, &wd.value(4, 1).unwrap() * &PosRational::new(2, 1).unwrap()).unwrap();
        let report = check_invariance_with(&d, &bad, &[1], &[4]).unwrap();
        assert!(!report.verdict.holds);
        assert!(report.verdict.counterexample.is_some());
    }
}
