//! Discrete geometric Pitman transforms and the operator `W`.
//!
//! Every function carries its domain start, and each operator checks it.
//! `T_{r,m}` moves the start of slot `m + 1` from `r` to `r + 1`. After the
//! full `W`, level `i` starts at column `i`.

use crate::error::{Error, Result};
use crate::numerics::PosRational;
use crate::partition::WeightField;

/// A positive function on `[start, start + len − 1]` with the implicit
/// boundary value `f(start − 1) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StairFunction {
    start: usize,
    values: Vec<PosRational>,
}

impl StairFunction {
    pub fn new(start: usize, values: Vec<PosRational>) -> Result<Self> {
        if start == 0 {
            return Err(Error::InvalidInput("domain start must be at least 1".into()));
        }
        Ok(StairFunction { start, values })
    }

    pub fn constant(start: usize, len: usize, c: PosRational) -> Self {
        StairFunction { start, values: vec![c; len] }
    }

    /// `f(x) = Π_{y ≤ x} e_y` from vertex weights `e_start, e_start+1, …`.
    pub fn from_increments(start: usize, increments: &[PosRational]) -> Self {
        let mut acc = PosRational::one();
        let values = increments
            .iter()
            .map(|e| {
                acc = &acc * e;
                acc.clone()
            })
            .collect();
        StairFunction { start, values }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last column of the table (`start − 1` when empty).
    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn values(&self) -> &[PosRational] {
        &self.values
    }

    /// `f(x)` for `x` in `[start − 1, end]`.
    pub fn get(&self, x: usize) -> Option<PosRational> {
        if x + 1 == self.start {
            Some(PosRational::one())
        } else if x >= self.start {
            self.values.get(x - self.start).cloned()
        } else {
            None
        }
    }

    /// `f(x)` for `x` in `[start − 1, end]`; panics elsewhere.
    pub fn at(&self, x: usize) -> PosRational {
        self.get(x).unwrap_or_else(|| panic!("x={x} outside [{}, {}]", self.start as i64 - 1, self.end()))
    }

    /// Vertex weight `f(x) / f(x − 1)`.
    pub fn increment(&self, x: usize) -> PosRational {
        &self.at(x) / &self.at(x - 1)
    }

    pub(crate) fn values_mut(&mut self) -> &mut Vec<PosRational> {
        &mut self.values
    }
}

fn shared_start(f: &StairFunction, g: &StairFunction) -> Result<usize> {
    if f.start != g.start {
        return Err(Error::DomainMismatch(format!("domain starts {} and {} differ", f.start, g.start)));
    }
    Ok(f.start)
}

/// Running sums `Σ_{m=r}^{x} g(m) / f(m − 1)` over the common table.
fn running_sums(g: &StairFunction, f: &StairFunction) -> Vec<PosRational> {
    let r = g.start;
    let len = g.len().min(f.len());
    let mut sums = Vec::with_capacity(len);
    let mut acc: Option<PosRational> = None;
    for x in r..r + len {
        let term = &g.at(x) / &f.at(x - 1);
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
        sums.push(acc.clone().unwrap());
    }
    sums
}

/// `(g ⊙ f)(x) = f(x) Σ_{m=r}^{x} g(m)/f(m−1)`, domain start `r`.
pub fn odot(g: &StairFunction, f: &StairFunction) -> Result<StairFunction> {
    let r = shared_start(f, g)?;
    let values = running_sums(g, f).into_iter().enumerate().map(|(i, s)| &f.at(r + i) * &s).collect();
    Ok(StairFunction { start: r, values })
}

/// `(f ⊗ g)(x) = g(x) / Σ_{m=r}^{x} g(m)/f(m−1)`, domain start `r + 1`.
pub fn otimes(f: &StairFunction, g: &StairFunction) -> Result<StairFunction> {
    let r = shared_start(f, g)?;
    let values = running_sums(g, f).into_iter().enumerate().skip(1).map(|(i, s)| &g.at(r + i) / &s).collect();
    Ok(StairFunction { start: r + 1, values })
}

/// `T(f, g) = (g ⊙ f, f ⊗ g)`.
pub fn tau(f: &StairFunction, g: &StairFunction) -> Result<(StairFunction, StairFunction)> {
    Ok((odot(g, f)?, otimes(f, g)?))
}

/// `T_{r,m}`: applies `T` to slots `m` and `m + 1`, which must both start at
/// `r`. Slot `m + 1` then starts at `r + 1`, so the next slot down must
/// start strictly after `r`.
pub fn tau_rm(d: &WeightField, r: usize, m: usize) -> Result<WeightField> {
    let n = d.n();
    if m == 0 || m >= n {
        return Err(Error::DomainMismatch(format!("slot m={m} needs 1 ≤ m ≤ n−1 with n={n}")));
    }
    let prof = d.profile();
    if prof.start(m) != r || prof.start(m + 1) != r {
        return Err(Error::DomainMismatch(format!(
            "T_{{{r},{m}}} needs r_{m} = r_{} = {r}, profile is {:?}",
            m + 1,
            prof.starts()
        )));
    }
    if m + 2 <= n && prof.start(m + 2) <= r {
        return Err(Error::DomainMismatch(format!(
            "T_{{{r},{m}}} would leave r_{} = {} above r_{} = {}",
            m + 1,
            r + 1,
            m + 2,
            prof.start(m + 2)
        )));
    }
    let (upper, lower) = tau(d.level(m), d.level(m + 1))?;
    let mut out = d.clone();
    out.replace_pair(m, upper, lower);
    Ok(out)
}

/// `S_r = T_{r,r} ∘ T_{r,r+1} ∘ … ∘ T_{r,n−1}`; `T_{r,n−1}` acts first.
pub fn s_r(d: &WeightField, r: usize) -> Result<WeightField> {
    let mut out = d.clone();
    for m in (r..d.n()).rev() {
        out = tau_rm(&out, r, m)?;
    }
    Ok(out)
}

/// `W = S_{n−1} ∘ … ∘ S_1` on a rectangular field.
pub fn w(d: &WeightField) -> Result<WeightField> {
    if d.profile().starts().iter().any(|&r| r != 1) {
        return Err(Error::DomainMismatch(format!("W needs a rectangular field, profile is {:?}", d.profile().starts())));
    }
    let mut out = d.clone();
    for r in 1..d.n() {
        out = s_r(&out, r)?;
    }
    Ok(out)
}

/// The sequence `(r, m)` of the `T_{r,m}` factors of `W`, in application
/// order.
pub fn w_schedule(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|r| (r..n).rev().map(move |m| (r, m))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PosRational {
        s.parse().unwrap()
    }

    fn stair(start: usize, vals: &[&str]) -> StairFunction {
        StairFunction::new(start, vals.iter().map(|s| q(s)).collect()).unwrap()
    }

    #[test]
    fn unit_functions() {
        let one = StairFunction::constant(1, 5, PosRational::one());
        let (up, down) = tau(&one, &one).unwrap();
        for x in 1..=5 {
            assert_eq!(up.at(x), PosRational::from_integer(x as u64).unwrap());
        }
        assert_eq!(down.start(), 2);
        for x in 2..=5 {
            assert_eq!(down.at(x), PosRational::new(1, x as u64).unwrap());
        }
    }

    #[test]
    fn two_term_sums() {
        let f = stair(3, &["2", "5/3"]);
        let g = stair(3, &["7", "1/4"]);
        let up = odot(&g, &f).unwrap();
        assert_eq!(up.at(3), &f.at(3) * &g.at(3));
        assert_eq!(up.at(4), &f.at(4) * &(g.at(3) + &g.at(4) / &f.at(3)));
        let down = otimes(&f, &g).unwrap();
        assert_eq!(down.at(4), &g.at(4) / &(g.at(3) + &g.at(4) / &f.at(3)));
        assert_eq!(&up.at(4) * &down.at(4), &f.at(4) * &g.at(4));
    }

    #[test]
    fn constant_closed_form() {
        // the boundary value f(r − 1) = 1 makes the first summand c, the rest 1
        let c = q("7/3");
        let f = StairFunction::constant(2, 6, c.clone());
        let (up, down) = tau(&f, &f).unwrap();
        for x in 2..=7 {
            let sum = if x == 2 { c.clone() } else { &c + &PosRational::from_integer((x - 2) as u64).unwrap() };
            assert_eq!(up.at(x), &c * &sum);
            if x > 2 {
                assert_eq!(down.at(x), &c / &sum);
            }
        }
    }

    #[test]
    fn mismatched_starts() {
        let f = stair(1, &["1"]);
        let g = stair(2, &["1"]);
        assert!(matches!(odot(&g, &f), Err(Error::DomainMismatch(_))));
        assert!(matches!(otimes(&f, &g), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn boundary_value_is_one() {
        let f = stair(4, &["3"]);
        assert_eq!(f.at(3), PosRational::one());
        assert_eq!(f.increment(4), q("3"));
        assert!(f.get(2).is_none());
        assert!(f.get(5).is_none());
    }

    #[test]
    fn schedule_for_three_levels() {
        assert_eq!(w_schedule(3), vec![(1, 2), (1, 1), (2, 2)]);
        assert_eq!(w_schedule(2), vec![(1, 1)]);
    }
}
