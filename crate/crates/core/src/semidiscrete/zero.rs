//! Zero temperature on piecewise-linear data, exactly over rationals:
//! `(T⁰_i f)(t) = f(t) + sup_{[0,t]}(f_{i+1} − f_i) (e_i − e_{i+1})` and
//! `f⁰[U → V] = sup` of the telescoped energy over jump-time placements.
//!
//! The energy is a sum of piecewise-linear functions of single jump
//! times, maximised over a polytope cut out by order constraints between
//! jump times and endpoint times. An optimum therefore places every jump
//! at a breakpoint or an endpoint time, and a sweep over those candidate
//! times finds it.

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{format_rational, Rational, TropValue};
use crate::verify::Verdict;

use super::{check_horizons, PLFunction, SdEndpoints};

/// `T⁰_i f`, `1 ≤ i ≤ n − 1`.
pub fn t0(f: &[PLFunction], i: usize) -> Result<Vec<PLFunction>> {
    check_horizons(f)?;
    if i == 0 || i >= f.len() {
        return Err(Error::InvalidInput(format!("T0_{i} needs 1 ≤ i ≤ {}", f.len().saturating_sub(1))));
    }
    let run = f[i].sub(&f[i - 1])?.running_max();
    let mut out = f.to_vec();
    out[i - 1] = f[i - 1].add(&run)?;
    out[i] = f[i].sub(&run)?;
    Ok(out)
}

/// `W⁰ f`, applying the `T⁰_i` in the same order as `W`.
pub fn w0(f: &[PLFunction]) -> Result<Vec<PLFunction>> {
    super::transform::w_sequence(f.len()).into_iter().try_fold(f.to_vec(), |h, i| t0(&h, i))
}

/// Times at which some optimal multipath can jump.
fn candidates(f: &[PLFunction], ends: &SdEndpoints) -> Vec<Rational> {
    let events = ends.event_times();
    let (lo, hi) = (events[0].clone(), events[events.len() - 1].clone());
    let mut c: Vec<Rational> =
        f.iter().flat_map(|g| g.knots().iter().cloned()).filter(|t| *t >= lo && *t <= hi).chain(events).collect();
    c.sort();
    c.dedup();
    c
}

/// Gain of moving from level `from` up to level `to < from` at time `t`.
fn climb(f: &[PLFunction], from: usize, to: usize, t: &Rational) -> Rational {
    (to + 1..=from).map(|j| f[j - 1].eval(t) - f[j - 2].eval(t)).sum()
}

/// `f⁰[U → V]`, or `−∞` when no multipath exists.
pub fn free_energy0(f: &[PLFunction], ends: &SdEndpoints) -> Result<TropValue> {
    check_horizons(f)?;
    if ends.starts.iter().any(|s| s.1 > f.len()) {
        return Err(Error::InvalidInput(format!("start level exceeds n = {}", f.len())));
    }
    if ends.ends.iter().any(|e| e.0 > *f[0].horizon()) {
        return Err(Error::InvalidInput("end time exceeds the horizon".into()));
    }
    let k = ends.k();
    // state: level of each path, None when inactive; paths never restart
    let mut best: HashMap<Vec<Option<usize>>, Rational> = HashMap::from([(vec![None; k], Rational::zero())]);
    for c in candidates(f, ends) {
        for i in 0..k {
            let starts_now = ends.starts[i].0 == c;
            let ends_now = ends.ends[i].0 == c;
            let mut next: HashMap<Vec<Option<usize>>, Rational> = HashMap::new();
            for (state, val) in best {
                let mut s = state.clone();
                let mut v = val.clone();
                if starts_now {
                    s[i] = Some(ends.starts[i].1);
                    v -= f[ends.starts[i].1 - 1].eval(&c);
                }
                let Some(cur) = s[i] else {
                    keep(&mut next, s, v);
                    continue;
                };
                // the nearest active path above, already settled at this instant
                let above = s[..i].iter().rev().flatten().next().copied().unwrap_or(0);
                let floor = ends.ends[i].1.max(above + 1);
                for to in floor..=cur {
                    let mut t = s.clone();
                    let mut w = &v + climb(f, cur, to, &c);
                    t[i] = Some(to);
                    if ends_now {
                        if to != ends.ends[i].1 {
                            continue;
                        }
                        w += f[to - 1].eval(&c);
                        t[i] = None;
                    }
                    keep(&mut next, t, w);
                }
            }
            best = next;
        }
        best.retain(|s, _| s.iter().flatten().tuple_windows().all(|(a, b)| a < b));
    }
    Ok(best.remove(&vec![None; k]).map_or(TropValue::NegInf, TropValue::Finite))
}

fn keep(map: &mut HashMap<Vec<Option<usize>>, Rational>, s: Vec<Option<usize>>, v: Rational) {
    match map.get_mut(&s) {
        Some(old) if *old >= v => {}
        Some(old) => *old = v,
        None => {
            map.insert(s, v);
        }
    }
}

/// Jump times `t_{ℓ−1} ≤ … ≤ t_m` of one path in the closure, together
/// with its endpoint data.
struct Placement<'a> {
    u: &'a Rational,
    v: &'a Rational,
    top: usize,
    bottom: usize,
    jumps: Vec<Rational>,
}

impl Placement<'_> {
    /// First time the path is at or above level `j`; `None` if never.
    fn reaches(&self, j: usize) -> Option<&Rational> {
        if j >= self.top {
            Some(self.u)
        } else if j >= self.bottom {
            Some(&self.jumps[self.top - 1 - j])
        } else {
            None
        }
    }
}

/// Checks that path `a` stays strictly above path `b` on the interior of
/// their common domain.
fn separated(a: &Placement, b: &Placement, n: usize) -> bool {
    let lo = a.u.max(b.u);
    let hi = a.v.min(b.v);
    if lo >= hi {
        return true;
    }
    (1..=n).all(|j| {
        // once b is at or above j, a must be at or above j − 1
        let Some(arrive) = b.reaches(j) else { return true };
        let from = arrive.max(lo);
        match (j > 1).then(|| a.reaches(j - 1)).flatten() {
            Some(leave) => from >= leave.min(hi),
            None => from >= hi,
        }
    })
}

/// `f⁰[U → V]` by enumerating every placement of jumps on candidate times;
/// the oracle for [`free_energy0`]. Fails past `bound` placements.
pub fn free_energy0_vertices(f: &[PLFunction], ends: &SdEndpoints, bound: u128) -> Result<TropValue> {
    check_horizons(f)?;
    let cand = candidates(f, ends);
    let n = f.len();
    let per_path: Vec<Vec<Vec<Rational>>> = ends
        .starts
        .iter()
        .zip(&ends.ends)
        .map(|((u, l), (v, m))| {
            let inside: Vec<Rational> = cand.iter().filter(|t| *t >= u && *t <= v).cloned().collect();
            inside.into_iter().combinations_with_replacement(l - m).collect()
        })
        .collect();
    let count = per_path.iter().map(|p| p.len() as u128).product::<u128>();
    if count > bound {
        return Err(Error::OracleTooLarge { count, bound });
    }
    let mut best = TropValue::NegInf;
    for choice in per_path.iter().map(|p| p.iter()).multi_cartesian_product() {
        let places: Vec<Placement> = choice
            .iter()
            .enumerate()
            .map(|(i, jumps)| Placement {
                u: &ends.starts[i].0,
                v: &ends.ends[i].0,
                top: ends.starts[i].1,
                bottom: ends.ends[i].1,
                jumps: (*jumps).clone(),
            })
            .collect();
        if !places.iter().tuple_combinations().all(|(a, b)| separated(a, b, n)) {
            continue;
        }
        let energy: Rational = places
            .iter()
            .map(|p| {
                (p.bottom..=p.top)
                    .map(|j| {
                        let leave = if j == p.bottom { p.v } else { &p.jumps[p.top - j] };
                        let arrive = if j == p.top { p.u } else { &p.jumps[p.top - 1 - j] };
                        f[j - 1].eval(leave) - f[j - 1].eval(arrive)
                    })
                    .sum::<Rational>()
            })
            .sum();
        best = best.max_with(&TropValue::Finite(energy));
    }
    Ok(best)
}

/// Both sides of `f⁰[U → V] = (W⁰ f)[U → V]`, exactly.
#[derive(Clone, Debug)]
pub struct ZeroReport {
    pub lhs: TropValue,
    pub rhs: TropValue,
    pub verdict: Verdict,
}

fn show(v: &TropValue) -> String {
    match v {
        TropValue::Finite(q) => format_rational(q),
        TropValue::NegInf => "-inf".into(),
    }
}

/// Checks the zero-temperature invariance for `U` on level `n` and `V` on
/// level 1.
pub fn check_sdzero(f: &[PLFunction], ends: &SdEndpoints) -> Result<ZeroReport> {
    check_sdzero_with(f, &w0(f)?, ends)
}

/// As [`check_sdzero`] against a supplied `W⁰ f`.
pub fn check_sdzero_with(f: &[PLFunction], wf: &[PLFunction], ends: &SdEndpoints) -> Result<ZeroReport> {
    if !ends.is_bottom_to_top(f.len()) {
        return Err(Error::InvalidInput("starts must lie on level n and ends on level 1".into()));
    }
    let lhs = free_energy0(f, ends)?;
    if lhs == TropValue::NegInf {
        return Err(Error::EmptyPathSet);
    }
    let rhs = free_energy0(wf, ends)?;
    let verdict = if lhs == rhs {
        Verdict::passed(show(&lhs), show(&rhs))
    } else {
        Verdict::failed(show(&lhs), show(&rhs), "f0[U->V] differs from (W0 f)[U->V]")
    };
    Ok(ZeroReport { lhs, rhs, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn fin(s: &str) -> TropValue {
        TropValue::Finite(r(s))
    }

    #[test]
    fn flat_is_zero() {
        let f = vec![PLFunction::zero(r("1")); 3];
        assert!(w0(&f).unwrap().iter().all(|g| g.values().iter().all(Zero::is_zero)));
        let ends = SdEndpoints::bottom_to_top(&[r("0"), r("1/2")], &[r("1/2"), r("1")], 3).unwrap();
        assert_eq!(free_energy0(&f, &ends).unwrap(), fin("0"));
    }

    #[test]
    fn single_jump_at_the_end() {
        let f = vec![PLFunction::zero(r("1")), PLFunction::linear(r("1"), r("1"))];
        let ends = SdEndpoints::bottom_to_top(&[r("0")], &[r("1")], 2).unwrap();
        assert_eq!(free_energy0(&f, &ends).unwrap(), fin("1"));
        assert_eq!(free_energy0_vertices(&f, &ends, 1000).unwrap(), fin("1"));
        assert!(check_sdzero(&f, &ends).unwrap().verdict.holds);
    }

    #[test]
    fn infeasible_is_neg_inf() {
        let f = vec![PLFunction::zero(r("1")); 2];
        let ends = SdEndpoints::bottom_to_top(&[r("0"), r("1/4"), r("1/2")], &[r("3/4"), r("7/8"), r("1")], 2).unwrap();
        assert_eq!(free_energy0(&f, &ends).unwrap(), TropValue::NegInf);
        assert_eq!(free_energy0_vertices(&f, &ends, 1_000_000).unwrap(), TropValue::NegInf);
    }

    #[test]
    fn dp_matches_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=3 {
            for k in 1..=2 {
                for _ in 0..6 {
                    let f: Vec<PLFunction> = (0..n).map(|_| PLFunction::random(&mut rng, &r("1"), 3, 2)).collect();
                    let ends = SdEndpoints::bottom_to_top(&[r("1/8"), r("3/8")][..k], &[r("5/8"), r("7/8")][..k], n).unwrap();
                    assert_eq!(free_energy0(&f, &ends).unwrap(), free_energy0_vertices(&f, &ends, 10_000_000).unwrap());
                }
            }
        }
    }

    #[test]
    fn invariance_holds_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let f: Vec<PLFunction> = (0..3).map(|_| PLFunction::random(&mut rng, &r("1"), 4, 2)).collect();
        let ends = SdEndpoints::bottom_to_top(&[r("1/8"), r("1/4")], &[r("1/2"), r("1")], 3).unwrap();
        let report = check_sdzero(&f, &ends).unwrap();
        assert!(report.verdict.holds, "{:?}", report.verdict);
    }
}
