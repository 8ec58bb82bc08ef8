//! Semi-discrete polymers on `ℝ × ⟦1, n⟧`: jump-time energies, free
//! energies, the transforms `T_i` and `W`, and the exact zero-temperature
//! case on piecewise-linear data.
//!
//! Path `i` of a multipath sits above path `i + 1` (smaller level).
//! Free energies integrate a triangular linear system over the levels of
//! the active paths: between event times a path on level `j` moves to
//! `j − 1` at rate `exp(h_j − h_{j−1})`, and a state is admissible when
//! the active levels strictly increase with the path index.

pub mod cheb;
pub mod check;
pub mod oracle;
pub mod pl;
pub mod transform;
pub mod types;
pub mod zero;

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{format_rational, rational_to_f64, LogValue, Rational};
use cheb::{antiderivative, clenshaw, coefficients, nodes, Grid, NODES};
pub use pl::{PLFunction, PLTable};

/// Largest simplex dimension accepted by positive-temperature integrals.
pub const MAX_DIM: usize = 6;
/// Dyadic refinement levels `T·2^{−j}` placed toward `t = 0`.
pub const GRADING: usize = 30;
/// Grid halvings tried before reporting non-convergence.
pub const MAX_HALVINGS: usize = 5;

/// One path given by its endpoints and interior jump times
/// `t_{ℓ−1} ≤ … ≤ t_m`, stored in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpPath {
    pub start: (Rational, usize),
    pub end: (Rational, usize),
    pub jumps: Vec<Rational>,
}

impl JumpPath {
    pub fn new(start: (Rational, usize), end: (Rational, usize), jumps: Vec<Rational>) -> Result<Self> {
        if start.1 < end.1 || start.0 >= end.0 {
            return Err(Error::InvalidInput(format!(
                "path from ({}, {}) to ({}, {}) is not admissible",
                format_rational(&start.0),
                start.1,
                format_rational(&end.0),
                end.1
            )));
        }
        if jumps.len() != start.1 - end.1 {
            return Err(Error::InvalidInput(format!("expected {} jump times, got {}", start.1 - end.1, jumps.len())));
        }
        let mut chain = vec![&start.0];
        chain.extend(&jumps);
        chain.push(&end.0);
        if chain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("jump times must increase strictly inside (u, v)".into()));
        }
        Ok(JumpPath { start, end, jumps })
    }

    /// First time at `level`, for `m − 1 ≤ level ≤ ℓ`.
    pub fn arrival(&self, level: usize) -> &Rational {
        let top = self.start.1;
        if level == top {
            &self.start.0
        } else if level + 1 == self.end.1 {
            &self.end.0
        } else {
            &self.jumps[top - 1 - level]
        }
    }
}

/// `∫ df∘π = Σ_j f_j(t_{j−1}) − f_j(t_j)`, exactly.
pub fn path_energy(f: &[PLFunction], path: &JumpPath) -> Result<Rational> {
    let (top, bottom) = (path.start.1, path.end.1);
    if top > f.len() {
        return Err(Error::InvalidInput(format!("level {top} exceeds n = {}", f.len())));
    }
    if path.start.0 < Rational::zero() || path.end.0 > *f[0].horizon() {
        return Err(Error::InvalidInput("jump times outside [0, T]".into()));
    }
    Ok((bottom..=top).map(|j| f[j - 1].eval(path.arrival(j - 1)) - f[j - 1].eval(path.arrival(j))).sum())
}

/// Energy of a multipath: the sum over its paths.
pub fn multipath_energy(f: &[PLFunction], paths: &[JumpPath]) -> Result<Rational> {
    paths.iter().map(|p| path_energy(f, p)).sum()
}

/// Endpoint data `U = ((u_i, ℓ_i))`, `V = ((v_i, m_i))`, path 1 uppermost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdEndpoints {
    pub starts: Vec<(Rational, usize)>,
    pub ends: Vec<(Rational, usize)>,
}

impl SdEndpoints {
    /// Checks shapes and orderings; feasibility is decided by the integrals.
    pub fn new(starts: Vec<(Rational, usize)>, ends: Vec<(Rational, usize)>, n: usize) -> Result<Self> {
        if starts.is_empty() || starts.len() != ends.len() {
            return Err(Error::InvalidInput(format!("need k ≥ 1 starts and ends, got {} and {}", starts.len(), ends.len())));
        }
        for ((u, l), (v, m)) in starts.iter().zip(&ends) {
            if *u < Rational::zero() || u >= v || m > l || *m == 0 || *l > n {
                return Err(Error::InvalidInput(format!(
                    "endpoints ({}, {l}) -> ({}, {m}) do not bound a path in n = {n} levels",
                    format_rational(u),
                    format_rational(v)
                )));
            }
        }
        if starts.windows(2).any(|w| w[0].0 > w[1].0) || ends.windows(2).any(|w| w[0].0 > w[1].0) {
            return Err(Error::InvalidInput("start and end times must be sorted by path".into()));
        }
        Ok(SdEndpoints { starts, ends })
    }

    /// Starts on level `n`, ends on level 1.
    pub fn bottom_to_top(us: &[Rational], vs: &[Rational], n: usize) -> Result<Self> {
        SdEndpoints::new(us.iter().map(|u| (u.clone(), n)).collect(), vs.iter().map(|v| (v.clone(), 1)).collect(), n)
    }

    pub fn k(&self) -> usize {
        self.starts.len()
    }

    /// Dimension of the jump-time simplex.
    pub fn dimension(&self) -> usize {
        self.starts.iter().zip(&self.ends).map(|(s, e)| s.1 - e.1).sum()
    }

    pub fn is_bottom_to_top(&self, n: usize) -> bool {
        self.starts.iter().all(|s| s.1 == n) && self.ends.iter().all(|e| e.1 == 1)
    }

    /// Distinct start and end times in increasing order.
    pub fn event_times(&self) -> Vec<Rational> {
        let mut t: Vec<Rational> = self.starts.iter().chain(&self.ends).map(|p| p.0.clone()).collect();
        t.sort();
        t.dedup();
        t
    }

    /// Number of jumps from level `j` to `j − 1` made by any multipath.
    fn jumps_through(&self, j: usize) -> usize {
        self.starts.iter().zip(&self.ends).filter(|(s, e)| e.1 < j && j <= s.1).count()
    }
}

/// A tuple of level functions `h_1, …, h_n` evaluated in floating point.
pub trait Environment {
    fn n(&self) -> usize;
    fn horizon(&self) -> f64;
    fn value(&self, level: usize, t: f64) -> f64;
    /// Points where some `h_j` fails to be smooth.
    fn knots(&self) -> Vec<f64>;
    /// Widest quadrature cell that resolves the jump rates.
    fn max_width(&self) -> f64;
}

/// `β f` for piecewise-linear `f`.
#[derive(Clone, Debug)]
pub struct Scaled {
    tables: Vec<PLTable>,
    horizon: f64,
    slope: f64,
    pub beta: f64,
}

impl Scaled {
    pub fn new(f: &[PLFunction], beta: f64) -> Self {
        Scaled {
            tables: f.iter().map(PLFunction::table).collect(),
            horizon: rational_to_f64(f[0].horizon()),
            slope: f.iter().map(PLFunction::max_slope).fold(0.0, f64::max),
            beta,
        }
    }
}

impl Environment for Scaled {
    fn n(&self) -> usize {
        self.tables.len()
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn value(&self, level: usize, t: f64) -> f64 {
        self.beta * self.tables[level - 1].eval(t)
    }

    fn knots(&self) -> Vec<f64> {
        self.tables.iter().flat_map(|g| g.knots.iter().copied()).collect()
    }

    fn max_width(&self) -> f64 {
        let rate = 2.0 * self.beta.abs() * self.slope;
        let t = self.horizon / 16.0;
        if rate > 0.0 {
            t.min(4.0 / rate)
        } else {
            t
        }
    }
}

pub(crate) fn check_horizons(f: &[PLFunction]) -> Result<()> {
    match f.first() {
        None => Err(Error::InvalidInput("need at least one level function".into())),
        Some(g) if f.iter().any(|h| h.horizon() != g.horizon()) => {
            Err(Error::DomainMismatch("level functions have different horizons".into()))
        }
        _ => Ok(()),
    }
}

/// `f[U → V]` for piecewise-linear `f`.
pub fn free_energy(f: &[PLFunction], ends: &SdEndpoints, tol: f64) -> Result<LogValue> {
    check_horizons(f)?;
    free_energy_env(&Scaled::new(f, 1.0), ends, tol)
}

/// `h[U → V]`, refining the grid until two successive values agree to `tol`.
pub fn free_energy_env(env: &dyn Environment, ends: &SdEndpoints, tol: f64) -> Result<LogValue> {
    let dim = ends.dimension();
    if dim > MAX_DIM {
        return Err(Error::DimensionGuard { dim, max: MAX_DIM });
    }
    if ends.starts.iter().any(|s| s.1 > env.n()) {
        return Err(Error::InvalidInput(format!("start level exceeds n = {}", env.n())));
    }
    let t_end = rational_to_f64(ends.event_times().last().expect("nonempty endpoints"));
    if t_end > env.horizon() * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!("end time {t_end} exceeds the horizon {}", env.horizon())));
    }
    let mut must = env.knots();
    must.extend(ends.event_times().iter().map(rational_to_f64));
    let mut grid = Grid::build(env.horizon(), &must, GRADING, env.max_width());
    let mut last = sweep(env, ends, &grid)?;
    for _ in 0..MAX_HALVINGS {
        grid = grid.halved();
        let next = sweep(env, ends, &grid)?;
        if (next - last).abs() <= tol {
            return Ok(LogValue(next));
        }
        last = next;
    }
    Err(Error::Quadrature(format!("free energy still moving by more than {tol} after {MAX_HALVINGS} halvings")))
}

/// Same as [`free_energy_env`] on one fixed grid.
pub fn free_energy_on(env: &dyn Environment, ends: &SdEndpoints, grid: &Grid) -> Result<LogValue> {
    sweep(env, ends, grid).map(LogValue)
}

type State = Vec<usize>;

fn sweep(env: &dyn Environment, ends: &SdEndpoints, grid: &Grid) -> Result<f64> {
    let n = env.n();
    let events = ends.event_times();
    let times: Vec<f64> = events.iter().map(rational_to_f64).collect();
    let shift = rate_shifts(env, grid, times[0], *times.last().expect("nonempty"));
    let mut active: Vec<usize> = Vec::new();
    let mut states: HashMap<State, f64> = HashMap::from([(Vec::new(), 1.0)]);
    let mut log_scale = 0.0;
    for (e, t) in events.iter().enumerate() {
        for (i, (v, m)) in ends.ends.iter().enumerate() {
            if v == t {
                let pos = active.iter().position(|&a| a == i).expect("paths end after they start");
                active.remove(pos);
                states = states
                    .into_iter()
                    .filter(|(s, _)| s[pos] == *m)
                    .map(|(mut s, p)| {
                        s.remove(pos);
                        (s, p)
                    })
                    .collect();
            }
        }
        for (i, (u, l)) in ends.starts.iter().enumerate() {
            if u == t {
                let pos = active.partition_point(|&a| a < i);
                active.insert(pos, i);
                states = states
                    .into_iter()
                    .map(|(mut s, p)| {
                        s.insert(pos, *l);
                        (s, p)
                    })
                    .filter(|(s, _)| s.windows(2).all(|w| w[0] < w[1]))
                    .collect();
            }
        }
        if e + 1 < events.len() {
            let floors: Vec<usize> = active.iter().map(|&i| ends.ends[i].1).collect();
            states = integrate_segment(env, grid, &shift, states, &floors, times[e], times[e + 1]);
            let top = states.values().copied().fold(0.0, f64::max);
            if top <= 0.0 || !top.is_finite() {
                return Err(Error::EmptyPathSet);
            }
            states.values_mut().for_each(|p| *p /= top);
            log_scale += top.ln();
        }
    }
    let mass = states.get(&Vec::new()).copied().unwrap_or(0.0);
    if mass <= 0.0 {
        return Err(Error::EmptyPathSet);
    }
    let boundary: f64 = ends
        .starts
        .iter()
        .zip(&ends.ends)
        .map(|((u, l), (v, m))| env.value(*m, rational_to_f64(v)) - env.value(*l, rational_to_f64(u)))
        .sum();
    let shifted: f64 = (2..=n).map(|j| ends.jumps_through(j) as f64 * shift[j]).sum();
    Ok(mass.ln() + log_scale + boundary + shifted)
}

/// `shift[j]` ≈ max of `h_j − h_{j−1}` on `[a, b]`; any constant is exact,
/// this one keeps the rates bounded by about 1.
fn rate_shifts(env: &dyn Environment, grid: &Grid, a: f64, b: f64) -> Vec<f64> {
    let n = env.n();
    let mut pts: Vec<f64> = grid.knots.iter().copied().filter(|&t| t > a && t < b).collect();
    pts.extend([a.max(b * 1e-9), b]);
    let mut shift = vec![0.0; n + 1];
    for (j, s) in shift.iter_mut().enumerate().skip(2) {
        *s = pts.iter().map(|&t| env.value(j, t) - env.value(j - 1, t)).filter(|x| x.is_finite()).fold(f64::MIN, f64::max);
        if *s == f64::MIN {
            *s = 0.0;
        }
    }
    shift
}

/// States reachable from `init` by single upward moves that keep the levels
/// strictly increasing and each path at or below its final level.
fn closure(init: impl Iterator<Item = State>, floors: &[usize]) -> Vec<State> {
    let mut seen: HashMap<State, ()> = HashMap::new();
    let mut stack: Vec<State> = init.collect();
    while let Some(s) = stack.pop() {
        if seen.insert(s.clone(), ()).is_some() {
            continue;
        }
        for p in 0..s.len() {
            let above = if p == 0 { 0 } else { s[p - 1] };
            if s[p] > floors[p] && s[p] - 1 > above {
                let mut t = s.clone();
                t[p] -= 1;
                stack.push(t);
            }
        }
    }
    let mut all: Vec<State> = seen.into_keys().collect();
    all.sort_by_key(|s| std::cmp::Reverse(s.iter().sum::<usize>()));
    all
}

fn integrate_segment(
    env: &dyn Environment,
    grid: &Grid,
    shift: &[f64],
    states: HashMap<State, f64>,
    floors: &[usize],
    a: f64,
    b: f64,
) -> HashMap<State, f64> {
    let order = closure(states.keys().cloned(), floors);
    let index: HashMap<&State, usize> = order.iter().enumerate().map(|(i, s)| (s, i)).collect();
    // preds[s] = (predecessor, level it leaves)
    let preds: Vec<Vec<(usize, usize)>> = order
        .iter()
        .map(|s| {
            (0..s.len())
                .filter_map(|p| {
                    let mut t = s.clone();
                    t[p] += 1;
                    index.get(&t).map(|&i| (i, t[p]))
                })
                .collect()
        })
        .collect();
    let mut value: Vec<f64> = order.iter().map(|s| states.get(s).copied().unwrap_or(0.0)).collect();
    if order.iter().all(|s| s.is_empty()) {
        return order.into_iter().zip(value).collect();
    }
    let mut cuts: Vec<f64> = grid.knots.iter().copied().filter(|&t| t > a && t < b).collect();
    cuts.insert(0, a);
    cuts.push(b);
    let xs = nodes();
    let n = env.n();
    let mut at_nodes = vec![[0.0; NODES]; order.len()];
    for w in cuts.windows(2) {
        let (c0, c1) = (w[0], w[1]);
        let ts = xs.map(|x| 0.5 * (c0 + c1) + 0.5 * (c1 - c0) * x);
        let mut rate = vec![[0.0; NODES]; n + 1];
        for (j, r) in rate.iter_mut().enumerate().skip(2) {
            *r = ts.map(|t| (env.value(j, t) - env.value(j - 1, t) - shift[j]).exp());
        }
        for s in 0..order.len() {
            if preds[s].is_empty() {
                at_nodes[s] = [value[s]; NODES];
                continue;
            }
            let mut integrand = [0.0; NODES];
            for &(q, level) in &preds[s] {
                for k in 0..NODES {
                    integrand[k] += rate[level][k] * at_nodes[q][k];
                }
            }
            let mut anti = antiderivative(&coefficients(&integrand));
            anti.iter_mut().for_each(|x| *x *= 0.5 * (c1 - c0));
            let start = value[s];
            at_nodes[s] = xs.map(|x| start + clenshaw(&anti, x));
            value[s] = start + clenshaw(&anti, 1.0);
        }
    }
    order.into_iter().zip(value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn zeros(n: usize) -> Vec<PLFunction> {
        vec![PLFunction::zero(r("4")); n]
    }

    #[test]
    fn energy_of_single_jump() {
        let f = vec![PLFunction::zero(r("1")), PLFunction::linear(r("1"), r("1"))];
        let p = JumpPath::new((r("1/4"), 2), (r("1"), 1), vec![r("2/3")]).unwrap();
        assert_eq!(path_energy(&f, &p).unwrap(), r("2/3") - r("1/4"));
        assert_eq!(path_energy(&zeros(2), &JumpPath::new((r("0"), 2), (r("4"), 1), vec![r("1")]).unwrap()).unwrap(), r("0"));
    }

    #[test]
    fn jump_times_must_increase() {
        assert!(JumpPath::new((r("0"), 3), (r("1"), 1), vec![r("1/2"), r("1/3")]).is_err());
        assert!(JumpPath::new((r("0"), 2), (r("1"), 1), vec![]).is_err());
    }

    #[test]
    fn flat_interval_length() {
        let ends = SdEndpoints::bottom_to_top(&[r("1")], &[r("3")], 2).unwrap();
        let got = free_energy(&zeros(2), &ends, 1e-10).unwrap().value();
        assert!((got - 2f64.ln()).abs() < 1e-10, "{got}");
    }

    #[test]
    fn flat_two_simplex() {
        let ends = SdEndpoints::bottom_to_top(&[r("1/2")], &[r("7/2")], 3).unwrap();
        let got = free_energy(&zeros(3), &ends, 1e-10).unwrap().value();
        assert!((got - (9.0f64 / 2.0).ln()).abs() < 1e-10, "{got}");
    }

    #[test]
    fn two_paths_flat_volume() {
        // both paths are active on (1, 2), so s_1 ∈ (0, 1) and s_2 ∈ (2, 3)
        let ends = SdEndpoints::bottom_to_top(&[r("0"), r("1")], &[r("2"), r("3")], 2).unwrap();
        let got = free_energy(&zeros(2), &ends, 1e-10).unwrap().value();
        assert!(got.abs() < 1e-10, "{got}");
    }

    #[test]
    fn dimension_guard() {
        let ends = SdEndpoints::bottom_to_top(&[r("0"), r("1")], &[r("2"), r("3")], 5).unwrap();
        assert!(matches!(free_energy(&zeros(5), &ends, 1e-8), Err(Error::DimensionGuard { dim: 8, max: 6 })));
    }

    #[test]
    fn infeasible_pair_is_empty() {
        // three paths on two levels need v_1 ≤ u_3
        let ends = SdEndpoints::bottom_to_top(&[r("0"), r("1"), r("2")], &[r("3"), r("4"), r("4")], 2);
        assert!(ends.is_err() || matches!(free_energy(&zeros(2), &ends.unwrap(), 1e-8), Err(Error::EmptyPathSet)));
    }
}
