//! The lattice `Z≥1 × [1, n]` with staircase domains, non-intersecting
//! multipaths and the lifting operators.
//!
//! Level 1 is drawn on top and level `n` at the bottom. A path moves either
//! right `(x, m) → (x + 1, m)` or up `(x, m) → (x, m − 1)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::Semiring;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: usize,
    pub level: usize,
}

impl Point {
    pub const fn new(x: usize, level: usize) -> Self {
        Point { x, level }
    }

    /// Anti-diagonal index; every step of a path raises it by one.
    fn time(self) -> i64 {
        self.x as i64 - self.level as i64
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.level)
    }
}

/// Staircase profile: level `i` occupies the columns `x ≥ r_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DomainProfile {
    r: Vec<usize>,
}

impl DomainProfile {
    pub fn new(r: Vec<usize>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidInput("a domain needs at least one level".into()));
        }
        if r[0] < 1 {
            return Err(Error::InvalidInput("domain starts must be at least 1".into()));
        }
        if r.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(format!("profile {r:?} is not weakly increasing")));
        }
        Ok(DomainProfile { r })
    }

    /// `r_i = 1` for every level.
    pub fn rectangular(n: usize) -> Self {
        DomainProfile { r: vec![1; n.max(1)] }
    }

    /// `r_i = i`, the profile of a fully transformed field.
    pub fn staircase(n: usize) -> Self {
        DomainProfile { r: (1..=n.max(1)).collect() }
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    /// Domain start `r_level`.
    pub fn start(&self, level: usize) -> usize {
        self.r[level - 1]
    }

    pub fn starts(&self) -> &[usize] {
        &self.r
    }

    pub(crate) fn set_start(&mut self, level: usize, value: usize) {
        self.r[level - 1] = value;
    }

    pub fn contains(&self, p: Point) -> bool {
        (1..=self.n()).contains(&p.level) && p.x >= self.start(p.level)
    }

    /// Lowest level (largest index) present in column `x`.
    pub fn bottom_level_at(&self, x: usize) -> Option<usize> {
        (1..=self.n()).rev().find(|&m| self.start(m) <= x)
    }

    fn check(&self, points: &[Point]) -> Result<()> {
        match points.iter().find(|p| !self.contains(**p)) {
            Some(p) => Err(Error::OutOfDomain { x: p.x, level: p.level }),
            None => Ok(()),
        }
    }
}

pub type Path = Vec<Point>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multipath {
    pub paths: Vec<Path>,
}

impl Multipath {
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.paths.iter().flatten()
    }

    /// Every step is a unit right or up move and no vertex is shared.
    pub fn is_valid(&self, dom: &DomainProfile) -> bool {
        let steps_ok = self.paths.iter().all(|p| {
            !p.is_empty()
                && p.iter().all(|q| dom.contains(*q))
                && p.windows(2).all(|w| {
                    let right = w[1].x == w[0].x + 1 && w[1].level == w[0].level;
                    let up = w[1].x == w[0].x && w[1].level + 1 == w[0].level;
                    right ^ up
                })
        });
        let mut all: Vec<Point> = self.points().copied().collect();
        let total = all.len();
        all.sort();
        all.dedup();
        steps_ok && all.len() == total
    }
}

/// Start and end points of a multipath, paired by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointPair {
    pub u: Vec<Point>,
    pub v: Vec<Point>,
}

impl EndpointPair {
    pub fn new(u: Vec<Point>, v: Vec<Point>) -> Result<Self> {
        if u.is_empty() || u.len() != v.len() {
            return Err(Error::InvalidInput(format!("need |U| = |V| ≥ 1, got {} and {}", u.len(), v.len())));
        }
        for list in [&u, &v] {
            for (i, a) in list.iter().enumerate() {
                for b in &list[i + 1..] {
                    if a.level == b.level && a.x >= b.x {
                        return Err(Error::InvalidInput(format!(
                            "points {a} and {b} on one level must have increasing columns"
                        )));
                    }
                }
            }
        }
        Ok(EndpointPair { u, v })
    }

    pub fn k(&self) -> usize {
        self.u.len()
    }

    /// `U = ((u_i, n))`, `V = ((v_i, 1))`.
    pub fn bottom_to_top(n: usize, us: &[usize], vs: &[usize]) -> Result<Self> {
        Self::new(us.iter().map(|&x| Point::new(x, n)).collect(), vs.iter().map(|&x| Point::new(x, 1)).collect())
    }
}

pub const DEFAULT_ORACLE_BOUND: u128 = 10_000_000;

/// Enumeration bound: `GRSK_LAB_MAX_ORACLE` when set, otherwise `10^7`.
pub fn oracle_bound() -> u128 {
    std::env::var("GRSK_LAB_MAX_ORACLE")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_BOUND)
}

/// Number of single paths from `a` to `b`, ignoring other paths.
pub fn single_path_count(a: Point, b: Point) -> u128 {
    if b.x < a.x || b.level > a.level {
        return 0;
    }
    let right = (b.x - a.x) as u128;
    let up = (a.level - b.level) as u128;
    let mut c: u128 = 1;
    for i in 1..=up.min(right) {
        c = c.saturating_mul(right + up + 1 - i) / i;
    }
    c
}

/// Product of single-path counts, the size measure used by the guard.
pub fn candidate_count(u: &[Point], v: &[Point]) -> u128 {
    u.iter().zip(v).fold(1u128, |acc, (a, b)| acc.saturating_mul(single_path_count(*a, *b)))
}

fn validate(dom: &DomainProfile, u: &[Point], v: &[Point]) -> Result<()> {
    if u.is_empty() || u.len() != v.len() {
        return Err(Error::InvalidInput(format!("need |U| = |V| ≥ 1, got {} and {}", u.len(), v.len())));
    }
    dom.check(u)?;
    dom.check(v)
}

struct Occupancy {
    width: usize,
    cells: Vec<bool>,
}

impl Occupancy {
    fn new(n: usize, width: usize) -> Self {
        Occupancy { width: width + 1, cells: vec![false; (n + 1) * (width + 1)] }
    }
    fn slot(&self, p: Point) -> usize {
        p.level * self.width + p.x
    }
    fn taken(&self, p: Point) -> bool {
        self.cells[self.slot(p)]
    }
    fn flip(&mut self, p: Point) {
        let s = self.slot(p);
        self.cells[s] = !self.cells[s];
    }
}

/// Depth-first traversal of all multipaths `U → V`, threading an
/// accumulator through the visited points. Up-steps are tried before
/// right-steps, so multipaths are visited in lexicographic order of their
/// up-step columns.
pub fn fold_multipaths<A>(
    dom: &DomainProfile,
    u: &[Point],
    v: &[Point],
    bound: u128,
    init: A,
    step: &dyn Fn(&A, Point) -> A,
    leaf: &mut dyn FnMut(&A),
) -> Result<()> {
    validate(dom, u, v)?;
    let count = candidate_count(u, v);
    if count > bound {
        return Err(Error::OracleTooLarge { count, bound });
    }
    if count == 0 {
        return Ok(());
    }
    let width = u.iter().chain(v).map(|p| p.x).max().unwrap_or(1);
    let mut occ = Occupancy::new(dom.n(), width);

    struct Walk<'a, A> {
        dom: &'a DomainProfile,
        u: &'a [Point],
        v: &'a [Point],
        step: &'a dyn Fn(&A, Point) -> A,
        leaf: &'a mut dyn FnMut(&A),
    }

    fn enter<A>(w: &mut Walk<'_, A>, occ: &mut Occupancy, path: usize, p: Point, acc: &A) {
        if occ.taken(p) || !w.dom.contains(p) {
            return;
        }
        occ.flip(p);
        let acc = (w.step)(acc, p);
        let target = w.v[path];
        if p == target {
            if path + 1 == w.u.len() {
                (w.leaf)(&acc);
            } else {
                enter(w, occ, path + 1, w.u[path + 1], &acc);
            }
        } else {
            if p.level > target.level {
                enter(w, occ, path, Point::new(p.x, p.level - 1), &acc);
            }
            if p.x < target.x {
                enter(w, occ, path, Point::new(p.x + 1, p.level), &acc);
            }
        }
        occ.flip(p);
    }

    let mut walk = Walk { dom, u, v, step, leaf };
    enter(&mut walk, &mut occ, 0, u[0], &init);
    Ok(())
}

/// All non-intersecting multipaths from `U` to `V`, using [`oracle_bound`].
pub fn enumerate_multipaths(dom: &DomainProfile, u: &[Point], v: &[Point]) -> Result<Vec<Multipath>> {
    enumerate_multipaths_bounded(dom, u, v, oracle_bound())
}

pub fn enumerate_multipaths_bounded(
    dom: &DomainProfile,
    u: &[Point],
    v: &[Point],
    bound: u128,
) -> Result<Vec<Multipath>> {
    let lengths: Vec<usize> = u.iter().zip(v).map(|(a, b)| (b.x + a.level).saturating_sub(a.x + b.level) + 1).collect();
    let mut out = Vec::new();
    let step = |acc: &Vec<Point>, p: Point| {
        let mut next = acc.clone();
        next.push(p);
        next
    };
    fold_multipaths(dom, u, v, bound, Vec::new(), &step, &mut |flat: &Vec<Point>| {
        let mut paths = Vec::with_capacity(lengths.len());
        let mut rest = flat.as_slice();
        for &len in &lengths {
            let (head, tail) = rest.split_at(len);
            paths.push(head.to_vec());
            rest = tail;
        }
        out.push(Multipath { paths });
    })?;
    Ok(out)
}

/// Sum over multipaths of the product of point weights, in any semiring.
///
/// Points with the same `x − level` lie on one anti-diagonal, and every
/// step of a path advances that index by one. Sweeping the anti-diagonals
/// therefore tracks all paths simultaneously, and vertex-disjointness
/// reduces to distinct positions on each anti-diagonal.
pub fn transfer_sum<S: Semiring>(
    dom: &DomainProfile,
    u: &[Point],
    v: &[Point],
    weight: &dyn Fn(Point) -> S,
) -> Result<S> {
    validate(dom, u, v)?;
    let k = u.len();
    if u.iter().zip(v).any(|(a, b)| single_path_count(*a, *b) == 0) {
        return Ok(S::nil());
    }
    let first = u.iter().map(|p| p.time()).min().unwrap_or(0);
    let last = v.iter().map(|p| p.time()).max().unwrap_or(0);
    // level of each path on the current anti-diagonal, 0 when inactive
    let mut states: BTreeMap<Vec<usize>, S> = BTreeMap::new();
    states.insert(vec![0; k], S::unit());
    for t in first..=last {
        let mut next: BTreeMap<Vec<usize>, S> = BTreeMap::new();
        for (state, value) in &states {
            let movers: Vec<usize> = (0..k).filter(|&i| state[i] != 0).collect();
            for mask in 0u32..(1u32 << movers.len()) {
                let mut levels = state.clone();
                let mut ok = true;
                for (bit, &i) in movers.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        levels[i] -= 1;
                        if levels[i] < v[i].level {
                            ok = false;
                        }
                    } else if (t + levels[i] as i64) as usize > v[i].x {
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
                for i in 0..k {
                    if u[i].time() == t {
                        levels[i] = u[i].level;
                    }
                }
                let active: Vec<usize> = (0..k).filter(|&i| levels[i] != 0).collect();
                let distinct = active.iter().enumerate().all(|(a, &i)| active[a + 1..].iter().all(|&j| levels[i] != levels[j]));
                if !distinct {
                    continue;
                }
                let mut w = value.clone();
                for &i in &active {
                    let p = Point::new((t + levels[i] as i64) as usize, levels[i]);
                    if !dom.contains(p) {
                        ok = false;
                        break;
                    }
                    w = w.otimes(&weight(p));
                }
                if !ok || w.is_nil() {
                    continue;
                }
                for i in 0..k {
                    if v[i].time() == t {
                        levels[i] = 0;
                    }
                }
                let slot = next.entry(levels).or_insert_with(S::nil);
                *slot = slot.oplus(&w);
            }
        }
        states = next;
    }
    Ok(states.remove(&vec![0; k]).unwrap_or_else(S::nil))
}

/// Boolean semiring, used for feasibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Reach(bool);

impl Semiring for Reach {
    fn nil() -> Self {
        Reach(false)
    }
    fn unit() -> Self {
        Reach(true)
    }
    fn oplus(&self, o: &Self) -> Self {
        Reach(self.0 || o.0)
    }
    fn otimes(&self, o: &Self) -> Self {
        Reach(self.0 && o.0)
    }
    fn is_nil(&self) -> bool {
        !self.0
    }
}

/// Whether at least one non-intersecting multipath `U → V` exists.
/// Runs the anti-diagonal sweep in the boolean semiring, so it never
/// materializes multipaths.
pub fn is_endpoint_pair(dom: &DomainProfile, u: &[Point], v: &[Point]) -> bool {
    if validate(dom, u, v).is_err() {
        return false;
    }
    let quick_reject = u.iter().zip(v).any(|(a, b)| b.x < a.x || b.level > a.level);
    if quick_reject {
        return false;
    }
    matches!(transfer_sum(dom, u, v, &|_| Reach(true)), Ok(Reach(true)))
}

/// `↑_{r,m}`: replaces `(r, m+1)` by `(r, m)`, dropping it when `(r, m)`
/// is already present.
pub fn uparrow_rm(u: &[Point], r: usize, m: usize) -> Vec<Point> {
    let from = Point::new(r, m + 1);
    let to = Point::new(r, m);
    if !u.contains(&from) {
        return u.to_vec();
    }
    let collide = u.contains(&to);
    u.iter().filter_map(|&p| if p == from { (!collide).then_some(to) } else { Some(p) }).collect()
}

/// `↑U = ((u_i, n ∧ u_i))` for points on level `n`.
pub fn uparrow(u: &[Point], n: usize) -> Result<Vec<Point>> {
    if let Some(p) = u.iter().find(|p| p.level != n) {
        return Err(Error::InvalidInput(format!("{p} is not on level {n}")));
    }
    Ok(u.iter().map(|p| Point::new(p.x, n.min(p.x))).collect())
}

/// `↑ = ↑_{n−1} ∘ … ∘ ↑_1` with `↑_r = ↑_{r,r} ∘ … ∘ ↑_{r,n−1}`.
pub fn uparrow_composed(u: &[Point], n: usize) -> Vec<Point> {
    let mut out = u.to_vec();
    for r in 1..n {
        for m in (r..n).rev() {
            out = uparrow_rm(&out, r, m);
        }
    }
    out
}
