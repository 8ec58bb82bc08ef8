//! Weight fields and partition functions `D[U → V]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{self, DomainProfile, Multipath, Point};
use crate::matrix::{determinant, TriMatrix};
use crate::numerics::{PosRational, Rational};
use crate::pitman::StairFunction;

/// The environment: functions `D_1, …, D_n` with level `i` tabulated on
/// `[r_i, N]`. The boundary value `D_i(r_i − 1) = 1` is implicit.
///
/// Transformed fields (images under `T_{r,m}` and `W`) use the same type;
/// only their profile differs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightField {
    dom: DomainProfile,
    width: usize,
    tables: Vec<StairFunction>,
}

impl WeightField {
    pub fn new(tables: Vec<StairFunction>, width: usize) -> Result<Self> {
        let dom = DomainProfile::new(tables.iter().map(|t| t.start()).collect())?;
        for (i, t) in tables.iter().enumerate() {
            let expected = (width + 1).saturating_sub(t.start());
            if t.len() != expected {
                return Err(Error::InvalidInput(format!(
                    "level {} covers {} columns from {}, expected through width {width}",
                    i + 1,
                    t.len(),
                    t.start()
                )));
            }
        }
        Ok(WeightField { dom, width, tables })
    }

    /// Rectangular field from vertex weights `d[m−1][x−1] = d(x, m)`.
    pub fn from_vertex_weights(d: &[Vec<PosRational>]) -> Result<Self> {
        let width = d.first().map(|row| row.len()).unwrap_or(0);
        if d.iter().any(|row| row.len() != width) {
            return Err(Error::InvalidInput("vertex weight rows differ in length".into()));
        }
        Self::new(d.iter().map(|row| StairFunction::from_increments(1, row)).collect(), width)
    }

    /// Random rectangular field, vertex weights `p/q` with `p, q ∈ [1, 20]`.
    pub fn random(rng: &mut impl Rng, n: usize, width: usize) -> Self {
        let d: Vec<Vec<PosRational>> = (0..n)
            .map(|_| (0..width).map(|_| random_weight(rng)).collect())
            .collect();
        Self::from_vertex_weights(&d).expect("well-formed by construction")
    }

    pub fn all_ones(n: usize, width: usize) -> Self {
        Self::from_vertex_weights(&vec![vec![PosRational::one(); width]; n]).expect("well-formed by construction")
    }

    pub fn n(&self) -> usize {
        self.tables.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn profile(&self) -> &DomainProfile {
        &self.dom
    }

    pub fn level(&self, m: usize) -> &StairFunction {
        &self.tables[m - 1]
    }

    pub fn levels(&self) -> &[StairFunction] {
        &self.tables
    }

    /// `D_m(x)` for `x ∈ [r_m − 1, N]`.
    pub fn value(&self, x: usize, m: usize) -> Result<PosRational> {
        self.tables
            .get(m.wrapping_sub(1))
            .and_then(|t| t.get(x))
            .ok_or(Error::OutOfDomain { x, level: m })
    }

    /// Vertex weight `d(x, m) = D_m(x) / D_m(x − 1)`.
    pub fn vertex_weight(&self, p: Point) -> Result<PosRational> {
        self.check_point(p)?;
        Ok(self.tables[p.level - 1].increment(p.x))
    }

    fn check_point(&self, p: Point) -> Result<()> {
        if self.dom.contains(p) && p.x <= self.width {
            Ok(())
        } else {
            Err(Error::OutOfDomain { x: p.x, level: p.level })
        }
    }

    /// Replaces `D_m(x)`; used to plant faults in tests.
    pub fn with_value(&self, x: usize, m: usize, value: PosRational) -> Result<Self> {
        self.check_point(Point::new(x, m))?;
        let mut out = self.clone();
        let start = out.tables[m - 1].start();
        out.tables[m - 1].values_mut()[x - start] = value;
        Ok(out)
    }

    pub(crate) fn replace_pair(&mut self, m: usize, upper: StairFunction, lower: StairFunction) {
        self.dom.set_start(m + 1, lower.start());
        self.tables[m - 1] = upper;
        self.tables[m] = lower;
    }
}

pub fn random_weight(rng: &mut impl Rng) -> PosRational {
    PosRational::new(rng.gen_range(1u32..=20), rng.gen_range(1u32..=20)).expect("positive by construction")
}

/// `D[S] = Π_{(x,m) ∈ S} D_m(x) / D_m(x − 1)`.
pub fn set_weight(d: &WeightField, s: &[Point]) -> Result<PosRational> {
    s.iter().try_fold(PosRational::one(), |acc, p| Ok(&acc * &d.vertex_weight(*p)?))
}

/// Product of vertex weights over every point of the multipath.
pub fn path_weight(d: &WeightField, pi: &Multipath) -> Result<PosRational> {
    pi.points().try_fold(PosRational::one(), |acc, p| Ok(&acc * &d.vertex_weight(*p)?))
}

fn check_endpoints(d: &WeightField, u: &[Point], v: &[Point]) -> Result<()> {
    if u.is_empty() || u.len() != v.len() {
        return Err(Error::InvalidInput(format!("need |U| = |V| ≥ 1, got {} and {}", u.len(), v.len())));
    }
    u.iter().chain(v).try_for_each(|p| d.check_point(*p))
}

/// Brute-force `D[U → V]` by enumerating every multipath, with the
/// enumeration bound from [`lattice::oracle_bound`].
pub fn partition_function_brute(d: &WeightField, u: &[Point], v: &[Point]) -> Result<PosRational> {
    partition_function_brute_bounded(d, u, v, lattice::oracle_bound())
}

pub fn partition_function_brute_bounded(d: &WeightField, u: &[Point], v: &[Point], bound: u128) -> Result<PosRational> {
    check_endpoints(d, u, v)?;
    // Every multipath U → V has the same number of points, so scaling all
    // vertex weights by a common denominator L turns the sum into integer
    // arithmetic divided by L^points at the end.
    let lo = u.iter().map(|p| p.x).min().unwrap_or(1);
    let hi = v.iter().map(|p| p.x).max().unwrap_or(1);
    let mut lcm = BigInt::one();
    for m in 1..=d.n() {
        for x in lo.max(d.profile().start(m))..=hi {
            lcm = lcm.lcm(d.vertex_weight(Point::new(x, m))?.denom());
        }
    }
    let scaled = |p: Point| -> BigInt {
        let w = d.tables[p.level - 1].increment(p.x);
        w.numer() * (&lcm / w.denom())
    };
    let points: usize = u.iter().zip(v).map(|(a, b)| (b.x + a.level).saturating_sub(a.x + b.level) + 1).sum();
    let mut total = BigInt::zero();
    let step = |acc: &BigInt, p: Point| acc * scaled(p);
    lattice::fold_multipaths(d.profile(), u, v, bound, BigInt::one(), &step, &mut |acc: &BigInt| total += acc)?;
    if total.is_zero() {
        return Err(Error::EmptyPathSet);
    }
    let scale = num_traits::pow(lcm, points);
    PosRational::from_rational(Rational::new(total, scale))
}

/// Single-path partition function `D[a → b]`, zero when no path exists.
pub fn single_path_partition(d: &WeightField, a: Point, b: Point) -> Result<Rational> {
    d.check_point(a)?;
    d.check_point(b)?;
    if b.x < a.x || b.level > a.level {
        return Ok(Rational::zero());
    }
    let cols = b.x - a.x + 1;
    // z[l][c]: level a.level − l, column a.x + c
    let rows = a.level - b.level + 1;
    let mut z = vec![vec![Rational::zero(); cols]; rows];
    for l in 0..rows {
        let level = a.level - l;
        for c in 0..cols {
            let p = Point::new(a.x + c, level);
            if !d.profile().contains(p) {
                continue;
            }
            let inflow = if l == 0 && c == 0 {
                Rational::one()
            } else {
                let left = if c > 0 { z[l][c - 1].clone() } else { Rational::zero() };
                let below = if l > 0 { z[l - 1][c].clone() } else { Rational::zero() };
                left + below
            };
            z[l][c] = inflow * d.vertex_weight(p)?.as_rational();
        }
    }
    Ok(z[rows - 1][cols - 1].clone())
}

/// Whether every source sits on the lower boundary of its column, every
/// sink on level 1, and both lists are sorted by column. For such
/// endpoints only the identity pairing admits non-intersecting paths, so
/// the LGV determinant equals the multipath sum.
pub fn lgv_applicable(dom: &DomainProfile, u: &[Point], v: &[Point]) -> bool {
    let sorted = |ps: &[Point]| ps.windows(2).all(|w| w[0].x < w[1].x);
    sorted(u)
        && sorted(v)
        && v.iter().all(|p| p.level == 1)
        && u.iter().all(|p| dom.bottom_level_at(p.x) == Some(p.level))
}

/// `D[U → V]` as the determinant of single-path partition functions.
pub fn partition_function_lgv(d: &WeightField, u: &[Point], v: &[Point]) -> Result<PosRational> {
    check_endpoints(d, u, v)?;
    if !lgv_applicable(d.profile(), u, v) {
        return Err(Error::InvalidInput("LGV route needs boundary sources and level-1 sinks in column order".into()));
    }
    let k = u.len();
    let mut entries = Vec::with_capacity(k * k);
    for a in u {
        for b in v {
            entries.push(single_path_partition(d, *a, *b)?);
        }
    }
    let m = TriMatrix::from_fn(k, |i, j| entries[(i - 1) * k + (j - 1)].clone());
    PosRational::from_rational(determinant(&m)).map_err(|_| Error::EmptyPathSet)
}

/// `D[U → V]` through the H-matrix product `H_{r_n}(D_n) ⋯ H_{r_1}(D_1)`,
/// whose `(u, v)` entry is the single-path sum from the bottom of column
/// `u` to `(v, 1)`, followed by an LGV minor.
pub fn partition_function_h(d: &WeightField, u: &[Point], v: &[Point]) -> Result<PosRational> {
    check_endpoints(d, u, v)?;
    if !lgv_applicable(d.profile(), u, v) {
        return Err(Error::InvalidInput("H-matrix route needs boundary sources and level-1 sinks in column order".into()));
    }
    let m = crate::grsk::h_product(d);
    let rows: Vec<usize> = u.iter().map(|p| p.x).collect();
    let cols: Vec<usize> = v.iter().map(|p| p.x).collect();
    PosRational::from_rational(determinant(&m.submatrix(&rows, &cols))).map_err(|_| Error::EmptyPathSet)
}

/// `D[U → V]` by the anti-diagonal transfer sweep; valid for any endpoints.
pub fn partition_function_transfer(d: &WeightField, u: &[Point], v: &[Point]) -> Result<PosRational> {
    check_endpoints(d, u, v)?;
    let weight = |p: Point| d.vertex_weight(p).map(PosRational::into_rational).unwrap_or_else(|_| Rational::zero());
    let z = lattice::transfer_sum(d.profile(), u, v, &weight)?;
    PosRational::from_rational(z).map_err(|_| Error::EmptyPathSet)
}

/// `D[U → V]`. Uses the LGV determinant when the endpoints allow it and the
/// transfer sweep otherwise. Fails with [`Error::EmptyPathSet`] when
/// `(U, V)` is not an endpoint pair.
pub fn partition_function(d: &WeightField, u: &[Point], v: &[Point]) -> Result<PosRational> {
    check_endpoints(d, u, v)?;
    if !lattice::is_endpoint_pair(d.profile(), u, v) {
        return Err(Error::EmptyPathSet);
    }
    if lgv_applicable(d.profile(), u, v) {
        partition_function_lgv(d, u, v)
    } else {
        partition_function_transfer(d, u, v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `D[U → V] / D[U]`
    Left,
    /// `D[U → V] / D[V]`
    Right,
}

pub fn partition_half_open(d: &WeightField, u: &[Point], v: &[Point], side: Side) -> Result<PosRational> {
    let closed = partition_function(d, u, v)?;
    let removed = match side {
        Side::Left => set_weight(d, u)?,
        Side::Right => set_weight(d, v)?,
    };
    Ok(&closed / &removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> PosRational {
        s.parse().unwrap()
    }

    fn pts(list: &[(usize, usize)]) -> Vec<Point> {
        list.iter().map(|&(x, l)| Point::new(x, l)).collect()
    }

    #[test]
    fn set_weight_examples() {
        let d = WeightField::new(vec![StairFunction::new(1, vec![q("2"), q("6")]).unwrap()], 2).unwrap();
        assert_eq!(set_weight(&d, &pts(&[(1, 1), (2, 1)])).unwrap(), q("6"));
        assert_eq!(set_weight(&d, &[]).unwrap(), PosRational::one());
        let ones = WeightField::all_ones(3, 4);
        assert_eq!(set_weight(&ones, &pts(&[(1, 1), (4, 3)])).unwrap(), PosRational::one());
        assert!(set_weight(&d, &pts(&[(3, 1)])).is_err());
    }

    #[test]
    fn counting_paths_with_unit_weights() {
        let ones = WeightField::all_ones(2, 3);
        let (u, v) = (pts(&[(1, 2)]), pts(&[(3, 1)]));
        let three = q("3");
        assert_eq!(partition_function_brute(&ones, &u, &v).unwrap(), three);
        assert_eq!(partition_function(&ones, &u, &v).unwrap(), three);
        assert_eq!(partition_function_h(&ones, &u, &v).unwrap(), three);
        assert_eq!(partition_function_transfer(&ones, &u, &v).unwrap(), three);
    }

    #[test]
    fn two_level_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = WeightField::random(&mut rng, 2, 7);
        for u in 1..=7 {
            for v in u..=7 {
                let z = partition_function(&d, &pts(&[(u, 2)]), &pts(&[(v, 1)])).unwrap();
                let mut sum = d.value(u, 2).unwrap() / d.value(u - 1, 1).unwrap();
                for m in u + 1..=v {
                    sum = sum + d.value(m, 2).unwrap() / d.value(m - 1, 1).unwrap();
                }
                let expected = &(&d.value(v, 1).unwrap() / &d.value(u - 1, 2).unwrap()) * &sum;
                assert_eq!(z, expected, "u={u} v={v}");
            }
        }
    }

    #[test]
    fn singletons_and_half_open() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = WeightField::random(&mut rng, 3, 5);
        let p = pts(&[(4, 1)]);
        let w = d.vertex_weight(p[0]).unwrap();
        assert_eq!(partition_function_brute(&d, &p, &p).unwrap(), w);
        assert_eq!(partition_half_open(&d, &p, &p, Side::Left).unwrap(), PosRational::one());
        let (u, v) = (pts(&[(1, 3), (3, 3)]), pts(&[(2, 1), (5, 1)]));
        let closed = partition_function_brute(&d, &u, &v).unwrap();
        assert_eq!(partition_half_open(&d, &u, &v, Side::Left).unwrap(), &closed / &set_weight(&d, &u).unwrap());
        assert_eq!(partition_half_open(&d, &u, &v, Side::Right).unwrap(), &closed / &set_weight(&d, &v).unwrap());
    }

    #[test]
    fn empty_path_set_is_an_error() {
        let d = WeightField::all_ones(2, 4);
        let (u, v) = (pts(&[(1, 2), (2, 2)]), pts(&[(4, 1), (4, 1)]));
        assert_eq!(partition_function(&d, &u, &v), Err(Error::EmptyPathSet));
        assert_eq!(partition_function_brute(&d, &pts(&[(3, 2)]), &pts(&[(1, 1)])), Err(Error::EmptyPathSet));
    }

    #[test]
    fn horizontal_run_telescopes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = WeightField::random(&mut rng, 2, 6);
        let run: Vec<Point> = (2..=5).map(|x| Point::new(x, 2)).collect();
        let pi = Multipath { paths: vec![run] };
        assert_eq!(path_weight(&d, &pi).unwrap(), &d.value(5, 2).unwrap() / &d.value(1, 2).unwrap());
    }
}
