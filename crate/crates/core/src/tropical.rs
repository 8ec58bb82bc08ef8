//! Zero temperature: last passage values, the max-plus Pitman transforms,
//! `W⁰`, and the bridge to the polymer side through base-2 weights
//! `D_i = 2^{β f_i}`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{self, DomainProfile, Point};
use crate::matrix::SquareMatrix;
use crate::numerics::{format_rational, PosRational, Rational, TropValue};
use crate::partition::{self, WeightField};
use crate::pitman::StairFunction;
use crate::verify::Verdict;

/// A rational function on `[start, start + len − 1]` with the implicit
/// boundary value `f(start − 1) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    start: usize,
    values: Vec<Rational>,
}

impl HeightFunction {
    pub fn new(start: usize, values: Vec<Rational>) -> Result<Self> {
        if start == 0 {
            return Err(Error::InvalidInput("domain start must be at least 1".into()));
        }
        Ok(HeightFunction { start, values })
    }

    /// `f(x) = Σ_{y ≤ x} e_y` from increments `e_start, e_start+1, …`.
    pub fn from_increments(start: usize, increments: &[Rational]) -> Self {
        let mut acc = Rational::zero();
        let values = increments
            .iter()
            .map(|e| {
                acc += e;
                acc.clone()
            })
            .collect();
        HeightFunction { start, values }
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

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `f(x)` for `x` in `[start − 1, end]`.
    pub fn get(&self, x: usize) -> Option<Rational> {
        if x + 1 == self.start {
            Some(Rational::zero())
        } else if x >= self.start {
            self.values.get(x - self.start).cloned()
        } else {
            None
        }
    }

    /// `f(x)`; panics outside `[start − 1, end]`.
    pub fn at(&self, x: usize) -> Rational {
        self.get(x).unwrap_or_else(|| panic!("x={x} outside the table starting at {}", self.start))
    }

    /// `f(x) − f(x − 1)`.
    pub fn increment(&self, x: usize) -> Rational {
        self.at(x) - self.at(x - 1)
    }
}

/// Zero-temperature counterpart of [`WeightField`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightField {
    dom: DomainProfile,
    width: usize,
    tables: Vec<HeightFunction>,
}

impl HeightField {
    pub fn new(tables: Vec<HeightFunction>, width: usize) -> Result<Self> {
        let dom = DomainProfile::new(tables.iter().map(|t| t.start()).collect())?;
        if let Some((i, t)) = tables.iter().enumerate().find(|(_, t)| t.len() != (width + 1).saturating_sub(t.start())) {
            return Err(Error::InvalidInput(format!("level {} does not reach width {width} from {}", i + 1, t.start())));
        }
        Ok(HeightField { dom, width, tables })
    }

    /// Rectangular field from increments `inc[m−1][x−1] = f_m(x) − f_m(x − 1)`.
    pub fn from_increments(inc: &[Vec<Rational>]) -> Result<Self> {
        let width = inc.first().map(Vec::len).unwrap_or(0);
        if inc.iter().any(|row| row.len() != width) {
            return Err(Error::InvalidInput("increment rows differ in length".into()));
        }
        Self::new(inc.iter().map(|row| HeightFunction::from_increments(1, row)).collect(), width)
    }

    /// Random rectangular field with integer increments in `[−10, 10]`.
    pub fn random(rng: &mut impl Rng, n: usize, width: usize) -> Self {
        let inc: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..width).map(|_| Rational::from_integer(rng.gen_range(-10i64..=10).into())).collect())
            .collect();
        Self::from_increments(&inc).expect("well-formed by construction")
    }

    pub fn zeros(n: usize, width: usize) -> Self {
        Self::from_increments(&vec![vec![Rational::zero(); width]; n]).expect("well-formed by construction")
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

    pub fn level(&self, m: usize) -> &HeightFunction {
        &self.tables[m - 1]
    }

    pub fn increment(&self, p: Point) -> Result<Rational> {
        if !self.dom.contains(p) || p.x > self.width {
            return Err(Error::OutOfDomain { x: p.x, level: p.level });
        }
        Ok(self.tables[p.level - 1].increment(p.x))
    }

    /// Replaces `f_m(x)`; used to plant faults.
    pub fn with_value(&self, x: usize, m: usize, value: Rational) -> Result<Self> {
        self.increment(Point::new(x, m))?;
        let mut out = self.clone();
        let start = out.tables[m - 1].start;
        out.tables[m - 1].values[x - start] = value;
        Ok(out)
    }

    /// The polymer field `D_m(x) = 2^{β f_m(x)}`; needs integer heights.
    pub fn exponentiate(&self, beta: u32) -> Result<WeightField> {
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let values = t.values.iter().map(|v| power_of_two(v, beta)).collect::<Result<Vec<_>>>()?;
                StairFunction::new(t.start, values)
            })
            .collect::<Result<Vec<_>>>()?;
        WeightField::new(tables, self.width)
    }
}

fn power_of_two(v: &Rational, beta: u32) -> Result<PosRational> {
    if !v.is_integer() {
        return Err(Error::InvalidInput(format!("height {} is not an integer", format_rational(v))));
    }
    let e = (v.to_integer() * BigInt::from(beta))
        .to_i64()
        .filter(|e| e.unsigned_abs() < 1 << 20)
        .ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
    let p = PosRational::from_integer(2).expect("positive").pow(e.unsigned_abs() as u32);
    Ok(if e < 0 { p.recip() } else { p })
}

fn endpoints_ok(f: &HeightField, u: &[Point], v: &[Point]) -> Result<()> {
    if u.is_empty() || u.len() != v.len() {
        return Err(Error::InvalidInput(format!("need |U| = |V| ≥ 1, got {} and {}", u.len(), v.len())));
    }
    u.iter().chain(v).try_for_each(|p| f.increment(*p).map(|_| ()))
}

/// `f[U → V]⁰` by enumerating every multipath.
pub fn lpp_brute(f: &HeightField, u: &[Point], v: &[Point]) -> Result<Rational> {
    endpoints_ok(f, u, v)?;
    let mut best: Option<Rational> = None;
    let step = |acc: &Rational, p: Point| acc + f.tables[p.level - 1].increment(p.x);
    lattice::fold_multipaths(f.profile(), u, v, lattice::oracle_bound(), Rational::zero(), &step, &mut |e: &Rational| {
        if best.as_ref().is_none_or(|b| e > b) {
            best = Some(e.clone());
        }
    })?;
    best.ok_or(Error::EmptyPathSet)
}

/// `f[U → V]⁰` by the max-plus transfer sweep.
pub fn lpp_dp(f: &HeightField, u: &[Point], v: &[Point]) -> Result<Rational> {
    endpoints_ok(f, u, v)?;
    let weight = |p: Point| f.increment(p).map(TropValue::Finite).unwrap_or(TropValue::NegInf);
    match lattice::transfer_sum(f.profile(), u, v, &weight)? {
        TropValue::Finite(q) => Ok(q),
        TropValue::NegInf => Err(Error::EmptyPathSet),
    }
}

/// `f[U → V]⁰`, the maximal energy over multipaths.
pub fn lpp_value(f: &HeightField, u: &[Point], v: &[Point]) -> Result<TropValue> {
    lpp_dp(f, u, v).map(TropValue::Finite)
}

/// Max-plus `H⁰_r(E)`: `0` at `(i, i)` for `i < r`, `E(j) − E(i − 1)` at
/// `(i, j)` for `r ≤ i ≤ j`, `−∞` elsewhere.
pub fn h_matrix0(e: &HeightFunction, r: usize, size: usize) -> Result<SquareMatrix<TropValue>> {
    if e.start() != r {
        return Err(Error::DomainMismatch(format!("function starts at {}, H-matrix boundary is {r}", e.start())));
    }
    Ok(SquareMatrix::from_fn(size, |i, j| {
        if i < r {
            if i == j {
                TropValue::Finite(Rational::zero())
            } else {
                TropValue::NegInf
            }
        } else if i <= j {
            TropValue::Finite(e.at(j) - e.at(i - 1))
        } else {
            TropValue::NegInf
        }
    }))
}

/// `H⁰_{r_n}(f_n) ⋯ H⁰_{r_1}(f_1)`; entry `(u, v)` is the single-path
/// value from the lowest point of column `u` to `(v, 1)`.
pub fn h_product0(f: &HeightField) -> SquareMatrix<TropValue> {
    let size = f.width();
    let factors: Vec<_> = (1..=f.n())
        .rev()
        .map(|m| h_matrix0(f.level(m), f.profile().start(m), size).expect("tables cover the width"))
        .collect();
    SquareMatrix::product(size, &factors)
}

fn shared_start(f: &HeightFunction, g: &HeightFunction) -> Result<usize> {
    if f.start != g.start {
        return Err(Error::DomainMismatch(format!("domain starts {} and {} differ", f.start, g.start)));
    }
    Ok(f.start)
}

/// Running maxima `max_{m ∈ [r, x]} (g(m) − f(m − 1))`.
fn running_max(g: &HeightFunction, f: &HeightFunction) -> Vec<Rational> {
    let r = g.start;
    let len = g.len().min(f.len());
    let mut out: Vec<Rational> = Vec::with_capacity(len);
    for x in r..r + len {
        let term = g.at(x) - f.at(x - 1);
        let next = match out.last() {
            Some(prev) if *prev >= term => prev.clone(),
            _ => term,
        };
        out.push(next);
    }
    out
}

/// `(g ⊙ f)⁰(x) = f(x) + max_{m ∈ [r, x]} (g(m) − f(m − 1))`, start `r`.
pub fn odot0(g: &HeightFunction, f: &HeightFunction) -> Result<HeightFunction> {
    let r = shared_start(f, g)?;
    let values = running_max(g, f).into_iter().enumerate().map(|(i, s)| f.at(r + i) + s).collect();
    Ok(HeightFunction { start: r, values })
}

/// `(f ⊗ g)⁰(x) = g(x) − max_{m ∈ [r, x]} (g(m) − f(m − 1))`, start `r + 1`.
pub fn otimes0(f: &HeightFunction, g: &HeightFunction) -> Result<HeightFunction> {
    let r = shared_start(f, g)?;
    let values = running_max(g, f).into_iter().enumerate().skip(1).map(|(i, s)| g.at(r + i) - s).collect();
    Ok(HeightFunction { start: r + 1, values })
}

/// `T⁰(f, g) = ((g ⊙ f)⁰, (f ⊗ g)⁰)`.
pub fn tau0(f: &HeightFunction, g: &HeightFunction) -> Result<(HeightFunction, HeightFunction)> {
    Ok((odot0(g, f)?, otimes0(f, g)?))
}

/// `T⁰_{r,m}`, with the same profile rules as the positive-temperature map.
pub fn tau0_rm(f: &HeightField, r: usize, m: usize) -> Result<HeightField> {
    let n = f.n();
    if m == 0 || m >= n {
        return Err(Error::DomainMismatch(format!("slot m={m} needs 1 ≤ m ≤ n−1 with n={n}")));
    }
    let prof = f.profile();
    if prof.start(m) != r || prof.start(m + 1) != r || (m + 2 <= n && prof.start(m + 2) <= r) {
        return Err(Error::DomainMismatch(format!("T0_{{{r},{m}}} does not fit profile {:?}", prof.starts())));
    }
    let (upper, lower) = tau0(f.level(m), f.level(m + 1))?;
    let mut out = f.clone();
    out.dom.set_start(m + 1, lower.start);
    out.tables[m - 1] = upper;
    out.tables[m] = lower;
    Ok(out)
}

/// `S⁰_r = T⁰_{r,r} ∘ … ∘ T⁰_{r,n−1}`.
pub fn s0_r(f: &HeightField, r: usize) -> Result<HeightField> {
    let mut out = f.clone();
    for m in (r..f.n()).rev() {
        out = tau0_rm(&out, r, m)?;
    }
    Ok(out)
}

/// `W⁰ = S⁰_{n−1} ∘ … ∘ S⁰_1` on a rectangular field.
pub fn w0(f: &HeightField) -> Result<HeightField> {
    if f.profile().starts().iter().any(|&r| r != 1) {
        return Err(Error::DomainMismatch(format!("W0 needs a rectangular field, profile is {:?}", f.profile().starts())));
    }
    let mut out = f.clone();
    for r in 1..f.n() {
        out = s0_r(&out, r)?;
    }
    Ok(out)
}

/// `f[U → V]⁰ = (W⁰ f)[↑U → V]⁰` for `U` on level `n`, `V` on level 1.
pub fn check_dzero(f: &HeightField, us: &[usize], vs: &[usize]) -> Result<Verdict> {
    check_dzero_with(f, &w0(f)?, us, vs)
}

/// As [`check_dzero`] against a supplied transformed field.
pub fn check_dzero_with(f: &HeightField, wf: &HeightField, us: &[usize], vs: &[usize]) -> Result<Verdict> {
    let n = f.n();
    let u: Vec<Point> = us.iter().map(|&x| Point::new(x, n)).collect();
    let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
    let up = lattice::uparrow(&u, n)?;
    let lhs_dp = lpp_dp(f, &u, &v)?;
    let lhs_brute = lpp_brute(f, &u, &v)?;
    let rhs_dp = lpp_dp(wf, &up, &v)?;
    let rhs_brute = lpp_brute(wf, &up, &v)?;
    let show = |q: &Rational| TropValue::Finite(q.clone());
    let pairs = vec![
        ("f[U->V]0: DP vs brute force".to_string(), show(&lhs_dp), show(&lhs_brute)),
        ("(W0 f)[^U->V]0: DP vs brute force".to_string(), show(&rhs_dp), show(&rhs_brute)),
        ("f[U->V]0 vs (W0 f)[^U->V]0".to_string(), show(&lhs_dp), show(&rhs_dp)),
    ];
    let mut verdict = Verdict::all_equal("max-plus comparisons", pairs);
    if verdict.holds {
        verdict.lhs = format_rational(&lhs_dp);
        verdict.rhs = format_rational(&rhs_dp);
    }
    Ok(verdict)
}

/// One row of the β-interpolation: `S_β = Z_β / 2^{β f⁰}` where
/// `Z_β = D^β[U → V]`, so that the gap `β⁻¹ log₂ Z_β − f⁰` equals
/// `β⁻¹ log₂ S_β`.
#[derive(Clone, Debug)]
pub struct BridgeRow {
    pub beta: u32,
    pub ratio: PosRational,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub lpp: Rational,
    pub paths: BigInt,
    pub rows: Vec<BridgeRow>,
    pub verdict: Verdict,
}

/// For integer-valued `f`, checks `0 ≤ gap_β ≤ log₂|U → V| / β` and that the
/// gap does not increase along the increasing list `betas`, all exactly:
/// `1 ≤ S_β ≤ |U → V|` and `S_a^b ≥ S_b^a` for `a < b`.
pub fn beta_bridge(f: &HeightField, betas: &[u32], u: &[Point], v: &[Point]) -> Result<BridgeReport> {
    if betas.is_empty() || betas.windows(2).any(|w| w[0] >= w[1]) || betas[0] == 0 {
        return Err(Error::InvalidInput(format!("β list {betas:?} must be positive and increasing")));
    }
    let lpp = lpp_dp(f, u, v)?;
    let count_weight = |p: Point| if f.profile().contains(p) { Rational::one() } else { Rational::zero() };
    let paths = lattice::transfer_sum(f.profile(), u, v, &count_weight)?.to_integer();
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let d = f.exponentiate(beta)?;
        let z = partition::partition_function_transfer(&d, u, v)?;
        let scale = power_of_two(&lpp, beta)?;
        let ratio = &z / &scale;
        let gap = ratio.ln() / std::f64::consts::LN_2 / beta as f64;
        rows.push(BridgeRow { beta, ratio, gap });
    }
    let count = Rational::from_integer(paths.clone());
    let mut verdict = Verdict::passed(format!("{} betas", rows.len()), format!("{} betas", rows.len()));
    for row in &rows {
        let s = row.ratio.as_rational();
        if *s < Rational::one() {
            verdict = Verdict::failed(row.ratio.to_string(), ">= 1", format!("β={}: polymer value below the last passage value", row.beta));
            break;
        }
        if *s > count {
            verdict = Verdict::failed(
                row.ratio.to_string(),
                format!("<= {paths}"),
                format!("β={}: gap exceeds log2|U->V|/β", row.beta),
            );
            break;
        }
    }
    if verdict.holds {
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.ratio.pow(b.beta) < b.ratio.pow(a.beta) {
                verdict = Verdict::failed(
                    format!("{:.6}", a.gap),
                    format!("{:.6}", b.gap),
                    format!("gap increases from β={} to β={}", a.beta, b.beta),
                );
                break;
            }
        }
    }
    if verdict.holds {
        verdict.lhs = rows.iter().map(|r| format!("{:.6}", r.gap)).collect::<Vec<_>>().join(" ");
        verdict.rhs = format!("<= log2({paths})/β");
    }
    Ok(BridgeReport { lpp, paths, rows, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn unit_increments() {
        let f = HeightField::from_increments(&vec![vec![int(1); 3]; 2]).unwrap();
        let u = [Point::new(1, 2)];
        let v = [Point::new(3, 1)];
        assert_eq!(lpp_brute(&f, &u, &v).unwrap(), int(4));
        assert_eq!(lpp_dp(&f, &u, &v).unwrap(), int(4));
    }

    #[test]
    fn sum_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = HeightField::random(&mut rng, 2, 7);
        let (up, down) = tau0(f.level(1), f.level(2)).unwrap();
        for x in 2..=7 {
            assert_eq!(up.at(x) + down.at(x), f.level(1).at(x) + f.level(2).at(x));
        }
    }

    #[test]
    fn random_dzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = HeightField::random(&mut rng, 3, 6);
        assert!(check_dzero(&f, &[1, 2], &[5, 6]).unwrap().holds);
    }

    #[test]
    fn flat_bridge() {
        let f = HeightField::zeros(2, 3);
        let report = beta_bridge(&f, &[1, 2, 4, 8], &[Point::new(1, 2)], &[Point::new(3, 1)]).unwrap();
        assert!(report.verdict.holds);
        assert_eq!(report.paths, BigInt::from(3));
        for row in &report.rows {
            assert_eq!(row.ratio, PosRational::from_integer(3).unwrap());
        }
    }
}
