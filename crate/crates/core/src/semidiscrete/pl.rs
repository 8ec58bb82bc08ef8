//! Continuous piecewise-linear functions on `[0, T]` with exact rational
//! breakpoints and values, `f(0) = 0`.

use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{format_rational, rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    /// Strictly increasing, first entry `0`.
    knots: Vec<Rational>,
    values: Vec<Rational>,
}

impl PLFunction {
    pub fn new(knots: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "need at least two breakpoints with one value each, got {} and {}",
                knots.len(),
                values.len()
            )));
        }
        if !knots[0].is_zero() {
            return Err(Error::InvalidInput("first breakpoint must be 0".into()));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidInput("value at 0 must be 0".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        Ok(PLFunction { knots, values })
    }

    pub fn zero(horizon: Rational) -> Self {
        PLFunction { knots: vec![Rational::zero(), horizon], values: vec![Rational::zero(), Rational::zero()] }
    }

    /// `t ↦ slope · t` on `[0, T]`.
    pub fn linear(horizon: Rational, slope: Rational) -> Self {
        let end = &slope * &horizon;
        PLFunction { knots: vec![Rational::zero(), horizon], values: vec![Rational::zero(), end] }
    }

    /// Random function with `breaks` interior breakpoints at multiples of
    /// `T / 64` and values at multiples of `1/8` in `[−amp, amp]`.
    pub fn random(rng: &mut impl Rng, horizon: &Rational, breaks: usize, amp: i64) -> Self {
        let grid = 64i64;
        let mut inner: Vec<i64> = rand::seq::index::sample(rng, (grid - 1) as usize, breaks.min(grid as usize - 1))
            .into_iter()
            .map(|i| i as i64 + 1)
            .collect();
        inner.sort_unstable();
        let mut knots = vec![Rational::zero()];
        knots.extend(inner.iter().map(|&i| horizon * Rational::new(i.into(), grid.into())));
        knots.push(horizon.clone());
        let mut values = vec![Rational::zero()];
        for _ in 1..knots.len() {
            values.push(Rational::new(rng.gen_range(-8 * amp..=8 * amp).into(), 8.into()));
        }
        PLFunction { knots, values }
    }

    pub fn knots(&self) -> &[Rational] {
        &self.knots
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn horizon(&self) -> &Rational {
        self.knots.last().expect("at least two knots")
    }

    fn segment(&self, t: &Rational) -> usize {
        match self.knots.binary_search(t) {
            Ok(i) => i.min(self.knots.len() - 2),
            Err(i) => i.clamp(1, self.knots.len() - 1) - 1,
        }
    }

    /// Exact value; `t` is clamped to `[0, T]`.
    pub fn eval(&self, t: &Rational) -> Rational {
        let i = self.segment(t);
        let (a, b) = (&self.knots[i], &self.knots[i + 1]);
        let (fa, fb) = (&self.values[i], &self.values[i + 1]);
        let t = t.clamp(&self.knots[0], self.horizon());
        fa + (fb - fa) * (t - a) / (b - a)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.table().eval(t)
    }

    /// Floating-point copy for repeated evaluation.
    pub fn table(&self) -> PLTable {
        PLTable { knots: self.knots.iter().map(rational_to_f64).collect(), values: self.values.iter().map(rational_to_f64).collect() }
    }

    /// Slope on the segment containing `t` (right derivative).
    pub fn slope_at(&self, t: &Rational) -> Rational {
        let i = self.segment(t);
        (&self.values[i + 1] - &self.values[i]) / (&self.knots[i + 1] - &self.knots[i])
    }

    /// Largest absolute slope.
    pub fn max_slope(&self) -> f64 {
        (0..self.knots.len() - 1)
            .map(|i| rational_to_f64(&((&self.values[i + 1] - &self.values[i]) / (&self.knots[i + 1] - &self.knots[i])).abs()))
            .fold(0.0, f64::max)
    }

    /// Re-samples on the union of breakpoints with `other`.
    fn merged_knots(&self, other: &PLFunction) -> Result<Vec<Rational>> {
        if self.horizon() != other.horizon() {
            return Err(Error::DomainMismatch(format!(
                "horizons {} and {} differ",
                format_rational(self.horizon()),
                format_rational(other.horizon())
            )));
        }
        let mut knots: Vec<Rational> = self.knots.iter().chain(&other.knots).cloned().collect();
        knots.sort();
        knots.dedup();
        Ok(knots)
    }

    /// `a · self + b · other`.
    pub fn combine(&self, a: &Rational, other: &PLFunction, b: &Rational) -> Result<PLFunction> {
        let knots = self.merged_knots(other)?;
        let values = knots.iter().map(|t| a * self.eval(t) + b * other.eval(t)).collect();
        Ok(PLFunction { knots, values }.simplified())
    }

    pub fn add(&self, other: &PLFunction) -> Result<PLFunction> {
        self.combine(&Rational::from_integer(1.into()), other, &Rational::from_integer(1.into()))
    }

    pub fn sub(&self, other: &PLFunction) -> Result<PLFunction> {
        self.combine(&Rational::from_integer(1.into()), other, &Rational::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Rational) -> PLFunction {
        PLFunction { knots: self.knots.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// `t ↦ sup_{s ∈ [0, t]} f(s)`, exact; crossings of the running maximum
    /// become new breakpoints.
    pub fn running_max(&self) -> PLFunction {
        let mut knots = vec![self.knots[0].clone()];
        let mut values = vec![self.values[0].clone()];
        let mut best = self.values[0].clone();
        for i in 0..self.knots.len() - 1 {
            let (a, b) = (&self.knots[i], &self.knots[i + 1]);
            let (fa, fb) = (&self.values[i], &self.values[i + 1]);
            if *fb > best {
                if *fa < best {
                    let cross = a + (&best - fa) * (b - a) / (fb - fa);
                    knots.push(cross);
                    values.push(best.clone());
                }
                best = fb.clone();
            }
            knots.push(b.clone());
            values.push(best.clone());
        }
        PLFunction { knots, values }.simplified()
    }

    /// Drops breakpoints where the slope does not change.
    pub fn simplified(mut self) -> PLFunction {
        let mut keep_k = vec![self.knots[0].clone()];
        let mut keep_v = vec![self.values[0].clone()];
        for i in 1..self.knots.len() {
            let last = keep_k.len() - 1;
            if i + 1 < self.knots.len() {
                let s1 = (&self.values[i] - &keep_v[last]) / (&self.knots[i] - &keep_k[last]);
                let s2 = (&self.values[i + 1] - &self.values[i]) / (&self.knots[i + 1] - &self.knots[i]);
                if s1 == s2 {
                    continue;
                }
            }
            keep_k.push(std::mem::take(&mut self.knots[i]));
            keep_v.push(std::mem::take(&mut self.values[i]));
        }
        PLFunction { knots: keep_k, values: keep_v }
    }
}

/// A piecewise-linear function in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct PLTable {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PLTable {
    /// Linear interpolation, clamped to the end values outside the knots.
    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let t = t.clamp(k[0], k[k.len() - 1]);
        let i = k.partition_point(|&x| x <= t).clamp(1, k.len() - 1) - 1;
        let (fa, fb) = (self.values[i], self.values[i + 1]);
        fa + (fb - fa) * (t - k[i]) / (k[i + 1] - k[i])
    }
}

impl fmt::Display for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> =
            self.knots.iter().zip(&self.values).map(|(t, v)| format!("({}, {})", format_rational(t), format_rational(v))).collect();
        write!(f, "[{}]", pts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn pl(pts: &[(&str, &str)]) -> PLFunction {
        PLFunction::new(pts.iter().map(|p| r(p.0)).collect(), pts.iter().map(|p| r(p.1)).collect()).unwrap()
    }

    #[test]
    fn evaluation_and_slopes() {
        let f = pl(&[("0", "0"), ("1/2", "1"), ("1", "-1")]);
        assert_eq!(f.eval(&r("1/4")), r("1/2"));
        assert_eq!(f.eval(&r("3/4")), r("0"));
        assert_eq!(f.slope_at(&r("1/2")), r("-4"));
        assert!((f.eval_f64(0.75)).abs() < 1e-15);
    }

    #[test]
    fn running_max_inserts_crossings() {
        let f = pl(&[("0", "0"), ("1/4", "1"), ("1/2", "-1"), ("1", "3")]);
        let m = f.running_max();
        assert_eq!(m.eval(&r("1/2")), r("1"));
        // f returns to 1 at t = 1/2 + (2/4)·(1/2) = 3/4
        assert_eq!(m.eval(&r("3/4")), r("1"));
        assert_eq!(m.eval(&r("7/8")), r("2"));
        assert!(m.knots().contains(&r("3/4")));
    }

    #[test]
    fn combination_merges_breakpoints() {
        let f = pl(&[("0", "0"), ("1/3", "1"), ("1", "0")]);
        let g = pl(&[("0", "0"), ("2/3", "2"), ("1", "1")]);
        let h = f.sub(&g).unwrap();
        assert_eq!(h.knots().len(), 4);
        assert_eq!(h.eval(&r("2/3")), f.eval(&r("2/3")) - r("2"));
    }
}
