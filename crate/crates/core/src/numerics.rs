//! Scalar types shared by every module.
//!
//! The discrete theory is subtraction-free, so it runs on [`PosRational`].
//! Signed exact values (heights, determinants, matrix entries that may be
//! zero) use the plain [`Rational`] alias. The semi-discrete theory works in
//! the log domain with [`LogValue`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Signed exact rational.
pub type Rational = BigRational;

/// A strictly positive exact rational, always stored in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosRational(BigRational);

impl PosRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Self::from_rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_rational(q: Rational) -> Result<Self> {
        if q.is_positive() {
            Ok(PosRational(q))
        } else {
            Err(Error::InvalidInput(format!("{q} is not strictly positive")))
        }
    }

    pub fn from_integer(n: u64) -> Result<Self> {
        Self::new(n, 1u32)
    }

    pub fn one() -> Self {
        PosRational(BigRational::one())
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Self {
        PosRational(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        PosRational(num_traits::pow(self.0.clone(), e as usize))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    /// Natural logarithm, accurate even when numerator and denominator
    /// overflow `f64`.
    pub fn ln(&self) -> f64 {
        bigint_ln(self.numer()) - bigint_ln(self.denom())
    }
}

impl fmt::Display for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.0))
    }
}

impl FromStr for PosRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_rational(parse_rational(s)?)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a PosRational> for &'a PosRational {
            type Output = PosRational;
            fn $method(self, rhs: &'a PosRational) -> PosRational {
                PosRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for PosRational {
            type Output = PosRational;
            fn $method(self, rhs: PosRational) -> PosRational {
                PosRational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

/// `x^beta`, exactly.
pub fn rational_pow_beta(x: &PosRational, beta: u32) -> PosRational {
    x.pow(beta)
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse {s:?} as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = BigRational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical `"p/q"` form; integers print without a denominator.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    sign * (bigint_ln(&q.numer().abs()) - bigint_ln(q.denom())).exp()
}

fn bigint_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A positive mass stored as its natural logarithm; `-inf` is zero mass.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(pub f64);

impl LogValue {
    pub const ZERO_MASS: LogValue = LogValue(f64::NEG_INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero_mass(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// `log(Σ e^{v_i})` with a max shift. An empty list or a list of zero
/// masses gives exactly `-inf`.
pub fn logsumexp(values: &[LogValue]) -> LogValue {
    let max = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogValue::ZERO_MASS;
    }
    let sum: f64 = values.iter().map(|v| (v.0 - max).exp()).sum();
    LogValue(max + sum.ln())
}

/// Element of the max-plus semiring over exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropValue {
    NegInf,
    Finite(Rational),
}

impl TropValue {
    pub fn finite(q: Rational) -> Self {
        TropValue::Finite(q)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            TropValue::Finite(q) => Some(q),
            TropValue::NegInf => None,
        }
    }

    /// Semiring addition.
    pub fn max_with(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Semiring multiplication.
    pub fn plus(&self, other: &Self) -> Self {
        match (self, other) {
            (TropValue::Finite(a), TropValue::Finite(b)) => TropValue::Finite(a + b),
            _ => TropValue::NegInf,
        }
    }
}

impl PartialOrd for TropValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropValue::NegInf, TropValue::NegInf) => Ordering::Equal,
            (TropValue::NegInf, _) => Ordering::Less,
            (_, TropValue::NegInf) => Ordering::Greater,
            (TropValue::Finite(a), TropValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropValue::NegInf => write!(f, "-inf"),
            TropValue::Finite(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// The two semirings the kernels run over: `(+, ×)` on rationals and
/// `(max, +)` on [`TropValue`].
pub trait Semiring: Clone {
    fn nil() -> Self;
    fn unit() -> Self;
    fn oplus(&self, other: &Self) -> Self;
    fn otimes(&self, other: &Self) -> Self;
    fn is_nil(&self) -> bool;
}

impl Semiring for Rational {
    fn nil() -> Self {
        Rational::zero()
    }
    fn unit() -> Self {
        Rational::one()
    }
    fn oplus(&self, other: &Self) -> Self {
        self + other
    }
    fn otimes(&self, other: &Self) -> Self {
        self * other
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Semiring for TropValue {
    fn nil() -> Self {
        TropValue::NegInf
    }
    fn unit() -> Self {
        TropValue::Finite(Rational::zero())
    }
    fn oplus(&self, other: &Self) -> Self {
        self.max_with(other)
    }
    fn otimes(&self, other: &Self) -> Self {
        self.plus(other)
    }
    fn is_nil(&self) -> bool {
        matches!(self, TropValue::NegInf)
    }
}
