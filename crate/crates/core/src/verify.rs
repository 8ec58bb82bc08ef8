//! Outcome of an identity check: both sides, the deviation, and the first
//! counterexample when the identity fails.

use std::fmt::Display;

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
    /// `0` for exact checks that hold, `|lhs − rhs|` for numerical ones,
    /// `inf` for failed exact checks.
    pub deviation: f64,
    pub counterexample: Option<String>,
}

impl Verdict {
    pub fn exact<T: PartialEq + Display>(lhs: &T, rhs: &T, location: impl FnOnce() -> String) -> Self {
        let holds = lhs == rhs;
        Verdict {
            holds,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            deviation: if holds { 0.0 } else { f64::INFINITY },
            counterexample: (!holds).then(|| format!("{}: {lhs} != {rhs}", location())),
        }
    }

    pub fn within(lhs: f64, rhs: f64, tol: f64, location: impl FnOnce() -> String) -> Self {
        let deviation = (lhs - rhs).abs();
        let holds = deviation <= tol;
        Verdict {
            holds,
            lhs: format!("{lhs:.12}"),
            rhs: format!("{rhs:.12}"),
            deviation: if deviation.is_nan() { f64::INFINITY } else { deviation },
            counterexample: (!holds).then(|| format!("{}: |{lhs} - {rhs}| = {deviation:e} > {tol:e}", location())),
        }
    }

    /// Passes when every compared pair is equal; reports the first mismatch.
    pub fn all_equal<T: PartialEq + Display>(label: &str, pairs: impl IntoIterator<Item = (String, T, T)>) -> Self {
        let mut count = 0usize;
        for (location, lhs, rhs) in pairs {
            if lhs != rhs {
                return Verdict::exact(&lhs, &rhs, || location);
            }
            count += 1;
        }
        Verdict::passed(format!("{count} {label}"), format!("{count} {label}"))
    }

    pub fn passed(lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Verdict { holds: true, lhs: lhs.into(), rhs: rhs.into(), deviation: 0.0, counterexample: None }
    }

    pub fn failed(lhs: impl Into<String>, rhs: impl Into<String>, counterexample: impl Into<String>) -> Self {
        Verdict {
            holds: false,
            lhs: lhs.into(),
            rhs: rhs.into(),
            deviation: f64::INFINITY,
            counterexample: Some(counterexample.into()),
        }
    }

    /// The first failing verdict, or the last one when all hold.
    pub fn first_failure(verdicts: impl IntoIterator<Item = Verdict>) -> Option<Verdict> {
        let mut last = None;
        for v in verdicts {
            if !v.holds {
                return Some(v);
            }
            last = Some(v);
        }
        last
    }
}
