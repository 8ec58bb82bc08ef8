//! Adaptive composite Gauss–Legendre quadrature, used as an independent
//! check on the Chebyshev tables.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

use super::PLTable;

const ORDER: usize = 10;
const MAX_DEPTH: usize = 40;

/// `∫_a^b h`, split at `breaks` and bisected until each piece agrees with
/// its two halves to `tol` relative to the running total.
pub fn integrate(h: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let rule = GaussLegendre::new(NonZeroUsize::new(ORDER).expect("positive order"));
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let whole = rule.integrate(w[0], w[1], h);
        total += refine(&rule, h, w[0], w[1], whole, tol, 0)?;
    }
    Ok(total)
}

fn refine(rule: &GaussLegendre, h: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, h);
    let right = rule.integrate(mid, b, h);
    let split = left + right;
    if (split - whole).abs() <= tol * split.abs().max(f64::MIN_POSITIVE) {
        return Ok(split);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!("no convergence on [{a}, {b}]")));
    }
    Ok(refine(rule, h, a, mid, left, tol, depth + 1)? + refine(rule, h, mid, b, right, tol, depth + 1)?)
}

/// `s(x, y) = log ∫_x^y e^{g}` for piecewise-linear `g`.
pub fn log_exp_integral(g: &PLTable, x: f64, y: f64, tol: f64) -> Result<f64> {
    integrate(&|t| g.eval(t).exp(), x, y, &g.knots, tol).map(f64::ln)
}

/// `log ∫_u^v e^{g(t) − 2 s(0, t)} dt` with the inner integral nested.
pub fn log_pitman_integral(g: &PLTable, u: f64, v: f64, tol: f64) -> Result<f64> {
    let inner = |t: f64| log_exp_integral(g, 0.0, t, tol).unwrap_or(f64::NAN);
    let value = integrate(&|t| (g.eval(t) - 2.0 * inner(t)).exp(), u, v, &g.knots, tol)?;
    if value.is_nan() {
        return Err(Error::Quadrature("inner integral failed".into()));
    }
    Ok(value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_kink() {
        let got = integrate(&|t| t * t, 0.0, 3.0, &[], 1e-14).unwrap();
        assert!((got - 9.0).abs() < 1e-12);
        let got = integrate(&|t: f64| (t - 1.0).abs(), 0.0, 3.0, &[1.0], 1e-14).unwrap();
        assert!((got - 2.5).abs() < 1e-12);
    }

    #[test]
    fn flat_pitman_integral() {
        let g = PLTable { knots: vec![0.0, 4.0], values: vec![0.0, 0.0] };
        let (u, v) = (1.0f64, 3.0);
        let want = ((v - u) / (u * v)).ln();
        assert!((log_pitman_integral(&g, u, v, 1e-12).unwrap() - want).abs() < 1e-10);
        assert!((log_exp_integral(&g, u, v, 1e-12).unwrap() - 2f64.ln()).abs() < 1e-12);
    }
}
