//! Positive-temperature identities checked numerically.

use crate::error::{Error, Result};
use crate::numerics::{rational_to_f64, Rational, TropValue};
use crate::verify::Verdict;

use super::cheb::{Cumulative, Grid};
use super::transform::{sd_pitman_t, sd_w, SdField};
use super::{free_energy, free_energy_env, oracle, zero, Environment, PLFunction, Scaled, SdEndpoints, GRADING};

/// Two floating-point sides and their comparison.
#[derive(Clone, Debug)]
pub struct SdReport {
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

fn needs_positive_starts(ends: &SdEndpoints, n: usize) -> Result<()> {
    if !ends.is_bottom_to_top(n) {
        return Err(Error::InvalidInput("starts must lie on level n and ends on level 1".into()));
    }
    if ends.starts.iter().any(|s| s.0 <= Rational::from_integer(0.into())) {
        return Err(Error::InvalidInput("transformed tuples are evaluated at start times, which must be positive".into()));
    }
    Ok(())
}

/// `f[U → V]` against `(W f)[U → V]`, within `tol`.
pub fn check_sdinv(f: &[PLFunction], ends: &SdEndpoints, tol: f64) -> Result<SdReport> {
    check_sdinv_with(f, &sd_w(f, tol / 4.0)?, ends, tol)
}

/// As [`check_sdinv`] against a supplied transformed tuple.
pub fn check_sdinv_with(f: &[PLFunction], wf: &dyn Environment, ends: &SdEndpoints, tol: f64) -> Result<SdReport> {
    needs_positive_starts(ends, f.len())?;
    let lhs = free_energy(f, ends, tol / 4.0)?.value();
    let rhs = free_energy_env(wf, ends, tol / 4.0)?.value();
    Ok(SdReport { lhs, rhs, verdict: Verdict::within(lhs, rhs, tol, || "f[U->V] vs (Wf)[U->V]".into()) })
}

/// `f[U → V]` against `(T_m f)[U → V]` for one `m`.
pub fn check_taum(f: &[PLFunction], ends: &SdEndpoints, m: usize, tol: f64) -> Result<SdReport> {
    needs_positive_starts(ends, f.len())?;
    let lhs = free_energy(f, ends, tol / 4.0)?.value();
    let rhs = free_energy_env(&sd_pitman_t(f, m, tol / 4.0)?, ends, tol / 4.0)?.value();
    Ok(SdReport { lhs, rhs, verdict: Verdict::within(lhs, rhs, tol, || format!("f[U->V] vs (T_{m} f)[U->V]")) })
}

/// `s(u,v) − s(0,v) − s(0,u) = log ∫_u^v e^{g − 2 s(0,t)}` with
/// `g = f_2 − f_1`: the left side by Gauss–Legendre, the right side from
/// the Chebyshev tables.
pub fn check_posdov(f: &[PLFunction], u: &Rational, v: &Rational, tol: f64) -> Result<SdReport> {
    if f.len() != 2 {
        return Err(Error::InvalidInput(format!("needs n = 2, got {}", f.len())));
    }
    let g = f[1].sub(&f[0])?.table();
    let (u, v) = (rational_to_f64(u), rational_to_f64(v));
    if !(0.0 < u && u < v) {
        return Err(Error::InvalidInput("needs 0 < u < v".into()));
    }
    let s = |x, y| oracle::log_exp_integral(&g, x, y, tol * 1e-3);
    let lhs = s(u, v)? - s(0.0, v)? - s(0.0, u)?;
    let mut must = g.knots.clone();
    must.extend([u, v]);
    let grid = Grid::build(rational_to_f64(f[0].horizon()), &must, GRADING, SdField::default_grid(f, 2).max_width());
    let c = Cumulative::new(&grid, |t| g.eval(t).exp());
    // the integrand grows like t^{-2} at 0, so accumulate from u only
    let d = Cumulative::new(&grid, |t| if t < u { 0.0 } else { g.eval(t).exp() / c.eval(t).powi(2) });
    let rhs = d.eval(v).ln();
    Ok(SdReport { lhs, rhs, verdict: Verdict::within(lhs, rhs, 10.0 * tol, || format!("posDOV at u={u} v={v}")) })
}

/// `(W f)_1(t) = f[(0, 2) → (t, 1)]` for two levels.
pub fn check_path_formula(f: &[PLFunction], t: &Rational, tol: f64) -> Result<SdReport> {
    if f.len() != 2 {
        return Err(Error::InvalidInput(format!("needs n = 2, got {}", f.len())));
    }
    let lhs = sd_w(f, tol / 4.0)?.value(1, rational_to_f64(t));
    let ends = SdEndpoints::bottom_to_top(&[Rational::from_integer(0.into())], std::slice::from_ref(t), 2)?;
    let rhs = free_energy(f, &ends, tol / 4.0)?.value();
    Ok(SdReport { lhs, rhs, verdict: Verdict::within(lhs, rhs, tol, || format!("path formula at t={t}")) })
}

#[derive(Clone, Debug)]
pub struct LaplaceRow {
    pub beta: f64,
    /// `(β f)[U → V] / β − f⁰[U → V]`.
    pub gap: f64,
    /// `log(vol) / β`, where `vol` is the jump-time simplex volume.
    pub bound: f64,
}

/// The β-scaled free energies against the exact zero-temperature value;
/// fails when a gap exceeds its bound by more than `slack`.
pub fn laplace_check(f: &[PLFunction], ends: &SdEndpoints, betas: &[f64], tol: f64, slack: f64) -> Result<(Vec<LaplaceRow>, Verdict)> {
    let exact = match zero::free_energy0(f, ends)? {
        TropValue::Finite(q) => rational_to_f64(&q),
        TropValue::NegInf => return Err(Error::EmptyPathSet),
    };
    let flat = vec![PLFunction::zero(f[0].horizon().clone()); f.len()];
    let log_vol = free_energy(&flat, ends, tol)?.value();
    let mut rows = Vec::new();
    let mut verdict = Verdict::passed("gaps within log(vol)/beta", "bounds");
    for &beta in betas {
        let scaled = free_energy_env(&Scaled::new(f, beta), ends, tol)?.value() / beta;
        let row = LaplaceRow { beta, gap: scaled - exact, bound: log_vol / beta };
        if verdict.holds && row.gap > row.bound + slack {
            verdict = Verdict::failed(
                format!("{:.6e}", row.gap),
                format!("{:.6e}", row.bound),
                format!("Laplace gap above log(vol)/beta at beta={beta}"),
            );
        }
        rows.push(row);
    }
    Ok((rows, verdict))
}
