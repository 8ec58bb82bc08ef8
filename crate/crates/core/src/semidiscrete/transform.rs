//! `(T_i f)(t) = f(t) + log ∫_0^t e^{f_{i+1} − f_i} (e_i − e_{i+1})` and
//! `W f = S_{n−1} ⋯ S_1 f` with `S_r = T_r T_{r+1} ⋯ T_{n−1}`.
//!
//! Every transform only adds logarithms of cumulative integrals, so a
//! transformed tuple is `h_i = f_i + Σ_m c_{i,m} ln C_m` with integer `c`
//! and each `C_m` tabulated as a piecewise Chebyshev antiderivative.

use crate::error::{Error, Result};
use crate::numerics::rational_to_f64;

use super::cheb::{Cumulative, Grid};
use super::{check_horizons, Environment, PLFunction, PLTable, GRADING, MAX_HALVINGS};

/// Default lower end of sampling grids, as a fraction of `T`.
pub const T_MIN_FRACTION: f64 = 1e-4;

/// A transformed tuple; approximate, defined for `t > 0`.
#[derive(Clone, Debug)]
pub struct SdField {
    base: Vec<PLTable>,
    knots: Vec<f64>,
    horizon: f64,
    grid: Grid,
    cums: Vec<Cumulative>,
    coef: Vec<Vec<i32>>,
}

impl SdField {
    /// The untransformed tuple `f` on `grid`.
    pub fn new(f: &[PLFunction], grid: Grid) -> Result<Self> {
        check_horizons(f)?;
        Ok(SdField {
            base: f.iter().map(PLFunction::table).collect(),
            knots: f.iter().flat_map(|g| g.knots().iter().map(rational_to_f64)).collect(),
            horizon: rational_to_f64(f[0].horizon()),
            grid,
            cums: Vec::new(),
            coef: vec![Vec::new(); f.len()],
        })
    }

    /// Grid with cells no wider than `T / (16 · 2^refine)`, cut at every
    /// breakpoint and graded toward 0.
    pub fn default_grid(f: &[PLFunction], refine: u32) -> Grid {
        let t = rational_to_f64(f[0].horizon());
        let knots: Vec<f64> = f.iter().flat_map(|g| g.knots().iter().map(rational_to_f64)).collect();
        let slope = f.iter().map(PLFunction::max_slope).fold(0.0, f64::max);
        let mut width = t / 16.0;
        if slope > 0.0 {
            width = width.min(2.0 / slope);
        }
        Grid::build(t, &knots, GRADING, width / f64::from(1u32 << refine))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Coefficient of `ln C_m` in component `i` (0-based), zero if absent.
    fn c(&self, i: usize, m: usize) -> i32 {
        self.coef[i].get(m).copied().unwrap_or(0)
    }

    /// `T_i` applied to this tuple, `1 ≤ i ≤ n − 1`.
    pub fn apply_t(&self, i: usize) -> Result<SdField> {
        let n = self.base.len();
        if i == 0 || i >= n {
            return Err(Error::InvalidInput(format!("T_{i} needs 1 ≤ i ≤ {}", n.saturating_sub(1))));
        }
        let (lo, hi) = (i - 1, i);
        let exps: Vec<(usize, i32)> =
            (0..self.cums.len()).map(|m| (m, self.c(hi, m) - self.c(lo, m))).filter(|&(_, e)| e != 0).collect();
        let (fl, fh) = (&self.base[lo], &self.base[hi]);
        let cum = Cumulative::new(&self.grid, |s| {
            let mut v = (fh.eval(s) - fl.eval(s)).exp();
            for &(m, e) in &exps {
                v *= self.cums[m].eval(s).powi(e);
            }
            v
        });
        if !cum.total().is_finite() || cum.total() <= 0.0 {
            return Err(Error::Quadrature(format!("cumulative integral for T_{i} is not a positive finite number")));
        }
        let mut next = self.clone();
        let m = next.cums.len();
        next.cums.push(cum);
        for row in next.coef.iter_mut() {
            row.resize(m + 1, 0);
        }
        next.coef[lo][m] += 1;
        next.coef[hi][m] -= 1;
        Ok(next)
    }

    /// Applies `T_{seq[0]}` first, then `T_{seq[1]}`, and so on.
    pub fn apply_sequence(&self, seq: &[usize]) -> Result<SdField> {
        seq.iter().try_fold(self.clone(), |h, &i| h.apply_t(i))
    }

    /// Samples every component at each `t`; rows are times.
    pub fn sample(&self, ts: &[f64]) -> Vec<Vec<f64>> {
        ts.iter().map(|&t| (1..=self.base.len()).map(|l| self.value(l, t)).collect()).collect()
    }
}

impl Environment for SdField {
    fn n(&self) -> usize {
        self.base.len()
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn value(&self, level: usize, t: f64) -> f64 {
        let i = level - 1;
        let mut v = self.base[i].eval(t);
        for (m, &c) in self.coef[i].iter().enumerate() {
            if c != 0 {
                v += f64::from(c) * self.cums[m].eval(t).ln();
            }
        }
        v
    }

    fn knots(&self) -> Vec<f64> {
        self.knots.clone()
    }

    fn max_width(&self) -> f64 {
        self.grid.max_width()
    }
}

/// The order in which `W` applies the `T_i`: `S_1` first, and within
/// `S_r` the operator `T_{n−1}` first.
pub fn w_sequence(n: usize) -> Vec<usize> {
    (1..n).flat_map(|r| (r..n).rev()).collect()
}

/// Sampling points from `t_min` to `T`, half geometric and half uniform.
pub fn sample_points(horizon: f64, t_min: f64, count: usize) -> Vec<f64> {
    let half = count / 2;
    let mut ts: Vec<f64> =
        (0..half).map(|j| t_min * (horizon / t_min).powf(j as f64 / half.max(1) as f64)).collect();
    ts.extend((1..=count - half).map(|j| horizon * j as f64 / (count - half) as f64));
    ts.sort_by(f64::total_cmp);
    ts
}

/// Applies `seq` on successively halved grids until two results agree to
/// `tol` at the sample points.
fn converged(f: &[PLFunction], seq: &[usize], tol: f64) -> Result<SdField> {
    let t = rational_to_f64(f[0].horizon());
    let ts = sample_points(t, t * T_MIN_FRACTION, 64);
    let mut last = SdField::new(f, SdField::default_grid(f, 0))?.apply_sequence(seq)?;
    for refine in 1..=MAX_HALVINGS as u32 {
        let next = SdField::new(f, SdField::default_grid(f, refine))?.apply_sequence(seq)?;
        let diff = last
            .sample(&ts)
            .iter()
            .flatten()
            .zip(next.sample(&ts).iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if diff <= tol {
            return Ok(next);
        }
        last = next;
    }
    Err(Error::Quadrature(format!("transformed tuple still moving by more than {tol}")))
}

/// `T_i f`.
pub fn sd_pitman_t(f: &[PLFunction], i: usize, tol: f64) -> Result<SdField> {
    converged(f, &[i], tol)
}

/// `W f`.
pub fn sd_w(f: &[PLFunction], tol: f64) -> Result<SdField> {
    converged(f, &w_sequence(f.len()), tol)
}
