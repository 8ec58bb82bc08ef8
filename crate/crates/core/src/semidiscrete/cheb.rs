//! Piecewise Chebyshev series on a cell grid, with exact term-by-term
//! antiderivatives.

use std::f64::consts::PI;

/// Number of first-kind nodes per cell.
pub const NODES: usize = 20;

/// First-kind nodes on `[-1, 1]`.
pub fn nodes() -> [f64; NODES] {
    std::array::from_fn(|k| (PI * (k as f64 + 0.5) / NODES as f64).cos())
}

/// Coefficients `a_j` of `Σ a_j T_j` interpolating `values` at [`nodes`].
pub fn coefficients(values: &[f64; NODES]) -> [f64; NODES] {
    let d = NODES as f64;
    std::array::from_fn(|j| {
        let s: f64 = values.iter().enumerate().map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / d).cos()).sum();
        if j == 0 {
            s / d
        } else {
            2.0 * s / d
        }
    })
}

/// Antiderivative in `x ∈ [-1, 1]`, vanishing at `x = −1`; one degree higher.
pub fn antiderivative(a: &[f64; NODES]) -> Vec<f64> {
    let d = NODES;
    let at = |j: usize| if j < d { a[j] } else { 0.0 };
    let mut c = vec![0.0; d + 1];
    c[1] = at(0) - at(2) / 2.0;
    for (j, cj) in c.iter_mut().enumerate().skip(2) {
        *cj = (at(j - 1) - at(j + 1)) / (2.0 * j as f64);
    }
    c[0] = -(1..=d).map(|j| if j % 2 == 0 { c[j] } else { -c[j] }).sum::<f64>();
    c
}

/// Clenshaw evaluation of `Σ c_j T_j(x)`.
pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &cj in c.iter().skip(1).rev() {
        let b = 2.0 * x * b1 - b2 + cj;
        b2 = b1;
        b1 = b;
    }
    x * b1 - b2 + c[0]
}

/// A sorted list of cell boundaries on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub knots: Vec<f64>,
}

impl Grid {
    /// Cells bounded by `must` (clipped to `[0, T]`), a geometric grading
    /// `T·2^{−j}` toward 0, and subdivided until no cell exceeds `max_width`.
    pub fn build(horizon: f64, must: &[f64], grading: usize, max_width: f64) -> Self {
        let mut pts: Vec<f64> = vec![0.0, horizon];
        pts.extend(must.iter().copied().filter(|&t| t > 0.0 && t < horizon));
        pts.extend((1..=grading).map(|j| horizon * 0.5f64.powi(j as i32)));
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * horizon);
        let mut knots = vec![pts[0]];
        for w in pts.windows(2) {
            let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
            for p in 1..=pieces {
                knots.push(w[0] + (w[1] - w[0]) * p as f64 / pieces as f64);
            }
        }
        Grid { knots }
    }

    /// Every cell split in two.
    pub fn halved(&self) -> Self {
        let mut knots = vec![self.knots[0]];
        for w in self.knots.windows(2) {
            knots.push(0.5 * (w[0] + w[1]));
            knots.push(w[1]);
        }
        Grid { knots }
    }

    pub fn max_width(&self) -> f64 {
        self.knots.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn cells(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn cell(&self, c: usize) -> (f64, f64) {
        (self.knots[c], self.knots[c + 1])
    }

    /// Index of the cell containing `t`, with `t` clamped into range.
    pub fn locate(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k <= t).clamp(1, self.cells()) - 1
    }

    /// Points of the cell `c` at the Chebyshev nodes.
    pub fn cell_nodes(&self, c: usize) -> [f64; NODES] {
        let (a, b) = self.cell(c);
        nodes().map(|x| 0.5 * (a + b) + 0.5 * (b - a) * x)
    }
}

/// `t ↦ ∫_0^t h`, tabulated cell by cell.
#[derive(Clone, Debug)]
pub struct Cumulative {
    grid: Grid,
    /// Value at the left end of each cell plus one trailing total.
    offsets: Vec<f64>,
    series: Vec<Vec<f64>>,
}

impl Cumulative {
    /// Integrates `h`, which is sampled only at interior nodes.
    pub fn new(grid: &Grid, mut h: impl FnMut(f64) -> f64) -> Self {
        let mut offsets = vec![0.0];
        let mut series = Vec::with_capacity(grid.cells());
        for c in 0..grid.cells() {
            let (a, b) = grid.cell(c);
            let vals = grid.cell_nodes(c).map(&mut h);
            let mut anti = antiderivative(&coefficients(&vals));
            anti.iter_mut().for_each(|x| *x *= 0.5 * (b - a));
            let total = offsets[c] + clenshaw(&anti, 1.0);
            series.push(anti);
            offsets.push(total);
        }
        Cumulative { grid: grid.clone(), offsets, series }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let c = self.grid.locate(t);
        let (a, b) = self.grid.cell(c);
        let x = ((2.0 * t - a - b) / (b - a)).clamp(-1.0, 1.0);
        self.offsets[c] + clenshaw(&self.series[c], x)
    }

    pub fn total(&self) -> f64 {
        *self.offsets.last().expect("at least one offset")
    }
}
