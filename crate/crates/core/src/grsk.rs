//! Geometric RSK: row insertion, the P and Q tableaux, the path formula for
//! tableau entries, and the H-matrix factorization.
//!
//! Input arrays are given as rows: `rows[t − 1][j − 1] = m_{j,t}` with
//! `t ∈ [1, n]` and `j ∈ [1, N]`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::matrix::TriMatrix;
use crate::numerics::{PosRational, Rational};
use crate::partition::{self, WeightField};
use crate::pitman::{self, StairFunction};
use crate::verify::Verdict;

/// A word `(ξ_ℓ, …, ξ_N)`, or the empty word `e_1 = (1, 0, …, 0)`, which
/// is tagged rather than stored with literal zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Empty { start: usize, len: usize },
    Entries { start: usize, values: Vec<PosRational> },
}

impl Word {
    pub fn entries(start: usize, values: Vec<PosRational>) -> Self {
        Word::Entries { start, values }
    }

    pub fn start(&self) -> usize {
        match self {
            Word::Empty { start, .. } | Word::Entries { start, .. } => *start,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Word::Empty { len, .. } => *len,
            Word::Entries { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> Option<&[PosRational]> {
        match self {
            Word::Empty { .. } => None,
            Word::Entries { values, .. } => Some(values),
        }
    }
}

/// Inserts `b` into `ξ`, returning `ξ'` and the bumped word `b'` (absent
/// when `ξ` is the empty word).
pub fn row_insert(xi: &Word, b: &Word) -> Result<(Word, Option<Word>)> {
    let b_vals = b.values().ok_or_else(|| Error::InvalidInput("cannot insert the empty word".into()))?;
    if xi.start() != b.start() || xi.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "words start at {} and {} with lengths {} and {}",
            xi.start(),
            b.start(),
            xi.len(),
            b.len()
        )));
    }
    let start = b.start();
    let Some(x) = xi.values() else {
        let cumulative = StairFunction::from_increments(start, b_vals);
        return Ok((Word::entries(start, cumulative.values().to_vec()), None));
    };
    if x.is_empty() {
        return Ok((Word::entries(start, vec![]), Some(Word::entries(start + 1, vec![]))));
    }
    let mut next = Vec::with_capacity(x.len());
    next.push(&b_vals[0] * &x[0]);
    for i in 1..x.len() {
        let v = &b_vals[i] * &(next[i - 1].clone() + x[i].clone());
        next.push(v);
    }
    let bumped = (1..x.len())
        .map(|i| &(&(&b_vals[i] * &x[i]) * &next[i - 1]) / &(&x[i - 1] * &next[i]))
        .collect();
    Ok((Word::entries(start, next), Some(Word::entries(start + 1, bumped))))
}

/// `z(n)`: entries `z_{k,ℓ}` for `1 ≤ ℓ ≤ k ≤ N`, `ℓ ≤ n ∧ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrskTableau {
    width: usize,
    diagonals: Vec<Vec<PosRational>>,
}

impl GrskTableau {
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of diagonals, `n ∧ N`.
    pub fn depth(&self) -> usize {
        self.diagonals.len()
    }

    /// `z_ℓ = (z_{ℓ,ℓ}, …, z_{N,ℓ})`.
    pub fn diagonal(&self, l: usize) -> &[PosRational] {
        &self.diagonals[l - 1]
    }

    pub fn z(&self, k: usize, l: usize) -> &PosRational {
        &self.diagonals[l - 1][k - l]
    }

    /// Bottom row `(z_{N,1}, …, z_{N,n∧N})`.
    pub fn shape(&self) -> Vec<PosRational> {
        (1..=self.depth()).map(|l| self.z(self.width, l).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &PosRational)> {
        self.diagonals
            .iter()
            .enumerate()
            .flat_map(|(i, d)| d.iter().enumerate().map(move |(j, z)| (i + j + 1, i + 1, z)))
    }

    /// Replaces one entry; used to plant faults in tests.
    pub fn with_entry(&self, k: usize, l: usize, value: PosRational) -> Self {
        let mut out = self.clone();
        out.diagonals[l - 1][k - l] = value;
        out
    }
}

fn check_rows(rows: &[Vec<PosRational>]) -> Result<usize> {
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.is_empty() || width == 0 {
        return Err(Error::InvalidInput("the array needs at least one row and one column".into()));
    }
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::InvalidInput("rows differ in length".into()));
    }
    Ok(width)
}

/// The tableaux `z(1), …, z(n)` produced by inserting the rows in order.
pub fn tableau_sequence(rows: &[Vec<PosRational>]) -> Result<Vec<GrskTableau>> {
    let width = check_rows(rows)?;
    let mut diagonals: Vec<Vec<PosRational>> = Vec::new();
    let mut out = Vec::with_capacity(rows.len());
    for (t, row) in rows.iter().enumerate() {
        let t = t + 1;
        let mut b = Word::entries(1, row.clone());
        for l in 1..=t.min(width) {
            if l == t {
                let (fresh, _) = row_insert(&Word::Empty { start: l, len: width - l + 1 }, &b)?;
                diagonals.push(fresh.values().unwrap_or_default().to_vec());
                break;
            }
            let (next, bumped) = row_insert(&Word::entries(l, diagonals[l - 1].clone()), &b)?;
            diagonals[l - 1] = next.values().unwrap_or_default().to_vec();
            match bumped {
                Some(w) if !w.is_empty() => b = w,
                _ => break,
            }
        }
        out.push(GrskTableau { width, diagonals: diagonals.clone() });
    }
    Ok(out)
}

/// `P`: the tableau `z(n)` after all rows are inserted.
pub fn p_tableau(rows: &[Vec<PosRational>]) -> Result<GrskTableau> {
    Ok(tableau_sequence(rows)?.pop().expect("at least one row"))
}

/// `Q`: the shapes `sh(z(1)), …, sh(z(n))`.
pub fn q_tableau(rows: &[Vec<PosRational>]) -> Result<Vec<Vec<PosRational>>> {
    Ok(tableau_sequence(rows)?.iter().map(GrskTableau::shape).collect())
}

/// Rotates the first `n` rows into a lattice field: row `t` becomes level
/// `n + 1 − t`, so up/right paths in `Z²` map to lattice paths.
fn rotated_field(rows: &[Vec<PosRational>], n: usize) -> Result<WeightField> {
    let levels: Vec<Vec<PosRational>> = (1..=n).map(|level| rows[n - level].clone()).collect();
    WeightField::from_vertex_weights(&levels)
}

/// `τ_{k,ℓ}(n)`: sum over `ℓ` non-intersecting up/right paths
/// `(1, r) → (n, k + r − ℓ)` of the product of the visited entries.
/// Zero when no such paths exist.
pub fn tau_kl(rows: &[Vec<PosRational>], n: usize, k: usize, l: usize) -> Result<Rational> {
    let width = check_rows(rows)?;
    if n > rows.len() || k > width || l > k {
        return Err(Error::InvalidInput(format!("need n ≤ {}, ℓ ≤ k ≤ {width}", rows.len())));
    }
    if l == 0 {
        return Ok(Rational::one());
    }
    if n == 0 {
        return Ok(Rational::zero());
    }
    let field = rotated_field(rows, n)?;
    let u: Vec<Point> = (1..=l).map(|r| Point::new(r, n)).collect();
    let v: Vec<Point> = (1..=l).map(|r| Point::new(k + r - l, 1)).collect();
    match partition::partition_function_brute(&field, &u, &v) {
        Ok(z) => Ok(z.into_rational()),
        Err(Error::EmptyPathSet) => Ok(Rational::zero()),
        Err(e) => Err(e),
    }
}

/// `z̃_{k,ℓ} = τ_{k,ℓ}(n) / τ_{k,ℓ−1}(n)` for the whole array.
pub fn z_from_tau(rows: &[Vec<PosRational>]) -> Result<GrskTableau> {
    let width = check_rows(rows)?;
    let n = rows.len();
    let mut diagonals = Vec::new();
    for l in 1..=n.min(width) {
        let mut diag = Vec::new();
        for k in l..=width {
            let ratio = tau_kl(rows, n, k, l)? / tau_kl(rows, n, k, l - 1)?;
            diag.push(PosRational::from_rational(ratio)?);
        }
        diagonals.push(diag);
    }
    Ok(GrskTableau { width, diagonals })
}

/// Compares two tableaux entry by entry.
pub fn compare_tableaux(lhs: &GrskTableau, rhs: &GrskTableau) -> Verdict {
    if lhs.width != rhs.width || lhs.depth() != rhs.depth() {
        return Verdict::failed(
            format!("{}x{}", lhs.width, lhs.depth()),
            format!("{}x{}", rhs.width, rhs.depth()),
            "tableau shapes differ",
        );
    }
    Verdict::all_equal(
        "tableau entries",
        lhs.entries().zip(rhs.entries()).map(|((k, l, a), (_, _, b))| (format!("z[{k},{l}]"), a.clone(), b.clone())),
    )
}

/// `H_r(E)`: `1` at `(i, i)` for `i < r`, `e_i ⋯ e_j` at `(i, j)` for
/// `r ≤ i ≤ j`, zero elsewhere, with `e_x = E(x) / E(x − 1)`.
pub fn h_matrix(e: &StairFunction, r: usize, size: usize) -> Result<TriMatrix> {
    if e.start() != r {
        return Err(Error::DomainMismatch(format!("function starts at {}, H-matrix boundary is {r}", e.start())));
    }
    if size >= r && size > e.end() {
        return Err(Error::InvalidInput(format!("size {size} exceeds the table end {}", e.end())));
    }
    Ok(TriMatrix::from_fn(size, |i, j| {
        if i < r {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        } else if i <= j {
            (&e.at(j) / &e.at(i - 1)).into_rational()
        } else {
            Rational::zero()
        }
    }))
}

/// `H_{r_n}(D_n) ⋯ H_{r_1}(D_1)` of size `N`. Its `(u, v)` entry is the
/// single-path sum from the lowest point of column `u` to `(v, 1)`.
pub fn h_product(d: &WeightField) -> TriMatrix {
    let size = d.width();
    let factors: Vec<TriMatrix> = (1..=d.n())
        .rev()
        .map(|m| h_matrix(d.level(m), d.profile().start(m), size).expect("tables cover the width"))
        .collect();
    TriMatrix::product(size, &factors)
}

/// `H_r(G) H_r(F) = H_{r+1}(F ⊗ G) H_r(G ⊙ F)`, entrywise.
pub fn verify_h_factorization(g: &StairFunction, f: &StairFunction, size: usize) -> Result<Verdict> {
    let r = f.start();
    let lhs = h_matrix(g, r, size)?.mul(&h_matrix(f, r, size)?);
    let (upper, lower) = pitman::tau(f, g)?;
    let rhs = h_matrix(&lower, r + 1, size)?.mul(&h_matrix(&upper, r, size)?);
    Ok(matrix_verdict(&lhs, &rhs))
}

/// `H_1(D_n) ⋯ H_1(D_1) = H_n(D̃_n) ⋯ H_1(D̃_1)` with `D̃ = W D`.
pub fn verify_h_chain(d: &WeightField) -> Result<Verdict> {
    let lhs = h_product(d);
    let rhs = h_product(&pitman::w(d)?);
    Ok(matrix_verdict(&lhs, &rhs))
}

fn matrix_verdict(lhs: &TriMatrix, rhs: &TriMatrix) -> Verdict {
    match lhs.first_difference(rhs) {
        None => Verdict::passed(format!("{0}x{0} product", lhs.size()), format!("{0}x{0} product", rhs.size())),
        Some((i, j)) => Verdict::exact(lhs.get(i, j), rhs.get(i, j), || format!("entry ({i},{j})")),
    }
}

/// Row insertion agrees with the Pitman pair `ξ' = ξ ⊙ B`, `B' = B ⊗ ξ`,
/// where `B(k) = Π_{j=ℓ}^{k} b_j`.
pub fn pitman_equals_insertion(xi: &Word, b: &Word) -> Result<Verdict> {
    let (next, bumped) = row_insert(xi, b)?;
    let start = b.start();
    let b_fn = StairFunction::from_increments(start, b.values().unwrap_or_default());
    let next_fn = StairFunction::new(start, next.values().unwrap_or_default().to_vec())?;
    let Some(x) = xi.values() else {
        // ξ = e_1 makes ξ ⊙ B collapse to B
        return Ok(Verdict::all_equal(
            "cumulative entries",
            (0..b_fn.len()).map(|i| (format!("xi'({})", start + i), next_fn.values()[i].clone(), b_fn.values()[i].clone())),
        ));
    };
    let xi_fn = StairFunction::new(start, x.to_vec())?;
    let pit_next = pitman::odot(&xi_fn, &b_fn)?;
    let pit_bumped = pitman::otimes(&b_fn, &xi_fn)?;
    let bumped_fn = StairFunction::from_increments(start + 1, bumped.as_ref().and_then(Word::values).unwrap_or_default());
    let firsts = (0..next_fn.len()).map(|i| (format!("xi'({})", start + i), next_fn.values()[i].clone(), pit_next.values()[i].clone()));
    let seconds = (0..bumped_fn.len())
        .map(|i| (format!("B'({})", start + 1 + i), bumped_fn.values()[i].clone(), pit_bumped.values()[i].clone()));
    Ok(Verdict::all_equal("function values", firsts.chain(seconds)))
}

/// Rows for the tableau pipeline of a rectangular field: row `t` holds the
/// vertex weights of level `n + 1 − t`.
pub fn rows_from_field(d: &WeightField) -> Result<Vec<Vec<PosRational>>> {
    (1..=d.n())
        .rev()
        .map(|m| (1..=d.width()).map(|x| d.vertex_weight(Point::new(x, m))).collect())
        .collect()
}

/// Transpose: row `t` of the result holds column `t` of the input.
pub fn transpose(rows: &[Vec<PosRational>]) -> Vec<Vec<PosRational>> {
    let width = rows.first().map(Vec::len).unwrap_or(0);
    (0..width).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// The P-tableau diagonals of the field's rows are the functions of `W D`:
/// `z_{j,i} = (W D)_i(j)` for `i ≤ j ≤ N`, `i ≤ n ∧ N`.
pub fn check_tableau_matches_w(d: &WeightField) -> Result<Verdict> {
    let p = p_tableau(&rows_from_field(d)?)?;
    check_tableau_against(&p, &pitman::w(d)?)
}

/// Compares given tableau entries with a transformed field.
pub fn check_tableau_against(p: &GrskTableau, wd: &WeightField) -> Result<Verdict> {
    let pairs = p.entries().map(|(k, l, z)| {
        (format!("z[{k},{l}] vs (WD)_{l}({k})"), z.clone(), wd.level(l).at(k))
    });
    Ok(Verdict::all_equal("tableau entries", pairs))
}

/// `Π_{r ≤ ℓ} (W D)_r(N) = D[([1, ℓ], n) → ([N − ℓ + 1, N], 1)]`.
pub fn check_w_products(d: &WeightField) -> Result<Verdict> {
    let wd = pitman::w(d)?;
    let (n, width) = (d.n(), d.width());
    let mut pairs = Vec::new();
    let mut product = PosRational::one();
    for l in 1..=n.min(width) {
        product = &product * &wd.level(l).at(width);
        let u: Vec<Point> = (1..=l).map(|x| Point::new(x, n)).collect();
        let v: Vec<Point> = (width - l + 1..=width).map(|x| Point::new(x, 1)).collect();
        pairs.push((format!("l={l}"), product.clone(), partition::partition_function_brute(d, &u, &v)?));
    }
    Ok(Verdict::all_equal("packed products", pairs))
}

/// `(W D)(N) = sh(P(d̃))`.
pub fn check_w_shape(d: &WeightField) -> Result<Verdict> {
    let wd = pitman::w(d)?;
    let shape = p_tableau(&rows_from_field(d)?)?.shape();
    let pairs = shape.into_iter().enumerate().map(|(i, s)| (format!("shape[{}]", i + 1), s, wd.level(i + 1).at(d.width())));
    Ok(Verdict::all_equal("shape entries", pairs))
}

/// `((W D)(t))_{t ≤ N} = Q(d̃ᵀ)`.
pub fn check_w_q_sequence(d: &WeightField) -> Result<Verdict> {
    let wd = pitman::w(d)?;
    let shapes = q_tableau(&transpose(&rows_from_field(d)?))?;
    let mut pairs = Vec::new();
    for (t, shape) in shapes.into_iter().enumerate() {
        for (l, s) in shape.into_iter().enumerate() {
            pairs.push((format!("t={} l={}", t + 1, l + 1), s, wd.level(l + 1).at(t + 1)));
        }
    }
    Ok(Verdict::all_equal("Q-sequence entries", pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PosRational {
        s.parse().unwrap()
    }

    fn word(start: usize, vals: &[&str]) -> Word {
        Word::entries(start, vals.iter().map(|s| q(s)).collect())
    }

    #[test]
    fn insertion_examples() {
        let (next, bumped) = row_insert(&Word::Empty { start: 1, len: 2 }, &word(1, &["5", "7"])).unwrap();
        assert_eq!(next, word(1, &["5", "35"]));
        assert!(bumped.is_none());

        let (next, bumped) = row_insert(&word(1, &["2", "3"]), &word(1, &["5", "7"])).unwrap();
        assert_eq!(next, word(1, &["10", "91"]));
        assert_eq!(bumped, Some(word(2, &["15/13"])));

        let (next, bumped) = row_insert(&word(4, &["3/2"]), &word(4, &["4"])).unwrap();
        assert_eq!(next, word(4, &["6"]));
        assert_eq!(bumped, Some(word(5, &[])));

        assert!(row_insert(&word(1, &["1"]), &word(2, &["1"])).is_err());
    }

    #[test]
    fn all_ones_two_by_two() {
        let rows = vec![vec![q("1"), q("1")], vec![q("1"), q("1")]];
        let p = p_tableau(&rows).unwrap();
        assert_eq!(p.z(1, 1), &q("1"));
        assert_eq!(p.z(2, 1), &q("2"));
        assert_eq!(p.z(2, 2), &q("1/2"));
        assert_eq!(tau_kl(&rows, 2, 2, 1).unwrap(), q("2").into_rational());
        assert_eq!(tau_kl(&rows, 2, 2, 2).unwrap(), q("1").into_rational());
        assert!(compare_tableaux(&p, &z_from_tau(&rows).unwrap()).holds);
    }

    #[test]
    fn single_row_is_cumulative() {
        let rows = vec![vec![q("2"), q("1/3"), q("5")]];
        let p = p_tableau(&rows).unwrap();
        assert_eq!(p.diagonal(1), &[q("2"), q("2/3"), q("10/3")]);
        assert_eq!(q_tableau(&rows).unwrap(), vec![vec![q("10/3")]]);
        assert_eq!(z_from_tau(&rows).unwrap(), p);
    }

    #[test]
    fn tau_conventions() {
        let ones = vec![vec![q("1"); 4]; 3];
        // l = 1: binomial(n + k − 2, k − 1)
        assert_eq!(tau_kl(&ones, 3, 4, 1).unwrap(), Rational::from_integer(10.into()));
        assert_eq!(tau_kl(&ones, 2, 3, 0).unwrap(), Rational::one());
        // n < l < k: no room for the paths
        assert_eq!(tau_kl(&ones, 1, 3, 2).unwrap(), Rational::zero());
        // l = k: the packed multipath only
        let rows = vec![vec![q("2"), q("3"), q("5")], vec![q("7"), q("11"), q("13")]];
        assert_eq!(tau_kl(&rows, 2, 3, 3).unwrap(), Rational::from_integer((2 * 3 * 5 * 7 * 11 * 13).into()));
    }

    #[test]
    fn h_matrix_band() {
        let e = StairFunction::from_increments(3, &[q("2"), q("5")]);
        let h = h_matrix(&e, 3, 4).unwrap();
        let expect = |i, j, s: &str| assert_eq!(h.get(i, j), q(s).as_rational(), "({i},{j})");
        expect(1, 1, "1");
        expect(2, 2, "1");
        expect(3, 3, "2");
        expect(3, 4, "10");
        expect(4, 4, "5");
        assert_eq!(h.get(1, 2), &Rational::zero());
        assert_eq!(h.get(2, 3), &Rational::zero());
        assert_eq!(h.get(4, 3), &Rational::zero());

        let ones = StairFunction::constant(1, 4, PosRational::one());
        let h = h_matrix(&ones, 1, 4).unwrap();
        assert!((1..=4).all(|i| (i..=4).all(|j| h.get(i, j) == &Rational::one())));
    }

    #[test]
    fn insertion_is_pitman_example() {
        assert!(pitman_equals_insertion(&word(1, &["2", "3"]), &word(1, &["5", "7"])).unwrap().holds);
        assert!(pitman_equals_insertion(&Word::Empty { start: 2, len: 3 }, &word(2, &["5", "7", "1/2"])).unwrap().holds);
    }
}
