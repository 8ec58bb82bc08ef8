//! Dense square matrices over a [`Semiring`], indexed from 1 to match the
//! column labels of the lattice, plus exact determinants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numerics::{format_rational, Rational, Semiring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareMatrix<S> {
    size: usize,
    data: Vec<S>,
}

/// Matrices of exact rationals: `M`, `M̃` and the H-matrices.
pub type TriMatrix = SquareMatrix<Rational>;

impl<S: Semiring> SquareMatrix<S> {
    pub fn zeros(size: usize) -> Self {
        SquareMatrix { size, data: vec![S::nil(); size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 1..=size {
            m.set(i, i, S::unit());
        }
        m
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 1..=size {
            for j in 1..=size {
                data.push(f(i, j));
            }
        }
        SquareMatrix { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        assert!((1..=self.size).contains(&i) && (1..=self.size).contains(&j), "index ({i},{j}) out of range");
        &self.data[(i - 1) * self.size + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        assert!((1..=self.size).contains(&i) && (1..=self.size).contains(&j), "index ({i},{j}) out of range");
        self.data[(i - 1) * self.size + (j - 1)] = value;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.size, rhs.size, "size mismatch");
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 1..=n {
            for k in 1..=n {
                let a = self.get(i, k);
                if a.is_nil() {
                    continue;
                }
                for j in 1..=n {
                    let b = rhs.get(k, j);
                    if b.is_nil() {
                        continue;
                    }
                    let acc = out.get(i, j).oplus(&a.otimes(b));
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    /// Product of a chain, left to right. An empty chain is the identity.
    pub fn product<'a>(size: usize, chain: impl IntoIterator<Item = &'a Self>) -> Self
    where
        S: 'a,
    {
        chain.into_iter().fold(Self::identity(size), |acc, m| acc.mul(m))
    }

    /// Submatrix on the given 1-based row and column labels.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        assert_eq!(rows.len(), cols.len(), "minor must be square");
        let k = rows.len();
        Self::from_fn(k, |a, b| self.get(rows[a - 1], cols[b - 1]).clone())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (1..=self.size).all(|i| (1..i).all(|j| self.get(i, j).is_nil()))
    }

    /// First entry where the two matrices differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)>
    where
        S: PartialEq,
    {
        assert_eq!(self.size, other.size, "size mismatch");
        for i in 1..=self.size {
            for j in 1..=self.size {
                if self.get(i, j) != other.get(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

impl fmt::Display for SquareMatrix<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.size {
            let row: Vec<String> = (1..=self.size).map(|j| format_rational(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Exact determinant. Rows are scaled to integers and reduced with
/// fraction-free (Bareiss) elimination.
pub fn determinant(m: &TriMatrix) -> Rational {
    let n = m.size();
    if n == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 1..=n {
        let lcm = (1..=n).fold(BigInt::one(), |acc, j| acc.lcm(m.get(i, j).denom()));
        let row = (1..=n).map(|j| {
            let q = m.get(i, j);
            q.numer() * (&lcm / q.denom())
        });
        a.push(row.collect());
        scale *= lcm;
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = sign * &a[n - 1][n - 1];
    let out = Rational::new(det, scale);
    debug_assert!(!out.denom().is_negative());
    out
}

/// Determinant by cofactor expansion; exponential, used as a test oracle.
pub fn determinant_by_expansion(m: &TriMatrix) -> Rational {
    fn expand(m: &TriMatrix, rows: &[usize], cols: &mut Vec<usize>) -> Rational {
        if rows.is_empty() {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for pos in 0..cols.len() {
            let c = cols.remove(pos);
            let entry = m.get(rows[0], c);
            if !entry.is_nil() {
                let sub = expand(m, &rows[1..], cols);
                let term = entry * sub;
                if pos % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            cols.insert(pos, c);
        }
        total
    }
    let rows: Vec<usize> = (1..=m.size()).collect();
    let mut cols = rows.clone();
    expand(m, &rows, &mut cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;

    fn mat(rows: &[&[&str]]) -> TriMatrix {
        SquareMatrix::from_fn(rows.len(), |i, j| parse_rational(rows[i - 1][j - 1]).unwrap())
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&mat(&[&["3/2"]])), parse_rational("3/2").unwrap());
        let m = mat(&[&["1", "2"], &["3", "4"]]);
        assert_eq!(determinant(&m), parse_rational("-2").unwrap());
        let needs_pivot = mat(&[&["0", "1", "2"], &["1", "0", "3"], &["4", "-3", "8"]]);
        assert_eq!(determinant(&needs_pivot), parse_rational("-2").unwrap());
        let singular = mat(&[&["1/2", "1"], &["1", "2"]]);
        assert_eq!(determinant(&singular), Rational::zero());
        assert_eq!(determinant(&TriMatrix::zeros(0)), Rational::one());
    }

    #[test]
    fn bareiss_matches_expansion_on_fractions() {
        let m = mat(&[
            &["1/3", "2/7", "-5", "1"],
            &["4", "1/2", "0", "3/11"],
            &["-2/9", "6", "7/5", "1/4"],
            &["1", "-1", "2/3", "5"],
        ]);
        assert_eq!(determinant(&m), determinant_by_expansion(&m));
    }

    #[test]
    fn product_and_submatrix() {
        let a = mat(&[&["1", "2"], &["0", "1"]]);
        let b = mat(&[&["1", "0"], &["3", "1"]]);
        assert_eq!(a.mul(&b), mat(&[&["7", "2"], &["3", "1"]]));
        assert_eq!(TriMatrix::product(2, [&a, &b]), a.mul(&b));
        assert_eq!(a.submatrix(&[2], &[1]), mat(&[&["0"]]));
        assert!(a.is_upper_triangular());
        assert_eq!(a.first_difference(&b), Some((1, 2)));
    }
}
