//! The matrix route: `M_{u,v} = D[(u, n) → (v, 1)]`,
//! `M̃_{u,v} = (W D)[(u, n ∧ u) → (v, 1)]`, their minors, and a replay of
//! the Desnanot–Jacobi induction showing every contiguous minor agrees.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grsk::h_product;
use crate::matrix::{determinant, TriMatrix};
use crate::numerics::{format_rational, Rational};
use crate::partition::WeightField;
use crate::pitman;
use crate::verify::Verdict;

/// `(M, M̃)` for a rectangular field, both of size `N`.
pub fn build_matrices(d: &WeightField) -> Result<(TriMatrix, TriMatrix)> {
    let wd = pitman::w(d)?;
    Ok((h_product(d), h_product(&wd)))
}

/// Determinant of the minor on rows `rows` and columns `cols`.
pub fn minor_det(a: &TriMatrix, rows: &[usize], cols: &[usize]) -> Result<Rational> {
    if rows.len() != cols.len() {
        return Err(Error::InvalidInput(format!("minor needs |rows| = |cols|, got {} and {}", rows.len(), cols.len())));
    }
    if let Some(&bad) = rows.iter().chain(cols).find(|&&x| x == 0 || x > a.size()) {
        return Err(Error::InvalidInput(format!("index {bad} outside [1, {}]", a.size())));
    }
    Ok(determinant(&a.submatrix(rows, cols)))
}

/// `|A_{[i, i+k−1], [j, j+k−1]}|`, with the empty minor equal to 1.
pub fn contiguous_minor(a: &TriMatrix, i: usize, j: usize, k: usize) -> Rational {
    if k == 0 {
        return Rational::one();
    }
    let rows: Vec<usize> = (i..i + k).collect();
    let cols: Vec<usize> = (j..j + k).collect();
    determinant(&a.submatrix(&rows, &cols))
}

/// The condensation identity relating the minor at `(i, j, k)` to its
/// neighbours; needs `i, j ≥ 2` and `k ≥ 1` with every minor inside `A`.
pub fn desnanot_jacobi_check(a: &TriMatrix, i: usize, j: usize, k: usize) -> Result<Verdict> {
    if i < 2 || j < 2 || k == 0 || i + k - 1 > a.size() || j + k - 1 > a.size() {
        return Err(Error::InvalidInput(format!("indices (i={i}, j={j}, k={k}) out of range for size {}", a.size())));
    }
    let m = |i, j, k| contiguous_minor(a, i, j, k);
    let lhs = m(i, j, k) * m(i - 1, j - 1, k);
    let rhs = m(i - 1, j - 1, k + 1) * m(i, j, k - 1) + m(i - 1, j, k) * m(i, j - 1, k);
    Ok(Verdict::exact(&Show(lhs), &Show(rhs), || format!("condensation at i={i} j={j} k={k}")))
}

/// Display wrapper printing rationals as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Show(pub Rational);

impl std::fmt::Display for Show {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// All contiguous minors `(i, j, k)` of an `N × N` matrix with `k ≥ 1`.
fn minor_indices(size: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (1..=size).flat_map(move |i| (1..=size).flat_map(move |j| (1..=size + 1 - i.max(j)).map(move |k| (i, j, k))))
}

/// The four structural equalities for contiguous minors of `M` and `M̃`:
/// 1. first-row-block minors agree;
/// 2. a minor is positive iff `k ≤ n, i ≤ j` or `k > n, i = j`, else zero;
/// 3. diagonal minors agree;
/// 4. off-set minors with `k > n` vanish.
pub fn check_a_priori(m: &TriMatrix, mt: &TriMatrix, n: usize) -> Result<Vec<Verdict>> {
    if m.size() != mt.size() {
        return Err(Error::DomainMismatch(format!("sizes {} and {} differ", m.size(), mt.size())));
    }
    let size = m.size();
    let mut first = Vec::new();
    let mut support = Verdict::passed("sign pattern", "sign pattern");
    let mut diagonal = Vec::new();
    let mut offset = Verdict::passed("off-set zeros", "off-set zeros");
    for (i, j, k) in minor_indices(size) {
        let a = contiguous_minor(m, i, j, k);
        let b = contiguous_minor(mt, i, j, k);
        if i == 1 {
            first.push((format!("i=1 j={j} k={k}"), Show(a.clone()), Show(b.clone())));
        }
        if i == j {
            diagonal.push((format!("i=j={i} k={k}"), Show(a.clone()), Show(b.clone())));
        }
        let positive = (k <= n && i <= j) || (k > n && i == j);
        for (name, val) in [("M", &a), ("M~", &b)] {
            let ok = if positive { val.is_positive() } else { val.is_zero() };
            if support.holds && !ok {
                support = Verdict::failed(
                    format_rational(val),
                    if positive { "> 0" } else { "0" },
                    format!("{name} minor i={i} j={j} k={k} breaks the sign pattern"),
                );
            }
        }
        if k > n && i < j && offset.holds && !(a.is_zero() && b.is_zero()) {
            offset = Verdict::failed(
                format!("{}, {}", format_rational(&a), format_rational(&b)),
                "0, 0",
                format!("off-set minor i={i} j={j} k={k} > n={n} is nonzero"),
            );
        }
    }
    Ok(vec![
        Verdict::all_equal("first-block minors", first),
        support,
        Verdict::all_equal("diagonal minors", diagonal),
        offset,
    ])
}

/// Replays the induction on `(i, j + k − 1)`. Base values come from `M̃`
/// alone (rows starting at 1, diagonal minors, and the zeros of the sign
/// pattern); every other minor of `M̃` is then produced by the condensation
/// recurrence and compared with the directly computed minor of `M`.
/// Returns the first disagreement, or a pass counting the matched minors.
pub fn dj_induction_verify(m: &TriMatrix, mt: &TriMatrix, n: usize) -> Result<Verdict> {
    let a_priori = check_a_priori(m, mt, n)?;
    if let Some(bad) = a_priori.into_iter().find(|v| !v.holds) {
        return Ok(bad);
    }
    let size = m.size();
    let mut order: Vec<(usize, usize, usize)> = minor_indices(size).collect();
    order.sort_by_key(|&(i, j, k)| (i, j + k - 1, k));
    let mut known: HashMap<(usize, usize, usize), Rational> = HashMap::new();
    let value = |known: &HashMap<(usize, usize, usize), Rational>, i: usize, j: usize, k: usize| -> Option<Rational> {
        if k == 0 {
            Some(Rational::one())
        } else {
            known.get(&(i, j, k)).cloned()
        }
    };
    let mut derived = 0usize;
    for (i, j, k) in order {
        let direct = contiguous_minor(m, i, j, k);
        let predicted = if i == 1 || i == j {
            contiguous_minor(mt, i, j, k)
        } else if i > j || k > n {
            Rational::zero()
        } else {
            let get = |i, j, k| {
                value(&known, i, j, k).ok_or_else(|| Error::InvalidInput(format!("minor ({i},{j},{k}) not yet established")))
            };
            let denom = get(i - 1, j - 1, k)?;
            if !denom.is_positive() {
                return Ok(Verdict::failed(
                    format_rational(&denom),
                    "> 0",
                    format!("denominator minor i={} j={} k={k} is not positive", i - 1, j - 1),
                ));
            }
            derived += 1;
            (get(i - 1, j - 1, k + 1)? * get(i, j, k - 1)? + get(i - 1, j, k)? * get(i, j - 1, k)?) / denom
        };
        if predicted != direct {
            return Ok(Verdict::exact(&Show(direct), &Show(predicted), || {
                format!("minor rows [{i},{}] cols [{j},{}]", i + k - 1, j + k - 1)
            }));
        }
        known.insert((i, j, k), predicted);
    }
    Ok(Verdict::passed(format!("{} minors of M", known.len()), format!("{} minors of M~ ({derived} by condensation)", known.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;
    use crate::partition::WeightField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn all_ones_two_levels() {
        let (m, mt) = build_matrices(&WeightField::all_ones(2, 5)).unwrap();
        assert_eq!(m.get(1, 3), &r("3"));
        for u in 1..=5 {
            for v in u..=5 {
                assert_eq!(m.get(u, v), &Rational::from_integer((v - u + 1).into()));
            }
        }
        assert_eq!(m.get(1, 4), mt.get(1, 4));
        assert!(dj_induction_verify(&m, &mt, 2).unwrap().holds);
    }

    #[test]
    fn identity_condensation() {
        let id = TriMatrix::identity(3);
        assert!(desnanot_jacobi_check(&id, 2, 2, 2).unwrap().holds);
        assert!(desnanot_jacobi_check(&id, 1, 2, 2).is_err());
    }

    #[test]
    fn random_three_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = WeightField::random(&mut rng, 3, 6);
        let (m, mt) = build_matrices(&d).unwrap();
        let verdict = dj_induction_verify(&m, &mt, 3).unwrap();
        assert!(verdict.holds, "{verdict:?}");
        assert_eq!(m, mt);
    }

    #[test]
    fn corrupted_entry_is_caught() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = WeightField::random(&mut rng, 2, 5);
        let (m, mut mt) = build_matrices(&d).unwrap();
        let bumped = mt.get(2, 4) + Rational::one();
        mt.set(2, 4, bumped);
        let verdict = dj_induction_verify(&m, &mt, 2).unwrap();
        assert!(!verdict.holds);
        assert!(verdict.counterexample.is_some());
    }
}
