//! For two levels, the interval `(z_i, z_{i+1}]` between consecutive
//! endpoint times is crossed by the same number of paths (its type) in
//! every multipath, so free energies factor over the intervals.

use crate::error::{Error, Result};
use crate::numerics::{format_rational, Rational};

use super::{free_energy, PLFunction, SdEndpoints};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedInterval {
    pub start: Rational,
    pub end: Rational,
    pub kind: usize,
}

/// Types of the nonempty intervals between sorted endpoint times, for
/// paths `(u_i, 2) → (v_i, 1)`.
pub fn type_decompose(us: &[Rational], vs: &[Rational]) -> Result<Vec<TypedInterval>> {
    if us.is_empty() || us.len() != vs.len() {
        return Err(Error::InvalidInput(format!("need k ≥ 1 starts and ends, got {} and {}", us.len(), vs.len())));
    }
    if us.windows(2).any(|w| w[0] >= w[1]) || vs.windows(2).any(|w| w[0] >= w[1]) || us.iter().zip(vs).any(|(u, v)| u >= v) {
        return Err(Error::InvalidInput("need u_1 < … < u_k, v_1 < … < v_k and u_i < v_i".into()));
    }
    let mut z: Vec<&Rational> = us.iter().chain(vs).collect();
    z.sort();
    z.dedup();
    let mut out = Vec::new();
    for w in z.windows(2) {
        let kind = us.iter().zip(vs).filter(|(u, v)| *u <= w[0] && *v >= w[1]).count();
        if kind > 2 {
            return Err(Error::InvalidInput(format!(
                "{kind} paths cross ({}, {}] on two levels",
                format_rational(w[0]),
                format_rational(w[1])
            )));
        }
        out.push(TypedInterval { start: w[0].clone(), end: w[1].clone(), kind });
    }
    Ok(out)
}

/// `f[U → V]` for two levels as the sum over typed intervals: one path
/// `(a, 2) → (b, 1)` on type 1, the two frozen paths on type 2.
pub fn decomposed_free_energy(f: &[PLFunction], us: &[Rational], vs: &[Rational], tol: f64) -> Result<f64> {
    if f.len() != 2 {
        return Err(Error::InvalidInput(format!("type decomposition needs n = 2, got {}", f.len())));
    }
    let mut total = 0.0;
    for piece in type_decompose(us, vs)? {
        let (a, b) = (piece.start, piece.end);
        let ends = match piece.kind {
            0 => continue,
            1 => SdEndpoints::bottom_to_top(&[a], &[b], 2)?,
            _ => SdEndpoints::new(vec![(a.clone(), 1), (a, 2)], vec![(b.clone(), 1), (b, 2)], 2)?,
        };
        total += free_energy(f, &ends, tol)?.value();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn rs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| r(s)).collect()
    }

    #[test]
    fn figure_configuration() {
        // u_1 < u_2 < v_1 < u_3 < v_2 < v_3 < u_4 < v_4
        let us = rs(&["1", "2", "4", "7"]);
        let vs = rs(&["3", "5", "6", "8"]);
        let kinds: Vec<usize> = type_decompose(&us, &vs).unwrap().iter().map(|p| p.kind).collect();
        assert_eq!(kinds, vec![1, 2, 1, 2, 1, 0, 1]);
    }

    #[test]
    fn single_path_is_one_interval() {
        let t = type_decompose(&rs(&["1/3"]), &rs(&["2/3"])).unwrap();
        assert_eq!(t, vec![TypedInterval { start: r("1/3"), end: r("2/3"), kind: 1 }]);
    }

    #[test]
    fn three_overlapping_paths_are_rejected() {
        assert!(type_decompose(&rs(&["0", "1", "2"]), &rs(&["3", "4", "5"])).is_err());
    }
}
