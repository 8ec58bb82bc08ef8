//! Instance files: exact data, endpoints and the seed that generated them.
//!
//! Rationals are stored as canonical `"p/q"` strings; decimal strings are
//! accepted on input and rewritten canonically.

use clap::ValueEnum;
use grsk_core::numerics::{format_rational, parse_rational};
use grsk_core::random::{bottom_to_top_pair, sorted_columns};
use grsk_core::semidiscrete::zero::free_energy0;
use grsk_core::tropical::{HeightField, HeightFunction};
use grsk_core::{lattice, Error, PLFunction, PosRational, Rational, Result, SdEndpoints, TropValue, WeightField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: u32 = 1;

/// Denominator of the time grid used for generated semi-discrete endpoints.
pub const TIME_GRID: usize = 32;

const TRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Discrete,
    Tropical,
    #[value(alias = "semi")]
    Semidiscrete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub seed: u64,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Body {
    /// `weights[m − 1][x − 1]` is the vertex weight `d(x, m)`.
    Discrete { n: usize, width: usize, k: usize, weights: Vec<Vec<String>>, us: Vec<usize>, vs: Vec<usize> },
    /// `increments[m − 1][x − 1] = f_m(x) − f_m(x − 1)`.
    Tropical { n: usize, width: usize, k: usize, increments: Vec<Vec<String>>, us: Vec<usize>, vs: Vec<usize> },
    /// Starts on level `n`, ends on level 1.
    Semidiscrete { n: usize, horizon: String, k: usize, functions: Vec<PlData>, starts: Vec<String>, ends: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlData {
    pub knots: Vec<String>,
    pub values: Vec<String>,
}

/// A parsed instance.
#[derive(Clone, Debug)]
pub enum Instance {
    Discrete { d: WeightField, us: Vec<usize>, vs: Vec<usize> },
    Tropical { f: HeightField, us: Vec<usize>, vs: Vec<usize> },
    Semidiscrete { f: Vec<PLFunction>, us: Vec<Rational>, vs: Vec<Rational> },
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Discrete { .. } => Kind::Discrete,
            Instance::Tropical { .. } => Kind::Tropical,
            Instance::Semidiscrete { .. } => Kind::Semidiscrete,
        }
    }
}

/// Size parameters for [`generate`].
#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    pub width: usize,
    pub breaks: usize,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn rationals(row: &[String]) -> Result<Vec<Rational>> {
    row.iter().map(|s| parse_rational(s)).collect()
}

fn strings(row: &[Rational]) -> Vec<String> {
    row.iter().map(format_rational).collect()
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(bad(format!("{what}: expected {want} entries, found {got}")));
    }
    Ok(())
}

fn check_grid(what: &str, rows: &[Vec<String>], n: usize, width: usize) -> Result<()> {
    check_len(what, rows.len(), n)?;
    rows.iter().try_for_each(|r| check_len(what, r.len(), width))
}

impl InstanceFile {
    pub fn kind(&self) -> Kind {
        match self.body {
            Body::Discrete { .. } => Kind::Discrete,
            Body::Tropical { .. } => Kind::Tropical,
            Body::Semidiscrete { .. } => Kind::Semidiscrete,
        }
    }

    /// Parses and validates, returning the canonical form.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: InstanceFile = serde_json::from_str(text).map_err(|e| bad(format!("malformed instance file: {e}")))?;
        if raw.version != VERSION {
            return Err(bad(format!("unsupported instance version {}", raw.version)));
        }
        Ok(InstanceFile::from_instance(&raw.instance()?, raw.seed))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files always serialize");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical JSON text.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn instance(&self) -> Result<Instance> {
        match &self.body {
            Body::Discrete { n, width, k, weights, us, vs } => {
                check_grid("weights", weights, *n, *width)?;
                check_len("us", us.len(), *k)?;
                check_len("vs", vs.len(), *k)?;
                let d: Vec<Vec<PosRational>> =
                    weights.iter().map(|r| r.iter().map(|s| s.parse()).collect()).collect::<Result<_>>()?;
                Ok(Instance::Discrete { d: WeightField::from_vertex_weights(&d)?, us: us.clone(), vs: vs.clone() })
            }
            Body::Tropical { n, width, k, increments, us, vs } => {
                check_grid("increments", increments, *n, *width)?;
                check_len("us", us.len(), *k)?;
                check_len("vs", vs.len(), *k)?;
                let inc: Vec<Vec<Rational>> = increments.iter().map(|r| rationals(r)).collect::<Result<_>>()?;
                Ok(Instance::Tropical { f: HeightField::from_increments(&inc)?, us: us.clone(), vs: vs.clone() })
            }
            Body::Semidiscrete { n, horizon, k, functions, starts, ends } => {
                check_len("functions", functions.len(), *n)?;
                check_len("starts", starts.len(), *k)?;
                check_len("ends", ends.len(), *k)?;
                let horizon = parse_rational(horizon)?;
                let f: Vec<PLFunction> = functions
                    .iter()
                    .map(|g| PLFunction::new(rationals(&g.knots)?, rationals(&g.values)?))
                    .collect::<Result<_>>()?;
                if f.iter().any(|g| *g.horizon() != horizon) {
                    return Err(Error::DomainMismatch("a level function does not end at the horizon".into()));
                }
                let (us, vs) = (rationals(starts)?, rationals(ends)?);
                SdEndpoints::bottom_to_top(&us, &vs, *n)?;
                Ok(Instance::Semidiscrete { f, us, vs })
            }
        }
    }

    pub fn from_instance(inst: &Instance, seed: u64) -> Self {
        let body = match inst {
            Instance::Discrete { d, us, vs } => Body::Discrete {
                n: d.n(),
                width: d.width(),
                k: us.len(),
                weights: (1..=d.n())
                    .map(|m| {
                        (1..=d.width())
                            .map(|x| d.vertex_weight(lattice::Point::new(x, m)).expect("rectangular field").to_string())
                            .collect()
                    })
                    .collect(),
                us: us.clone(),
                vs: vs.clone(),
            },
            Instance::Tropical { f, us, vs } => Body::Tropical {
                n: f.n(),
                width: f.width(),
                k: us.len(),
                increments: (1..=f.n()).map(|m| (1..=f.width()).map(|x| increment(f.level(m), x)).collect()).collect(),
                us: us.clone(),
                vs: vs.clone(),
            },
            Instance::Semidiscrete { f, us, vs } => Body::Semidiscrete {
                n: f.len(),
                horizon: format_rational(f[0].horizon()),
                k: us.len(),
                functions: f.iter().map(|g| PlData { knots: strings(g.knots()), values: strings(g.values()) }).collect(),
                starts: strings(us),
                ends: strings(vs),
            },
        };
        InstanceFile { version: VERSION, seed, body }
    }
}

fn increment(h: &HeightFunction, x: usize) -> String {
    format_rational(&h.increment(x))
}

/// A deterministic instance of `kind` from `seed`.
pub fn generate(kind: Kind, p: GenParams, seed: u64) -> Result<InstanceFile> {
    if p.n < 2 || p.k == 0 {
        return Err(bad(format!("need n ≥ 2 and k ≥ 1, got n = {} and k = {}", p.n, p.k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match kind {
        Kind::Discrete | Kind::Tropical => {
            if p.k > p.width {
                return Err(bad(format!("k = {} exceeds width = {}", p.k, p.width)));
            }
            let pair = |rng: &mut ChaCha8Rng| {
                bottom_to_top_pair(rng, p.n, p.width, p.k, lattice::oracle_bound(), TRIES)
                    .ok_or_else(|| bad(format!("no endpoint pair found for n={} width={} k={}", p.n, p.width, p.k)))
            };
            if kind == Kind::Discrete {
                let d = WeightField::random(&mut rng, p.n, p.width);
                let (us, vs) = pair(&mut rng)?;
                Instance::Discrete { d, us, vs }
            } else {
                let f = HeightField::random(&mut rng, p.n, p.width);
                let (us, vs) = pair(&mut rng)?;
                Instance::Tropical { f, us, vs }
            }
        }
        Kind::Semidiscrete => {
            if 2 * p.k > TIME_GRID || p.breaks >= 64 {
                return Err(bad(format!("need 2k ≤ {TIME_GRID} and fewer than 64 breakpoints")));
            }
            let one = Rational::from_integer(1.into());
            let f: Vec<PLFunction> = (0..p.n).map(|_| PLFunction::random(&mut rng, &one, p.breaks, 1)).collect();
            let (us, vs) = semi_endpoints(&mut rng, p.n, p.k)?;
            Instance::Semidiscrete { f, us, vs }
        }
    };
    Ok(InstanceFile::from_instance(&inst, seed))
}

/// Distinct times `u_i < v_i` on the grid `j / 32`, `j ≥ 1`, that admit a
/// non-intersecting multipath.
fn semi_endpoints(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let one = Rational::from_integer(1.into());
    let flat = vec![PLFunction::zero(one); n];
    let time = |j: usize| Rational::new((j as i64).into(), (TIME_GRID as i64).into());
    for _ in 0..TRIES {
        let us = sorted_columns(rng, TIME_GRID - 1, k);
        let vs: Vec<usize> = sorted_columns(rng, TIME_GRID - 1, k).into_iter().map(|j| j + 1).collect();
        if us.iter().any(|u| vs.contains(u)) || us.iter().zip(&vs).any(|(u, v)| u >= v) {
            continue;
        }
        let (us, vs): (Vec<Rational>, Vec<Rational>) = (us.into_iter().map(time).collect(), vs.into_iter().map(time).collect());
        let ends = SdEndpoints::bottom_to_top(&us, &vs, n)?;
        if free_energy0(&flat, &ends)? != TropValue::NegInf {
            return Ok((us, vs));
        }
    }
    Err(bad(format!("no feasible semi-discrete endpoints for n={n} k={k}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, width: usize) -> GenParams {
        GenParams { n, k, width, breaks: 3 }
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in [Kind::Discrete, Kind::Tropical, Kind::Semidiscrete] {
            let a = generate(kind, params(2, 1, 4), 7).unwrap();
            let b = generate(kind, params(2, 1, 4), 7).unwrap();
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn files_round_trip() {
        for kind in [Kind::Discrete, Kind::Tropical, Kind::Semidiscrete] {
            let a = generate(kind, params(3, 2, 5), 11).unwrap();
            let b = InstanceFile::parse(&a.to_json()).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.digest(), b.digest());
        }
    }

    #[test]
    fn decimals_are_canonicalized() {
        let text = r#"{"version":1,"seed":0,"kind":"discrete","n":2,"width":1,"k":1,
            "weights":[["0.5"],["2/4"]],"us":[1],"vs":[1]}"#;
        let file = InstanceFile::parse(text).unwrap();
        let Body::Discrete { weights, .. } = &file.body else { panic!("kind changed") };
        assert_eq!(weights, &vec![vec!["1/2".to_string()], vec!["1/2".to_string()]]);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(InstanceFile::parse("{").is_err());
        let text = r#"{"version":1,"seed":0,"kind":"discrete","n":2,"width":1,"k":1,
            "weights":[["0"],["1"]],"us":[1],"vs":[1]}"#;
        assert!(matches!(InstanceFile::parse(text), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tropical_heights_are_integers() {
        let file = generate(Kind::Tropical, params(3, 1, 4), 3).unwrap();
        let Body::Tropical { increments, .. } = &file.body else { panic!("kind changed") };
        assert!(increments.iter().flatten().all(|s| !s.contains('/')));
    }

    #[test]
    fn semi_times_sit_on_the_grid() {
        let file = generate(Kind::Semidiscrete, params(3, 2, 0), 5).unwrap();
        let Instance::Semidiscrete { us, vs, .. } = file.instance().unwrap() else { panic!("kind changed") };
        let grid = Rational::from_integer((TIME_GRID as i64).into());
        for t in us.iter().chain(&vs) {
            assert!((t * &grid).is_integer());
            assert!(*t > Rational::from_integer(0.into()));
        }
    }
}
