//! Exact directed-polymer partition functions on the lattice `Z≥1 × [1, n]`,
//! geometric Pitman transforms, geometric RSK, and the invariance
//! `D[U → V] = (W D)[↑U → V]` together with its zero-temperature and
//! semi-discrete counterparts.

pub mod error;
pub mod grsk;
pub mod invariance;
pub mod lattice;
pub mod lgv;
pub mod matrix;
pub mod numerics;
pub mod partition;
pub mod pitman;
pub mod random;
pub mod semidiscrete;
pub mod tropical;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{DomainProfile, EndpointPair, Multipath, Point};
pub use numerics::{LogValue, PosRational, Rational, TropValue};
pub use partition::WeightField;
pub use pitman::StairFunction;
pub use semidiscrete::{PLFunction, SdEndpoints};
pub use verify::Verdict;
