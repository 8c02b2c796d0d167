//! Exact symbolic calculus of derivations, higher-order derivations and
//! differential operators over the rational function field `Q(t1, ..., tk)`.

pub mod deriv;
pub mod error;
pub mod exactnum;
pub mod fixtures;
pub mod genpoly;
pub mod leibniz;
pub mod linalg;
pub mod reconstruct;
pub mod sample;
pub mod syntax;

pub use deriv::{Derivation, DiffOp, OpWord};
pub use error::{Error, Result};
pub use genpoly::{ExpPoly, SemigroupMap};
pub use exactnum::{BigRational, GF2Poly, Monomial, MultiIndex, MultiPoly, RatFunc};
pub use leibniz::{MapTable, PointMap};
