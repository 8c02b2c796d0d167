//! Exact arithmetic: `Q`, `Q[t1..tk]`, the fraction field `Q(t1..tk)`, and
//! `F2[x]`.

mod gcd;
mod gf2;
mod monomial;
mod poly;
mod ratfunc;

pub use gcd::poly_gcd;
pub use gf2::GF2Poly;
pub use monomial::{Monomial, MultiIndex};
pub use num_rational::BigRational;
pub use poly::MultiPoly;
pub use ratfunc::RatFunc;

/// Canonical representative of `num / den` in the fraction field.
pub fn ratfunc_normalize(num: MultiPoly, den: MultiPoly) -> crate::Result<RatFunc> {
    RatFunc::new(num, den)
}

/// Exact value of `f` at `point`.
pub fn evaluate(f: &RatFunc, point: &[BigRational]) -> crate::Result<BigRational> {
    f.evaluate(point)
}
