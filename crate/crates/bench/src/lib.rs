//! Seeded inputs shared by the benchmarks.

use derivcalc_core::reconstruct::GridValues;
use derivcalc_core::sample::{Sampler, DEFAULT_SEED};
use derivcalc_core::{Derivation, DiffOp, MultiPoly, OpWord, RatFunc};

pub const NVARS: usize = 2;

fn sampler(salt: u64) -> Sampler {
    Sampler::new(DEFAULT_SEED ^ salt, NVARS)
}

/// Two polynomials sharing a random factor.
pub fn gcd_pair(degree: u32) -> (MultiPoly, MultiPoly) {
    let mut s = sampler(1);
    let g = s.nonconstant_poly(degree, 5);
    let a = &g * &s.nonconstant_poly(degree, 5);
    let b = &g * &s.nonconstant_poly(degree, 5);
    (a, b)
}

/// A word of `len` random derivations.
pub fn word(len: usize) -> OpWord {
    let mut s = sampler(2);
    let ds: Vec<Derivation> = (0..len).map(|_| s.derivation()).collect();
    OpWord::single(RatFunc::one(NVARS), ds).expect("consistent arity")
}

pub fn operator_pair(degree: i64) -> (DiffOp, DiffOp) {
    let mut s = sampler(3);
    (s.diffop(degree, false), s.diffop(degree, false))
}

pub fn grid(degree: u32) -> GridValues {
    let e = sampler(4).diffop(degree as i64, false);
    GridValues::tabulate(&e, degree).expect("operators are defined on the grid")
}

/// Operator and a non-polynomial argument.
pub fn apply_input(degree: i64) -> (DiffOp, RatFunc) {
    let mut s = sampler(5);
    (s.diffop(degree, true), s.proper_fraction())
}
