//! Seeded generators for sample elements, derivations and operators.
//!
//! All randomized checks in the crate draw from [`Sampler`], which wraps a
//! ChaCha stream so a given seed yields the same data on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_rational::BigRational;

use crate::deriv::{Derivation, DiffOp};
use crate::exactnum::{Monomial, MultiPoly, RatFunc};

/// Default seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_0D1F;

pub struct Sampler {
    rng: ChaCha8Rng,
    nvars: usize,
}

/// All exponent vectors in `nvars` variables of total degree `<= max_deg`,
/// in ascending graded-lex order.
pub fn monomials_up_to(nvars: usize, max_deg: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial::new(prefix.clone()));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), nvars, max_deg, &mut out);
    out.sort();
    out
}

impl Sampler {
    pub fn new(seed: u64, nvars: usize) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            nvars,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Dense random polynomial: every monomial of degree `<= max_deg` gets a
    /// coefficient uniform in `{-bound..bound}`. May be zero.
    pub fn poly(&mut self, max_deg: u32, bound: i64) -> MultiPoly {
        let terms: Vec<_> = monomials_up_to(self.nvars, max_deg)
            .into_iter()
            .map(|m| (m, BigRational::from_integer(self.int(-bound, bound).into())))
            .collect();
        MultiPoly::from_terms(self.nvars, terms)
    }

    pub fn nonzero_poly(&mut self, max_deg: u32, bound: i64) -> MultiPoly {
        loop {
            let p = self.poly(max_deg, bound);
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn nonconstant_poly(&mut self, max_deg: u32, bound: i64) -> MultiPoly {
        assert!(max_deg >= 1);
        loop {
            let p = self.poly(max_deg, bound);
            if !p.is_constant() {
                return p;
            }
        }
    }

    /// Small polynomial sample element: degree `<= 3`, coefficients in `{-3..3}`.
    pub fn element(&mut self) -> RatFunc {
        RatFunc::from_poly(self.nonzero_poly(3, 3))
    }

    /// A tuple of `len` sample elements.
    pub fn tuple(&mut self, len: usize) -> Vec<RatFunc> {
        (0..len).map(|_| self.element()).collect()
    }

    /// Rational function that is not a polynomial: numerator of degree
    /// `<= 2`, nonconstant denominator of degree `<= 1`.
    pub fn proper_fraction(&mut self) -> RatFunc {
        loop {
            let num = self.nonzero_poly(2, 3);
            let den = self.nonconstant_poly(1, 3);
            let f = RatFunc::new(num, den).expect("nonzero denominator");
            if !f.is_polynomial() {
                return f;
            }
        }
    }

    /// Nonzero derivation with polynomial images of degree `<= 2` and
    /// coefficients in `{-3..3}`.
    pub fn derivation(&mut self) -> Derivation {
        loop {
            let images = (0..self.nvars)
                .map(|_| RatFunc::from_poly(self.poly(2, 3)))
                .collect();
            let d = Derivation::new(images).expect("consistent arity");
            if !d.is_zero() {
                return d;
            }
        }
    }

    /// Small coefficient in `K`: a polynomial of degree `<= 1`, occasionally
    /// divided by a linear factor.
    pub fn coefficient(&mut self) -> RatFunc {
        let num = RatFunc::from_poly(self.nonzero_poly(1, 3));
        if self.coin(0.25) {
            let den = RatFunc::from_poly(self.nonconstant_poly(1, 2));
            num.checked_div(&den).expect("nonzero denominator")
        } else {
            num
        }
    }

    /// Random operator of degree exactly `degree` (zero operator when
    /// `degree < 0`). With `require_o0` the identity term is omitted; then
    /// `degree` must be positive.
    pub fn diffop(&mut self, degree: i64, require_o0: bool) -> DiffOp {
        let n = self.nvars;
        if degree < 0 {
            return DiffOp::zero(n);
        }
        assert!(!(require_o0 && degree == 0), "O_0 has no degree-0 operators");
        let deg = degree as u32;
        let all = monomials_up_to(n, deg);
        let top: Vec<_> = all.iter().filter(|a| a.total_degree() == deg).cloned().collect();
        let mut terms = Vec::new();
        // one guaranteed top-degree term
        terms.push((top[self.index(top.len())].clone(), self.coefficient()));
        for alpha in all {
            if require_o0 && alpha.is_one() {
                continue;
            }
            if self.coin(0.4) {
                terms.push((alpha, self.coefficient()));
            }
        }
        let op = DiffOp::from_terms(n, terms);
        if op.degree() == degree {
            op
        } else {
            // the top term cancelled against its duplicate; redraw
            self.diffop(degree, require_o0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_up_to(2, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn deterministic_given_seed() {
        let a: Vec<_> = { let mut s = Sampler::new(7, 2); (0..5).map(|_| s.element()).collect() };
        let b: Vec<_> = { let mut s = Sampler::new(7, 2); (0..5).map(|_| s.element()).collect() };
        assert_eq!(a, b);
    }

    #[test]
    fn diffop_has_requested_degree() {
        let mut s = Sampler::new(1, 2);
        for deg in 1..4 {
            let e = s.diffop(deg, true);
            assert_eq!(e.degree(), deg);
            assert!(e.is_in_o0());
        }
        assert_eq!(s.diffop(0, false).degree(), 0);
    }
}
