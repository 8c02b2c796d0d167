use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::monomial::Monomial;
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// Element of the rational function field `K = Q(t1, ..., tk)`.
///
/// Always stored in canonical form: `gcd(num, den) = 1` and `den` is monic
/// with respect to the graded-lex order. Zero is `0/1`. Structural equality
/// is therefore equality in `K`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    /// Canonical representative of `num / den`.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        assert_eq!(num.nvars(), den.nvars(), "numerator and denominator arity");
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: MultiPoly, den: MultiPoly) -> Self {
        let nvars = num.nvars();
        if num.is_zero() {
            return RatFunc::zero(nvars);
        }
        if let Some(c) = den.constant_value() {
            return RatFunc {
                num: num.scale(&c.recip()),
                den: MultiPoly::one(nvars),
            };
        }
        let (num, den) = if num.is_constant() {
            (num, den)
        } else {
            let g = poly_gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        Self::make_monic(num, den)
    }

    /// Assumes `num` and `den` coprime.
    fn make_monic(num: MultiPoly, den: MultiPoly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero(nvars: usize) -> Self {
        RatFunc {
            num: MultiPoly::zero(nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(MultiPoly::one(nvars))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let nvars = p.nvars();
        RatFunc {
            num: p,
            den: MultiPoly::one(nvars),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::from_poly(MultiPoly::constant(nvars, c))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(nvars, c))
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::from_poly(MultiPoly::var(nvars, var))
    }

    /// `t^m` for a monomial `m`.
    pub fn monomial(m: &Monomial) -> Self {
        Self::from_poly(MultiPoly::monomial(m.clone(), BigRational::one()))
    }

    /// `t^(-m)`.
    pub fn inverse_monomial(m: &Monomial) -> Self {
        let nvars = m.nvars();
        RatFunc {
            num: MultiPoly::one(nvars),
            den: MultiPoly::monomial(m.clone(), BigRational::one()),
        }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value of a constant element of `K`.
    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Size measure used for pivoting: total number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    /// Equality of `a/b` and `c/d` by cross-multiplication, without
    /// normalizing either side. Agrees with equality of canonical forms.
    pub fn same_value(a: &MultiPoly, b: &MultiPoly, c: &MultiPoly, d: &MultiPoly) -> bool {
        assert!(!b.is_zero() && !d.is_zero(), "zero denominator");
        a * d == b * c
    }

    pub fn scale(&self, c: &BigRational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.nvars());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::make_monic(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        // Powers of coprime polynomials stay coprime.
        Self::make_monic(self.num.pow(e), self.den.pow(e))
    }

    /// Partial derivative with respect to `t_{var+1}` (quotient rule).
    pub fn derivative(&self, var: usize) -> RatFunc {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative(var));
        }
        let dn = self.num.derivative(var);
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::normalize(dn, self.den.clone());
        }
        // (n' d - n d') / d^2
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalize(top, &self.den * &self.den)
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: point.len(),
            });
        }
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.eval(point) / d)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &rhs.num);
            }
            return RatFunc::normalize(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            // n + a/b = (n b + a) / b stays reduced.
            return RatFunc {
                num: &(&self.num * &rhs.den) + &rhs.num,
                den: rhs.den.clone(),
            };
        }
        if rhs.den.is_one() {
            return RatFunc {
                num: &(&rhs.num * &self.den) + &self.num,
                den: self.den.clone(),
            };
        }
        let g = poly_gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            if num.is_zero() {
                return RatFunc::zero(self.nvars());
            }
            // Coprime denominators: the sum is already reduced.
            return RatFunc::make_monic(num, &self.den * &rhs.den);
        }
        let bg = self.den.div_exact(&g).expect("gcd divides");
        let dg = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &dg) + &(&rhs.num * &bg);
        if num.is_zero() {
            return RatFunc::zero(self.nvars());
        }
        let den = &self.den * &dg;
        let h = poly_gcd(&num, &g);
        if h.is_one() {
            RatFunc::make_monic(num, den)
        } else {
            RatFunc::make_monic(
                num.div_exact(&h).expect("gcd divides"),
                den.div_exact(&h).expect("gcd divides"),
            )
        }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.nvars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // Cross-cancel: gcd(a, b) = gcd(c, d) = 1, so only a/d and c/b can share factors.
        let (a, d) = cancel(&self.num, &rhs.den);
        let (c, b) = cancel(&rhs.num, &self.den);
        RatFunc::make_monic(&a * &c, &b * &d)
    }
}

fn cancel(n: &MultiPoly, d: &MultiPoly) -> (MultiPoly, MultiPoly) {
    if n.is_constant() || d.is_constant() {
        return (n.clone(), d.clone());
    }
    let g = poly_gcd(n, d);
    if g.is_one() {
        (n.clone(), d.clone())
    } else {
        (
            n.div_exact(&g).expect("gcd divides"),
            d.div_exact(&g).expect("gcd divides"),
        )
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $f(self, rhs: RatFunc) -> RatFunc {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $f(self, rhs: &RatFunc) -> RatFunc {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_factor(p: &MultiPoly, denominator: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // Left of '/' any single term reads correctly; right of it only a
    // constant or a power of one variable does.
    let bare = p.num_terms() == 1 && {
        let (m, c) = p.leading_term().unwrap();
        !denominator || m.is_one() || (c.is_one() && m.support().count() == 1)
    };
    if bare {
        write!(f, "{p}")
    } else {
        write!(f, "({p})")
    }
}

impl fmt::Display for RatFunc {
    /// `num` for polynomials, otherwise `num/den` with parenthesized factors,
    /// e.g. `(t1 + 1)/(t2^2 - 2)`. Output parses back to the same element.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        fmt_factor(&self.num, false, f)?;
        f.write_str("/")?;
        fmt_factor(&self.den, true, f)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}
