use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;

/// Sparse polynomial in `Q[t1, ..., tk]`.
///
/// Terms are kept in a map ordered graded-lexicographically, so the last
/// entry is the leading term. No stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(c.into()))
    }

    /// The polynomial `t_{var+1}` (variables are 0-based internally).
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(Monomial::var(nvars, var), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { nvars, terms }
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = add_coeff(o.get(), &c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial (including zero).
    pub fn constant_value(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.leading_term()
            .map(|(m, _)| m.total_degree() as i64)
            .unwrap_or(-1)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.get(var)).max().unwrap_or(0)
    }

    /// Whether each variable occurs in some term.
    pub fn occurring_vars(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nvars];
        for m in self.terms.keys() {
            for v in m.support() {
                seen[v] = true;
            }
        }
        seen
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), mul_coeff(a, c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to `t_{var+1}`.
    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.get(var);
            if e > 0 {
                let c = mul_coeff(c, &BigRational::from_integer(BigInt::from(e)));
                out.terms.insert(m.with(var, e - 1), c);
            }
        }
        out
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars, "evaluation point arity");
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves
    /// a remainder. Panics on a zero divisor.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        let (lm, lc) = divisor.leading_term().expect("division by zero polynomial");
        if divisor.terms.len() == 1 {
            let inv = lc.recip();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.div(lm)?, c * &inv);
            }
            return Some(MultiPoly {
                nvars: self.nvars,
                terms,
            });
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        // over Z: the quotient of primitive integer polynomials is integral
        let (sc, s) = self.integer_primitive();
        let (dc, d) = divisor.integer_primitive();
        let quot = div_integral(&s, &d)?;
        let scale = sc / dc;
        Some(MultiPoly {
            nvars: self.nvars,
            terms: quot
                .into_iter()
                .map(|(m, c)| (m, BigRational::from_integer(c) * &scale))
                .collect(),
        })
    }

    /// Split as a polynomial in `t_{var+1}`: entry `d` holds the coefficient
    /// of `t^d`, itself free of that variable.
    pub fn to_univariate(&self, var: usize) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(self.nvars); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let d = m.get(var) as usize;
            out[d].terms.insert(m.with(var, 0), c.clone());
        }
        out
    }

    pub fn from_univariate(var: usize, coeffs: &[MultiPoly]) -> MultiPoly {
        let nvars = coeffs.first().map(|c| c.nvars).unwrap_or(0);
        let mut out = MultiPoly::zero(nvars);
        for (d, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                out.add_term(m.with(var, m.get(var) + d as u32), a.clone());
            }
        }
        out
    }

    /// Write `self = content * primitive` with `primitive` having coprime
    /// integer coefficients and a positive leading coefficient.
    pub fn integer_primitive(&self) -> (BigRational, MultiPoly) {
        if self.is_zero() {
            return (BigRational::zero(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> MultiPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }
}

/// `a * b`, skipping the gcd reduction when both are integers.
fn mul_coeff(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

/// `a + b`, skipping the gcd reduction when both are integers.
fn add_coeff(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

/// Merge of two sorted term lists, `b` negated when `negate` is set.
fn merge(a: &MultiPoly, b: &MultiPoly, negate: bool) -> MultiPoly {
    debug_assert_eq!(a.nvars, b.nvars);
    let mut terms = BTreeMap::new();
    let mut left = a.terms.iter().peekable();
    let mut right = b.terms.iter().map(|(m, c)| (m, if negate { -c } else { c.clone() })).peekable();
    loop {
        let take_left = match (left.peek(), right.peek()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some((ma, _)), Some((mb, _))) => match (*ma).cmp(*mb) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    let (m, ca) = left.next().unwrap();
                    let (_, cb) = right.next().unwrap();
                    let sum = add_coeff(ca, &cb);
                    if !sum.is_zero() {
                        terms.insert(m.clone(), sum);
                    }
                    continue;
                }
            },
        };
        if take_left {
            let (m, c) = left.next().unwrap();
            terms.insert(m.clone(), c.clone());
        } else {
            let (m, c) = right.next().unwrap();
            terms.insert(m.clone(), c);
        }
    }
    MultiPoly {
        nvars: a.nvars,
        terms,
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        merge(self, rhs, false)
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        merge(self, rhs, true)
    }
}

/// Exponent vectors of at most four variables packed 16 bits apiece, used
/// as cheap keys by the machine-integer product below.
const PACK_VARS: usize = 4;
const PACK_BITS: u32 = 16;

fn pack(m: &Monomial) -> u64 {
    m.exponents()
        .iter()
        .fold(0u64, |acc, &e| (acc << PACK_BITS) | u64::from(e))
}

fn unpack(mut key: u64, nvars: usize) -> Monomial {
    let mut exps = vec![0u32; nvars];
    for e in exps.iter_mut().rev() {
        *e = (key & ((1 << PACK_BITS) - 1)) as u32;
        key >>= PACK_BITS;
    }
    Monomial::new(exps)
}

/// `p = q / den` with `q` an integer polynomial on packed exponents.
fn integer_image(p: &MultiPoly) -> (BigInt, Vec<(u64, BigInt)>) {
    let den = p
        .terms
        .values()
        .fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { acc.lcm(c.denom()) });
    let out = p
        .terms
        .iter()
        .map(|(m, c)| {
            let scaled = if den.is_one() {
                c.numer().clone()
            } else {
                c.numer() * (&den / c.denom())
            };
            (pack(m), scaled)
        })
        .collect();
    (den, out)
}

fn small_image(p: &[(u64, BigInt)]) -> Option<(Vec<(u64, i64)>, u64)> {
    let mut max = 0u64;
    let out = p
        .iter()
        .map(|(k, c)| {
            let v = i64::try_from(c).ok()?;
            max = max.max(v.unsigned_abs());
            Some((*k, v))
        })
        .collect::<Option<_>>()?;
    Some((out, max))
}

/// Product through packed exponents, with `i128` accumulation when that
/// is exact and `BigInt` otherwise; `None` when exponents do not pack.
fn mul_packed(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    if a.nvars > PACK_VARS || a.total_degree() + b.total_degree() >= 1 << PACK_BITS {
        return None;
    }
    let (da, ia) = integer_image(a);
    let (db, ib) = integer_image(b);
    let sums: Vec<(u64, BigInt)> = match mul_i128(&ia, &ib) {
        Some(s) => s,
        None => {
            let mut acc: std::collections::HashMap<u64, BigInt> =
                std::collections::HashMap::with_capacity(ia.len() * ib.len());
            for (ka, ca) in &ia {
                for (kb, cb) in &ib {
                    *acc.entry(ka + kb).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        }
    };
    let den = da * db;
    let terms = sums
        .into_iter()
        .map(|(key, c)| {
            let c = if den.is_one() {
                BigRational::from_integer(c)
            } else {
                BigRational::new(c, den.clone())
            };
            (unpack(key, a.nvars), c)
        })
        .collect();
    Some(MultiPoly {
        nvars: a.nvars,
        terms,
    })
}

/// Accumulate into a dense array over the exponent box of the product,
/// when that box is not much larger than the number of products.
fn mul_dense(sa: &[(u64, i64)], sb: &[(u64, i64)]) -> Option<Vec<(u64, BigInt)>> {
    let field = |k: u64, i: usize| (k >> (PACK_BITS as usize * i)) & ((1 << PACK_BITS) - 1);
    let mut dims = [1u64; PACK_VARS];
    for (i, d) in dims.iter_mut().enumerate() {
        let ma = sa.iter().map(|&(k, _)| field(k, i)).max().unwrap_or(0);
        let mb = sb.iter().map(|&(k, _)| field(k, i)).max().unwrap_or(0);
        *d = ma + mb + 1;
    }
    let size = dims.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))?;
    if size > (4 * sa.len() * sb.len()).max(1024) as u64 {
        return None;
    }
    let mut strides = [1u64; PACK_VARS];
    for i in 1..PACK_VARS {
        strides[i] = strides[i - 1] * dims[i - 1];
    }
    let index = |k: u64| -> usize { (0..PACK_VARS).map(|i| field(k, i) * strides[i]).sum::<u64>() as usize };
    let ib: Vec<(usize, i128)> = sb.iter().map(|&(k, c)| (index(k), i128::from(c))).collect();
    let mut acc = vec![0i128; size as usize];
    for &(ka, ca) in sa {
        let (base, ca) = (index(ka), i128::from(ca));
        for &(j, cb) in &ib {
            acc[base + j] += ca * cb;
        }
    }
    let mut out = Vec::new();
    for (idx, c) in acc.into_iter().enumerate() {
        if c != 0 {
            let mut rest = idx as u64;
            let mut key = 0u64;
            for i in (0..PACK_VARS).rev() {
                key |= (rest / strides[i]) << (PACK_BITS as usize * i);
                rest %= strides[i];
            }
            out.push((key, BigInt::from(c)));
        }
    }
    Some(out)
}

/// Nonzero coefficient sums of the product, when `i128` cannot overflow.
fn mul_i128(ia: &[(u64, BigInt)], ib: &[(u64, BigInt)]) -> Option<Vec<(u64, BigInt)>> {
    let (sa, ma) = small_image(ia)?;
    let (sb, mb) = small_image(ib)?;
    let bound = u128::from(ma)
        .checked_mul(u128::from(mb))?
        .checked_mul(sa.len().min(sb.len()) as u128)?;
    if bound > i128::MAX as u128 {
        return None;
    }
    if let Some(out) = mul_dense(&sa, &sb) {
        return Some(out);
    }
    let mut prods: Vec<(u64, i128)> = Vec::with_capacity(sa.len() * sb.len());
    for &(ka, ca) in &sa {
        for &(kb, cb) in &sb {
            prods.push((ka + kb, i128::from(ca) * i128::from(cb)));
        }
    }
    prods.sort_unstable_by_key(|&(k, _)| k);
    let mut out = Vec::new();
    let mut i = 0;
    while i < prods.len() {
        let key = prods[i].0;
        let mut acc = 0i128;
        while i < prods.len() && prods[i].0 == key {
            acc += prods[i].1;
            i += 1;
        }
        if acc != 0 {
            out.push((key, BigInt::from(acc)));
        }
    }
    Some(out)
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        mul_packed(self, rhs).unwrap_or_else(|| mul_terms(self, rhs))
    }
}

fn mul_terms(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(a.nvars);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            out.add_term(ma.mul(mb), ca * cb);
        }
    }
    out
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Exact quotient of integer polynomials, `None` on a remainder.
fn div_integral(s: &MultiPoly, d: &MultiPoly) -> Option<BTreeMap<Monomial, BigInt>> {
    let small = s.nvars <= PACK_VARS
        && s.total_degree() < 1 << (PACK_BITS - 1)
        && d.total_degree() < 1 << (PACK_BITS - 1);
    if small {
        div_packed(s, d)
    } else {
        div_termwise(s, d)
    }
}

/// `div_integral` on packed exponents, dividing in lex order.
fn div_packed(s: &MultiPoly, d: &MultiPoly) -> Option<BTreeMap<Monomial, BigInt>> {
    let nvars = s.nvars;
    let packed = |p: &MultiPoly| -> Vec<(u64, BigInt)> {
        p.terms.iter().map(|(m, c)| (pack(m), c.numer().clone())).collect()
    };
    let mut divisor = packed(d);
    divisor.sort_unstable_by_key(|(k, _)| *k);
    let (lm, lc) = divisor.pop().expect("nonzero divisor");
    let field = (1u64 << PACK_BITS) - 1;
    let divides = |m: u64| {
        (0..nvars).all(|i| (m >> (PACK_BITS as usize * i)) & field >= (lm >> (PACK_BITS as usize * i)) & field)
    };
    let mut rem: BTreeMap<u64, BigInt> = packed(s).into_iter().collect();
    let mut quot = BTreeMap::new();
    while let Some((m, c)) = rem.pop_last() {
        if !divides(m) {
            return None;
        }
        let qm = m - lm;
        let (qc, r) = c.div_rem(&lc);
        if !r.is_zero() {
            return None;
        }
        for (dm, dc) in &divisor {
            use std::collections::btree_map::Entry;
            let t = dc * &qc;
            match rem.entry(dm + qm) {
                Entry::Vacant(v) => {
                    v.insert(-t);
                }
                Entry::Occupied(mut o) => {
                    *o.get_mut() -= t;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        quot.insert(unpack(qm, nvars), qc);
    }
    Some(quot)
}

fn div_termwise(s: &MultiPoly, d: &MultiPoly) -> Option<BTreeMap<Monomial, BigInt>> {
    let numer = |p: &MultiPoly| -> Vec<(Monomial, BigInt)> {
        p.terms.iter().map(|(m, c)| (m.clone(), c.numer().clone())).collect()
    };
    let divisor = numer(d);
    let (lm, lc) = divisor.last().expect("nonzero divisor").clone();
    let mut rem: BTreeMap<Monomial, BigInt> = numer(s).into_iter().collect();
    let mut quot = BTreeMap::new();
    while let Some((m, c)) = rem.pop_last() {
        let qm = m.div(&lm)?;
        let (qc, r) = c.div_rem(&lc);
        if !r.is_zero() {
            return None;
        }
        for (dm, dc) in &divisor[..divisor.len() - 1] {
            use std::collections::btree_map::Entry;
            let t = dc * &qc;
            match rem.entry(dm.mul(&qm)) {
                Entry::Vacant(v) => {
                    v.insert(-t);
                }
                Entry::Occupied(mut o) => {
                    *o.get_mut() -= t;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        quot.insert(qm, qc);
    }
    Some(quot)
}

impl fmt::Display for MultiPoly {
    /// Terms in descending graded-lex order, e.g. `t1^2 - 1/2*t2 + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                fmt_rational(&mag, f)?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                fmt_rational(&mag, f)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}
