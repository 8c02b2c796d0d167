//! Derivations on `K = Q(t1..tk)`, formal composition words, and canonical
//! differential operators `sum_alpha c_alpha d^alpha` with `c_alpha` in `K`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{check_dims, Result};
use crate::exactnum::{poly_gcd, MultiIndex, MultiPoly, RatFunc};

/// A derivation `d` on `K`, given by the images `d(t_i)`.
///
/// Every derivation of `Q(t1..tk)` is `sum_i d(t_i) * d/dt_i`, so the images
/// determine it completely.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    images: Vec<RatFunc>,
}

impl Derivation {
    pub fn new(images: Vec<RatFunc>) -> Result<Self> {
        let nvars = images.len();
        for g in &images {
            check_dims(nvars, g.nvars())?;
        }
        Ok(Derivation { images })
    }

    /// The coordinate derivation `d/dt_{var+1}`.
    pub fn partial(nvars: usize, var: usize) -> Self {
        let images = (0..nvars)
            .map(|i| {
                if i == var {
                    RatFunc::one(nvars)
                } else {
                    RatFunc::zero(nvars)
                }
            })
            .collect();
        Derivation { images }
    }

    pub fn zero(nvars: usize) -> Self {
        Derivation {
            images: vec![RatFunc::zero(nvars); nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[RatFunc] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(RatFunc::is_zero)
    }

    /// `d(f) = sum_i d(t_i) * df/dt_i`.
    pub fn apply(&self, f: &RatFunc) -> Result<RatFunc> {
        check_dims(self.nvars(), f.nvars())?;
        let mut acc = RatFunc::zero(self.nvars());
        for (i, g) in self.images.iter().enumerate() {
            if !g.is_zero() {
                acc = &acc + &(g * &f.derivative(i));
            }
        }
        Ok(acc)
    }

    pub fn to_diffop(&self) -> DiffOp {
        let n = self.nvars();
        DiffOp::from_terms(
            n,
            self.images
                .iter()
                .enumerate()
                .map(|(i, g)| (MultiIndex::var(n, i), g.clone())),
        )
    }
}

impl fmt::Display for Derivation {
    /// `t1 -> g1; t2 -> g2`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "t{} -> {}", i + 1, g)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation({self})")
    }
}

/// Formal sum of `coefficient * (d_1 o d_2 o ... o d_m)`.
///
/// Words compose right to left: the last derivation is applied first. The
/// empty word is the identity map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpWord {
    nvars: usize,
    terms: Vec<(RatFunc, Vec<Derivation>)>,
}

impl OpWord {
    pub fn new(nvars: usize) -> Self {
        OpWord {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn single(coeff: RatFunc, word: Vec<Derivation>) -> Result<Self> {
        let mut w = OpWord::new(coeff.nvars());
        w.push(coeff, word)?;
        Ok(w)
    }

    pub fn push(&mut self, coeff: RatFunc, word: Vec<Derivation>) -> Result<()> {
        check_dims(self.nvars, coeff.nvars())?;
        for d in &word {
            check_dims(self.nvars, d.nvars())?;
        }
        self.terms.push((coeff, word));
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(RatFunc, Vec<Derivation>)] {
        &self.terms
    }

    /// Longest word length.
    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    /// Apply the word directly, one derivation at a time.
    pub fn apply(&self, f: &RatFunc) -> Result<RatFunc> {
        check_dims(self.nvars, f.nvars())?;
        let mut acc = RatFunc::zero(self.nvars);
        for (c, word) in &self.terms {
            let mut v = f.clone();
            for d in word.iter().rev() {
                v = d.apply(&v)?;
            }
            acc = &acc + &(c * &v);
        }
        Ok(acc)
    }

    /// Canonical operator equal to this word as a map on `K`.
    pub fn normalize(&self) -> Result<DiffOp> {
        let mut out = DiffOp::zero(self.nvars);
        for (c, word) in &self.terms {
            let mut op = DiffOp::identity(self.nvars);
            for d in word.iter().rev() {
                op = d.to_diffop().compose(&op)?;
            }
            out = out.add(&op.scale(c))?;
        }
        Ok(out)
    }
}

impl fmt::Display for OpWord {
    /// `(c)*((t1 -> 1; t2 -> 0) o (t1 -> t1; t2 -> 1)) + ...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, word)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            if !word.is_empty() {
                f.write_str("*(")?;
                for (j, d) in word.iter().enumerate() {
                    if j > 0 {
                        f.write_str(" o ")?;
                    }
                    write!(f, "({d})")?;
                }
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

/// Canonical differential operator `sum_alpha c_alpha d^alpha`.
///
/// No stored coefficient is zero. Multi-indices follow the graded-lex order
/// of monomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    nvars: usize,
    coeffs: BTreeMap<MultiIndex, RatFunc>,
}

impl DiffOp {
    pub fn zero(nvars: usize) -> Self {
        DiffOp {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn identity(nvars: usize) -> Self {
        Self::scalar(RatFunc::one(nvars))
    }

    /// Multiplication by `c`.
    pub fn scalar(c: RatFunc) -> Self {
        let n = c.nvars();
        Self::from_terms(n, [(MultiIndex::one(n), c)])
    }

    /// `d^alpha`.
    pub fn partial(alpha: MultiIndex) -> Self {
        let n = alpha.nvars();
        Self::from_terms(n, [(alpha, RatFunc::one(n))])
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, RatFunc)>,
    {
        let mut op = DiffOp::zero(nvars);
        for (alpha, c) in terms {
            assert_eq!(alpha.nvars(), nvars, "multi-index arity");
            assert_eq!(c.nvars(), nvars, "coefficient arity");
            op.add_term(alpha, c);
        }
        op
    }

    fn add_term(&mut self, alpha: MultiIndex, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in ascending graded-lex order of the multi-index.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &RatFunc)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<&RatFunc> {
        self.coeffs.get(alpha)
    }

    /// Max `|alpha|` over stored terms, `-1` for the zero operator.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .keys()
            .next_back()
            .map(|a| a.total_degree() as i64)
            .unwrap_or(-1)
    }

    /// Coefficient of the identity term `d^0`, if any.
    pub fn identity_coeff(&self) -> Option<&RatFunc> {
        self.coeffs.get(&MultiIndex::one(self.nvars))
    }

    /// Whether the operator annihilates constants (no `d^0` term).
    pub fn is_in_o0(&self) -> bool {
        self.identity_coeff().is_none()
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        check_dims(self.nvars, other.nvars)?;
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }

    /// Left multiplication `c * E`.
    pub fn scale(&self, c: &RatFunc) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero(self.nvars);
        }
        if c.is_one() {
            return self.clone();
        }
        DiffOp {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(a, x)| (a.clone(), c * x)).collect(),
        }
    }

    /// `d/dt_{var+1} o E`, by the commutation rule
    /// `d_i o (c * d^beta) = (d_i c) * d^beta + c * d^(beta + e_i)`.
    pub fn lmul_partial(&self, var: usize) -> DiffOp {
        let mut out = DiffOp::zero(self.nvars);
        for (beta, c) in &self.coeffs {
            out.add_term(beta.clone(), c.derivative(var));
            out.add_term(beta.bump(var), c.clone());
        }
        out
    }

    /// Canonical form of `self o other` (apply `other` first).
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        check_dims(self.nvars, other.nvars)?;
        let mut cache: HashMap<MultiIndex, DiffOp> = HashMap::new();
        let mut out = DiffOp::zero(self.nvars);
        for (alpha, c) in &self.coeffs {
            let shifted = partial_then(other, alpha, &mut cache);
            for (beta, x) in &shifted.coeffs {
                out.add_term(beta.clone(), c * x);
            }
        }
        Ok(out)
    }

    /// `sum_alpha c_alpha * d^alpha f`.
    pub fn apply(&self, f: &RatFunc) -> Result<RatFunc> {
        check_dims(self.nvars, f.nvars())?;
        let n = self.nvars;
        if self.coeffs.is_empty() || f.is_zero() {
            return Ok(RatFunc::zero(n));
        }
        // With f = N/D, d^alpha f = P_alpha / D^(|alpha|+1); everything is
        // summed over one denominator and reduced once.
        let den = f.denom();
        let den_partials: Vec<MultiPoly> = (0..n).map(|i| den.derivative(i)).collect();
        let mut cache: HashMap<MultiIndex, MultiPoly> = HashMap::new();
        let mut l = MultiPoly::one(n);
        for c in self.coeffs.values() {
            if !c.denom().is_one() {
                let g = poly_gcd(&l, c.denom());
                l = &l * &c.denom().div_exact(&g).expect("gcd divides");
            }
        }
        let top = self.degree() as u32;
        let mut num = MultiPoly::zero(n);
        for (alpha, c) in &self.coeffs {
            let p = partial_numerator(f, &den_partials, alpha, &mut cache);
            if p.is_zero() {
                continue;
            }
            let cofactor = l.div_exact(c.denom()).expect("lcm is a multiple");
            let mut term = &(c.numer() * &cofactor) * &p;
            if !den.is_one() {
                term = &term * &den.pow(top - alpha.total_degree());
            }
            num = &num + &term;
        }
        RatFunc::new(num, &l * &den.pow(top + 1))
    }

    /// Reinterpret as a word: `c * d^alpha` becomes `c` times the word of
    /// `|alpha|` coordinate derivations.
    pub fn to_word(&self) -> OpWord {
        let n = self.nvars;
        let mut w = OpWord::new(n);
        for (alpha, c) in &self.coeffs {
            let word = (0..n)
                .flat_map(|i| std::iter::repeat_n(i, alpha.get(i) as usize))
                .map(|i| Derivation::partial(n, i))
                .collect();
            w.terms.push((c.clone(), word));
        }
        w
    }
}

/// `d^alpha o op`, memoized over intermediate multi-indices.
fn partial_then(op: &DiffOp, alpha: &MultiIndex, cache: &mut HashMap<MultiIndex, DiffOp>) -> DiffOp {
    if alpha.is_one() {
        return op.clone();
    }
    if let Some(hit) = cache.get(alpha) {
        return hit.clone();
    }
    let var = alpha.support().next().unwrap();
    let lower = alpha.with(var, alpha.get(var) - 1);
    let result = partial_then(op, &lower, cache).lmul_partial(var);
    cache.insert(alpha.clone(), result.clone());
    result
}

/// `P` with `d^alpha f = P / D^(|alpha|+1)` for `f = N/D`, memoized over
/// intermediate multi-indices; `den_partials[i]` is `d_i D`.
fn partial_numerator(
    f: &RatFunc,
    den_partials: &[MultiPoly],
    alpha: &MultiIndex,
    cache: &mut HashMap<MultiIndex, MultiPoly>,
) -> MultiPoly {
    if alpha.is_one() {
        return f.numer().clone();
    }
    if let Some(hit) = cache.get(alpha) {
        return hit.clone();
    }
    let var = alpha.support().next().unwrap();
    let lower = alpha.with(var, alpha.get(var) - 1);
    let base = partial_numerator(f, den_partials, &lower, cache);
    // d_i (P / D^k) = (d_i P * D - k P d_i D) / D^(k+1)
    let mut result = &base.derivative(var) * f.denom();
    if !den_partials[var].is_zero() {
        let k = BigRational::from_integer((lower.total_degree() + 1).into());
        result = &result - &(&base * &den_partials[var]).scale(&k);
    }
    cache.insert(alpha.clone(), result.clone());
    result
}

/// `d^alpha f`, memoized over intermediate multi-indices.
pub(crate) fn partial_derivative(
    f: &RatFunc,
    alpha: &MultiIndex,
    cache: &mut HashMap<MultiIndex, RatFunc>,
) -> RatFunc {
    if alpha.is_one() {
        return f.clone();
    }
    if let Some(hit) = cache.get(alpha) {
        return hit.clone();
    }
    let var = alpha.support().next().unwrap();
    let lower = alpha.with(var, alpha.get(var) - 1);
    let base = partial_derivative(f, &lower, cache);
    let result = base.derivative(var);
    cache.insert(alpha.clone(), result.clone());
    result
}

/// Whether `c` prints as a signed product without parentheses.
fn single_term_sign(c: &RatFunc) -> Option<(bool, MultiPoly)> {
    if !c.is_polynomial() || c.numer().num_terms() != 1 {
        return None;
    }
    let (_, lc) = c.numer().leading_term().unwrap();
    let negative = lc.is_negative();
    let mag = if negative {
        c.numer().scale(&-BigRational::one())
    } else {
        c.numer().clone()
    };
    Some((negative, mag))
}

impl fmt::Display for DiffOp {
    /// Descending multi-index order, e.g. `t1*d[2] + d[1]` or
    /// `(t1 + 1)*d[1,0] - 1/2*d[0,0]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (alpha, c)) in self.coeffs.iter().rev().enumerate() {
            let idx = alpha
                .exponents()
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(",");
            match single_term_sign(c) {
                Some((negative, mag)) => {
                    match (i, negative) {
                        (0, true) => f.write_str("-")?,
                        (0, false) => {}
                        (_, true) => f.write_str(" - ")?,
                        (_, false) => f.write_str(" + ")?,
                    }
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                }
                None => {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "({c})*")?;
                }
            }
            write!(f, "d[{idx}]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({self})")
    }
}

/// Apply a derivation to a field element.
pub fn apply_derivation(d: &Derivation, f: &RatFunc) -> Result<RatFunc> {
    d.apply(f)
}

/// Apply a canonical operator to a field element.
pub fn apply_diffop(e: &DiffOp, f: &RatFunc) -> Result<RatFunc> {
    e.apply(f)
}

/// Normalize a composition word to its canonical operator.
pub fn normalize(w: &OpWord) -> Result<DiffOp> {
    w.normalize()
}

/// Canonical form of `e1 o e2`.
pub fn compose(e1: &DiffOp, e2: &DiffOp) -> Result<DiffOp> {
    e1.compose(e2)
}
