//! Difference operators on the multiplicative semigroup `K* = K \ {0}` and
//! exponent polynomials.
//!
//! For a map `f` on `K*`, `Delta_g f(x) = f(g x) - f(x)`. A map is a
//! generalized polynomial of degree `<= n` when every `(n+1)`-fold iterated
//! difference vanishes. For an operator `E`, the map `E/j : x -> E(x)/x`
//! restricted to monomials `t^i` is a polynomial in the exponent vector `i`,
//! its exponent polynomial, whose degree equals the degree of `E`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::deriv::{Derivation, DiffOp};
use crate::error::{check_dims, Error, Result};
use crate::exactnum::{Monomial, MultiIndex, RatFunc};
use crate::leibniz::{FnMap, MapTable, PointMap};

/// A map on `K*` with values in `K`.
pub trait SemigroupMap {
    fn nvars(&self) -> usize;
    /// Value at a nonzero element.
    fn value(&self, x: &RatFunc) -> Result<RatFunc>;
}

/// `D/j : x -> D(x) / x` for a map `D` on `K`.
pub struct OverIdentity<M>(pub M);

impl<M: PointMap> SemigroupMap for OverIdentity<M> {
    fn nvars(&self) -> usize {
        self.0.nvars()
    }
    fn value(&self, x: &RatFunc) -> Result<RatFunc> {
        if x.is_zero() {
            return Err(Error::Domain("D/j is undefined at 0".into()));
        }
        self.0.eval(x)?.checked_div(x)
    }
}

impl SemigroupMap for MapTable {
    fn nvars(&self) -> usize {
        PointMap::nvars(self)
    }
    fn value(&self, x: &RatFunc) -> Result<RatFunc> {
        self.eval(x)
    }
}

impl<F> SemigroupMap for FnMap<F>
where
    F: Fn(&RatFunc) -> Result<RatFunc>,
{
    fn nvars(&self) -> usize {
        PointMap::nvars(self)
    }
    fn value(&self, x: &RatFunc) -> Result<RatFunc> {
        self.eval(x)
    }
}

impl<T: SemigroupMap + ?Sized> SemigroupMap for &T {
    fn nvars(&self) -> usize {
        (**self).nvars()
    }
    fn value(&self, x: &RatFunc) -> Result<RatFunc> {
        (**self).value(x)
    }
}

fn nonzero(x: &RatFunc, what: &str) -> Result<()> {
    if x.is_zero() {
        Err(Error::Domain(format!("{what} must be nonzero")))
    } else {
        Ok(())
    }
}

/// `Delta_g f(x) = f(g x) - f(x)`.
pub fn delta<F: SemigroupMap + ?Sized>(g: &RatFunc, f: &F, x: &RatFunc) -> Result<RatFunc> {
    nonzero(g, "increment")?;
    nonzero(x, "point")?;
    Ok(&f.value(&(g * x))? - &f.value(x)?)
}

/// `Delta_{g1} ... Delta_{gm} f(x)`; with no increments this is `f(x)`.
pub fn iterated_delta<F: SemigroupMap + ?Sized>(
    f: &F,
    increments: &[RatFunc],
    x: &RatFunc,
) -> Result<RatFunc> {
    nonzero(x, "point")?;
    match increments.split_first() {
        None => f.value(x),
        Some((g, rest)) => {
            nonzero(g, "increment")?;
            let shifted = iterated_delta(f, rest, &(g * x))?;
            let here = iterated_delta(f, rest, x)?;
            Ok(&shifted - &here)
        }
    }
}

/// A nonvanishing iterated difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpWitness {
    pub increments: Vec<RatFunc>,
    pub point: RatFunc,
    pub value: RatFunc,
}

impl fmt::Display for GpWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gs: Vec<String> = self.increments.iter().map(ToString::to_string).collect();
        write!(
            f,
            "increments ({}) at point {} give {}",
            gs.join(", "),
            self.point,
            self.value
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpCheck {
    pub witness: Option<GpWitness>,
    pub checked: usize,
}

impl GpCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Multisets of size `size` drawn from `0..len`, as nondecreasing index
/// vectors in lexicographic order.
fn multisets(len: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i, len, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, len, size, &mut Vec::new(), &mut out);
    out
}

/// `prod_i Delta_{g_i}^{c_i} f(x)` expanded as
/// `sum_{a <= c} (-1)^{|c| - |a|} prod_i C(c_i, a_i) f(g^a x)`,
/// with the values `f(g^a x)` memoized in `values`.
fn expanded_delta<F: SemigroupMap + ?Sized>(
    f: &F,
    gs: &[RatFunc],
    counts: &[u32],
    x: &RatFunc,
    values: &mut BTreeMap<Vec<u32>, RatFunc>,
) -> Result<RatFunc> {
    let total: u32 = counts.iter().sum();
    let mut acc = RatFunc::zero(f.nvars());
    let mut a = vec![0u32; counts.len()];
    loop {
        if !values.contains_key(&a) {
            let mut y = x.clone();
            for (g, &e) in gs.iter().zip(&a) {
                y = &y * &g.pow(e);
            }
            values.insert(a.clone(), f.value(&y)?);
        }
        let mut weight = BigInt::one();
        for (&c, &e) in counts.iter().zip(&a) {
            weight *= binomial(c, e);
        }
        if (total - a.iter().sum::<u32>()) % 2 == 1 {
            weight = -weight;
        }
        acc = &acc + &values[&a].scale(&BigRational::from_integer(weight));
        // next a <= counts in odometer order
        let mut i = 0;
        while i < a.len() && a[i] == counts[i] {
            a[i] = 0;
            i += 1;
        }
        if i == a.len() {
            return Ok(acc);
        }
        a[i] += 1;
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Check that every `(n+1)`-fold iterated difference with increments drawn
/// (with repetition) from `increments` vanishes at every point. Differences
/// commute, so multisets suffice. `n = -1` asks for the zero map.
pub fn gp_degree_check<F: SemigroupMap + ?Sized>(
    f: &F,
    n: i64,
    increments: &[RatFunc],
    points: &[RatFunc],
) -> Result<GpCheck> {
    if n < -1 {
        return Err(Error::Domain(format!("degree bound {n} < -1")));
    }
    for g in increments {
        nonzero(g, "increment")?;
    }
    let order = (n + 1) as usize;
    if order > 0 && increments.is_empty() {
        return Err(Error::Domain("no increments given".into()));
    }
    let mut report = GpCheck {
        witness: None,
        checked: 0,
    };
    let combos = multisets(increments.len(), order);
    for x in points {
        nonzero(x, "point")?;
        let mut values: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
        for combo in &combos {
            let mut counts = vec![0u32; increments.len()];
            for &i in combo {
                counts[i] += 1;
            }
            let v = expanded_delta(f, increments, &counts, x, &mut values)?;
            report.checked += 1;
            if !v.is_zero() {
                report.witness = Some(GpWitness {
                    increments: combo.iter().map(|&i| increments[i].clone()).collect(),
                    point: x.clone(),
                    value: v,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Polynomial in integer exponent variables `i1..ik` with coefficients in `K`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, RatFunc>,
}

impl ExpPoly {
    pub fn zero(nvars: usize) -> Self {
        ExpPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: RatFunc) -> Self {
        let n = c.nvars();
        Self::from_terms(n, [(Monomial::one(n), c)])
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, RatFunc)>,
    {
        let mut p = ExpPoly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
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
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &RatFunc)> {
        self.terms.iter()
    }

    /// Total degree in the exponent variables; `-1` for zero.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .next_back()
            .map(|m| m.total_degree() as i64)
            .unwrap_or(-1)
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> Result<RatFunc>) -> Result<ExpPoly> {
        let mut out = ExpPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Exact value at a nonnegative integer exponent vector.
    pub fn eval(&self, point: &[u32]) -> RatFunc {
        assert_eq!(point.len(), self.nvars, "exponent vector arity");
        let mut acc = RatFunc::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut w = BigInt::one();
            for (&x, &e) in point.iter().zip(m.exponents()) {
                w *= num_traits::pow(BigInt::from(x), e as usize);
            }
            acc = &acc + &c.scale(&BigRational::from_integer(w));
        }
        acc
    }
}

impl fmt::Display for ExpPoly {
    /// `(1/t1^2)*i1^2 + (-1/t1^2)*i1`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        format!("i{}", v + 1)
                    } else {
                        format!("i{}^{e}", v + 1)
                    }
                })
                .collect();
            match (vars.is_empty(), c.is_one()) {
                (true, _) => write!(f, "({c})")?,
                (false, true) => f.write_str(&vars.join("*"))?,
                (false, false) => write!(f, "({c})*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpPoly({self})")
    }
}

/// Monomial-basis coefficients of the falling factorial
/// `x^[j] = x (x-1) ... (x-j+1)`, lowest degree first.
pub fn falling_factorial_coeffs(j: u32) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for r in 0..j {
        // multiply by (x - r)
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (d, a) in c.iter().enumerate() {
            next[d + 1] += a;
            next[d] -= a * BigInt::from(r);
        }
        c = next;
    }
    c
}

/// `prod_m i_m^[j_m]` expanded in the monomial basis of the `i` variables.
fn falling_factorial_product(j: &MultiIndex) -> BTreeMap<Monomial, BigInt> {
    let n = j.nvars();
    let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
    acc.insert(Monomial::one(n), BigInt::one());
    for (var, &e) in j.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let ff = falling_factorial_coeffs(e);
        let mut next = BTreeMap::new();
        for (m, a) in &acc {
            for (d, b) in ff.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let key = m.with(var, m.get(var) + d as u32);
                *next.entry(key).or_insert_with(BigInt::zero) += a * b;
            }
        }
        acc = next;
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// `p(i) = E(t^i) / t^i = sum_alpha c_alpha * i^[alpha] * t^(-alpha)`,
/// expanded into the monomial basis of the exponent variables.
pub fn exponent_polynomial(e: &DiffOp) -> ExpPoly {
    let n = e.nvars();
    let mut p = ExpPoly::zero(n);
    for (alpha, c) in e.terms() {
        let scaled = c * &RatFunc::inverse_monomial(alpha);
        for (m, k) in falling_factorial_product(alpha) {
            p.add_term(m, scaled.scale(&BigRational::from_integer(k)));
        }
    }
    p
}

/// Total degree of an exponent polynomial; `-1` for zero.
pub fn expoly_degree(p: &ExpPoly) -> i64 {
    p.degree()
}

/// The exponent polynomial of the additive map `a(t^i) = sum_j i_j a(t_j)`.
pub fn additive_exponent_map(a: &[RatFunc]) -> Result<ExpPoly> {
    if a.iter().all(RatFunc::is_zero) {
        return Err(Error::ZeroAdditive);
    }
    let n = a.len();
    for c in a {
        check_dims(n, c.nvars())?;
    }
    Ok(ExpPoly::from_terms(
        n,
        a.iter()
            .enumerate()
            .map(|(j, c)| (Monomial::var(n, j), c.clone())),
    ))
}

/// The product `(p * a)(i) = p(i) * sum_j i_j a_j` and its degree.
pub fn bump_product(p: &ExpPoly, a: &[RatFunc]) -> Result<ExpPoly> {
    check_dims(p.nvars(), a.len())?;
    let lin = additive_exponent_map(a)?;
    Ok(p.mul(&lin))
}

/// Degree of `p * a` for a nonzero additive `a`; one more than the degree
/// of `p` when `p != 0`.
pub fn degree_bump(p: &ExpPoly, a: &[RatFunc]) -> Result<i64> {
    Ok(bump_product(p, a)?.degree())
}

/// `a_j = d(t_j) / t_j`, the additive exponent map of `d/j`.
pub fn logarithmic_images(d: &Derivation) -> Vec<RatFunc> {
    let n = d.nvars();
    d.images()
        .iter()
        .enumerate()
        .map(|(j, g)| {
            g.checked_div(&RatFunc::var(n, j))
                .expect("t_j is nonzero")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    fn t() -> RatFunc {
        RatFunc::var(1, 0)
    }
    fn int(n: usize, c: i64) -> RatFunc {
        RatFunc::from_int(n, c)
    }
    fn d(alpha: &[u32]) -> DiffOp {
        DiffOp::partial(MultiIndex::new(alpha.to_vec()))
    }
    fn i_mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn falling_factorials() {
        let to_i = |v: Vec<BigInt>| v.into_iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(falling_factorial_coeffs(0)), vec![1]);
        assert_eq!(to_i(falling_factorial_coeffs(2)), vec![0, -1, 1]);
        assert_eq!(to_i(falling_factorial_coeffs(3)), vec![0, 2, -3, 1]);
    }

    #[test]
    fn delta_of_logarithmic_derivative() {
        // f = d/j with d = d/dt: Delta_g f(x) = g'/g for every x
        let f = OverIdentity(d(&[1]));
        let g = &t().pow(2) + &int(1, 3);
        let expected = g.derivative(0).checked_div(&g).unwrap();
        for x in [t(), &t() - &int(1, 2), t().pow(3)] {
            assert_eq!(delta(&g, &f, &x).unwrap(), expected);
        }
    }

    #[test]
    fn delta_trivial_maps() {
        let konst = FnMap::new(1, |_: &RatFunc| Ok(RatFunc::from_int(1, 5)));
        assert!(delta(&t(), &konst, &int(1, 2)).unwrap().is_zero());
        let ident = FnMap::new(1, |x: &RatFunc| Ok(x.clone()));
        let g = &t() + &int(1, 1);
        let x = t().pow(2);
        assert_eq!(delta(&g, &ident, &x).unwrap(), &(&g - &int(1, 1)) * &x);
        assert!(matches!(delta(&RatFunc::zero(1), &ident, &x), Err(Error::Domain(_))));
        assert!(matches!(delta(&g, &ident, &RatFunc::zero(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn degree_check_examples() {
        let f = OverIdentity(d(&[1]));
        let incs = vec![&t() + &int(1, 1), t().pow(2), &t() - &int(1, 3)];
        let pts = vec![t(), &t() + &int(1, 2)];
        assert!(gp_degree_check(&f, 1, &incs, &pts).unwrap().passed());

        let r = gp_degree_check(&f, 0, &[&t() + &int(1, 1)], &[t()]).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.value, (&t() + &int(1, 1)).recip().unwrap());

        let ident = FnMap::new(1, |x: &RatFunc| Ok(x.clone()));
        let r = gp_degree_check(&ident, 5, &[t()], &[int(1, 1)]).unwrap();
        assert_eq!(r.witness.unwrap().value, (&t() - &int(1, 1)).pow(6));
    }

    #[test]
    fn exponent_polynomial_examples() {
        // d^2: i^2 - i over t^2
        let p = exponent_polynomial(&d(&[2]));
        let inv2 = t().pow(2).recip().unwrap();
        assert_eq!(
            p,
            ExpPoly::from_terms(1, [(i_mono(&[2]), inv2.clone()), (i_mono(&[1]), -&inv2)])
        );
        assert_eq!(p.to_string(), "(1/t1^2)*i1^2 + (-1/t1^2)*i1");

        // Euler operator t d
        let euler = d(&[1]).scale(&t());
        assert_eq!(exponent_polynomial(&euler), ExpPoly::from_terms(1, [(i_mono(&[1]), int(1, 1))]));

        let c = RatFunc::from_int(1, 7);
        assert_eq!(exponent_polynomial(&DiffOp::scalar(c.clone())), ExpPoly::constant(c));
    }

    #[test]
    fn expoly_degree_examples() {
        // d + t d^2 has p(i) = i^2 / t
        let e = d(&[1]).add(&d(&[2]).scale(&t())).unwrap();
        let p = exponent_polynomial(&e);
        assert_eq!(p, ExpPoly::from_terms(1, [(i_mono(&[2]), t().recip().unwrap())]));
        assert_eq!(expoly_degree(&p), 2);
        assert_eq!(expoly_degree(&ExpPoly::zero(1)), -1);

        // d1 o (t1 d1 + d2) = t1 d1^2 + d1 + d1 d2
        let n = 2;
        let t1 = RatFunc::var(n, 0);
        let inner = d(&[1, 0]).scale(&t1).add(&d(&[0, 1])).unwrap();
        let e = d(&[1, 0]).compose(&inner).unwrap();
        let p = exponent_polynomial(&e);
        let t1inv = t1.recip().unwrap();
        let t12inv = (&t1 * &RatFunc::var(n, 1)).recip().unwrap();
        assert_eq!(
            p,
            ExpPoly::from_terms(n, [(i_mono(&[2, 0]), t1inv), (i_mono(&[1, 1]), t12inv)])
        );
        assert_eq!(expoly_degree(&p), 2);
    }

    #[test]
    fn exponent_polynomial_matches_operator_on_monomials() {
        let mut s = Sampler::new(5, 2);
        for deg in 0..4 {
            let e = s.diffop(deg, false);
            let p = exponent_polynomial(&e);
            assert_eq!(p.degree(), deg);
            for i in 0..4u32 {
                for j in 0..4u32 {
                    let m = Monomial::new(vec![i, j]);
                    let tm = RatFunc::monomial(&m);
                    let direct = e.apply(&tm).unwrap().checked_div(&tm).unwrap();
                    assert_eq!(p.eval(&[i, j]), direct);
                }
            }
        }
    }

    #[test]
    fn degree_bump_examples() {
        let p = ExpPoly::from_terms(1, [(i_mono(&[1]), int(1, 1))]);
        assert_eq!(degree_bump(&p, &[int(1, 1)]).unwrap(), 2);
        assert_eq!(degree_bump(&ExpPoly::constant(int(1, 1)), &[int(1, 1)]).unwrap(), 1);
        let p = exponent_polynomial(&d(&[2]));
        let prod = bump_product(&p, &[t().recip().unwrap()]).unwrap();
        let inv3 = t().pow(3).recip().unwrap();
        assert_eq!(prod, ExpPoly::from_terms(1, [(i_mono(&[3]), inv3.clone()), (i_mono(&[2]), -&inv3)]));
        assert_eq!(prod.degree(), 3);
        assert_eq!(degree_bump(&p, &[RatFunc::zero(1)]), Err(Error::ZeroAdditive));
    }

    #[test]
    fn composition_with_derivation_splits() {
        // For D = d o E: p_D = d(p_E) + p_E * (d(t_j)/t_j)_j coefficientwise.
        let mut s = Sampler::new(17, 2);
        for deg in 1..4 {
            let der = s.derivation();
            let e = s.diffop(deg, true);
            let composed = der.to_diffop().compose(&e).unwrap();
            let lhs = exponent_polynomial(&composed);
            let pe = exponent_polynomial(&e);
            let image_term = pe.map_coeffs(|c| der.apply(c)).unwrap();
            let product_term = bump_product(&pe, &logarithmic_images(&der)).unwrap();
            assert_eq!(lhs, image_term.add(&product_term));
        }
    }
}
