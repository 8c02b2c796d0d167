//! Executable counterexamples and demonstrations.
//!
//! * In characteristic 2, `D(sum a_i x^i) = sum binom(i,2) a_i x^(i-2)` on
//!   `F2[x]` has order 2 without being a derivation, while every composite
//!   `d1 o d2` of derivations collapses to a derivation.
//! * On the product ring `Q[x] x Q[x]`, two nonzero derivations can compose
//!   to zero.
//! * Over `Q(t1..tk)`, a composite of `n` nonzero derivations has order
//!   exactly `n`.

use crate::deriv::{Derivation, DiffOp, OpWord};
use crate::error::{check_dims, Error, Result};
use crate::exactnum::{GF2Poly, MultiPoly, RatFunc};
use crate::genpoly::{exponent_polynomial, ExpPoly};
use crate::leibniz::{defect_tuples, find_defect_witness, first_nonvanishing, Witness};

/// `binom(i, 2) mod 2`.
fn binom2_odd(i: usize) -> bool {
    i % 4 == 2 || i % 4 == 3
}

/// The order-2 map `sum a_i x^i -> sum binom(i,2) a_i x^(i-2)` on `F2[x]`.
pub fn char2_d(p: &GF2Poly) -> GF2Poly {
    GF2Poly::from_coeffs(
        (2..p.coeffs().len())
            .map(|i| binom2_odd(i) && p.coeff(i))
            .collect(),
    )
}

/// The derivation of `F2[x]` with `d(x) = v`: `d(p) = p' v`.
pub fn gf2_derivation(v: &GF2Poly) -> impl Fn(&GF2Poly) -> GF2Poly + '_ {
    move |p| &p.derivative() * v
}

/// `B(x, y)`; signs do not matter in characteristic 2.
fn gf2_defect(d: &dyn Fn(&GF2Poly) -> GF2Poly, x: &GF2Poly, y: &GF2Poly) -> GF2Poly {
    let s = &d(&(x * y)) + &(&d(x) * y);
    &s + &(&d(y) * x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Char2Report {
    pub max_degree: usize,
    pub d_of_x: GF2Poly,
    pub d_of_x2: GF2Poly,
    /// Additivity held on every pair.
    pub additive: bool,
    /// Every 2-fold nested defect vanished: order at most two.
    pub order_at_most_two: bool,
    /// First pair `(x, y)` breaking the product rule, if any. `None` means
    /// the map is a derivation candidate on the tested set.
    pub derivation_witness: Option<(GF2Poly, GF2Poly)>,
    pub inputs: usize,
}

/// Exhaustive check of the characteristic-2 map over all inputs of degree
/// `<= max_degree`.
pub fn char2_order_check(max_degree: usize) -> Char2Report {
    char2_order_check_with(&char2_d, max_degree)
}

/// Exhaustive order report for an arbitrary map on `F2[x]`.
pub fn char2_order_check_with(d: &dyn Fn(&GF2Poly) -> GF2Poly, max_degree: usize) -> Char2Report {
    let inputs: Vec<GF2Poly> = GF2Poly::all_up_to_degree(max_degree).collect();
    let additive = inputs
        .iter()
        .all(|x| inputs.iter().all(|y| d(&(x + y)) == &d(x) + &d(y)));

    let mut derivation_witness = None;
    'outer: for x in &inputs {
        for y in &inputs {
            if !gf2_defect(d, x, y).is_zero() {
                derivation_witness = Some((x.clone(), y.clone()));
                break 'outer;
            }
        }
    }

    // ((D_{y1})_{y2})(x) with D_y(x) = B(x, y)
    let level1 = |x: &GF2Poly, y1: &GF2Poly| gf2_defect(d, x, y1);
    let order_at_most_two = inputs.iter().all(|x| {
        inputs.iter().all(|y1| {
            inputs.iter().all(|y2| {
                let v = &level1(&(x * y2), y1) + &(y2 * &level1(x, y1));
                (&v + &(x * &level1(y2, y1))).is_zero()
            })
        })
    });

    Char2Report {
        max_degree,
        d_of_x: d(&GF2Poly::monomial(1)),
        d_of_x2: d(&GF2Poly::monomial(2)),
        additive,
        order_at_most_two,
        derivation_witness,
        inputs: inputs.len(),
    }
}

/// `k x^(k-1) a` over `F2` (zero for `k = 0`).
pub fn char2_power_rule(k: usize, a: &GF2Poly) -> GF2Poly {
    if k.is_multiple_of(2) {
        GF2Poly::zero()
    } else {
        a.shift(k - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Char2ComposeReport {
    /// `a = d1(d2(x))`.
    pub a: GF2Poly,
    /// `(d1 o d2)(x^k) = k x^(k-1) a` for every tested `k`.
    pub power_rule_holds: bool,
    pub first_failure: Option<usize>,
    /// `d1 o d2 = a * d/dx` on every polynomial of degree `<= max_k`.
    pub collapses_to_derivation: bool,
}

/// Check the power rule for `d1 o d2` for `k = 0..=max_k`, where `d1`,
/// `d2` are the derivations with `d1(x) = d1x`, `d2(x) = d2x`.
pub fn char2_compose_check(d1x: &GF2Poly, d2x: &GF2Poly, max_k: usize) -> Char2ComposeReport {
    let d1 = gf2_derivation(d1x);
    let d2 = gf2_derivation(d2x);
    let composite = |p: &GF2Poly| d1(&d2(p));
    let a = composite(&GF2Poly::monomial(1));
    let first_failure =
        (0..=max_k).find(|&k| composite(&GF2Poly::monomial(k)) != char2_power_rule(k, &a));
    let collapses_to_derivation = GF2Poly::all_up_to_degree(max_k)
        .all(|p| composite(&p) == &p.derivative() * &a);
    Char2ComposeReport {
        a,
        power_rule_holds: first_failure.is_none(),
        first_failure,
        collapses_to_derivation,
    }
}

/// Element of `Q[x] x Q[x]` with componentwise operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPoly {
    pub first: MultiPoly,
    pub second: MultiPoly,
}

impl PairPoly {
    pub fn new(first: MultiPoly, second: MultiPoly) -> Self {
        assert!(first.nvars() == 1 && second.nvars() == 1, "univariate components");
        PairPoly { first, second }
    }

    pub fn one() -> Self {
        PairPoly::new(MultiPoly::one(1), MultiPoly::one(1))
    }

    /// `(x^i, x^j)`.
    pub fn monomials(i: u32, j: u32) -> Self {
        let x = MultiPoly::var(1, 0);
        PairPoly::new(x.pow(i), x.pow(j))
    }

    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.second.is_zero()
    }

    pub fn add(&self, o: &PairPoly) -> PairPoly {
        PairPoly::new(&self.first + &o.first, &self.second + &o.second)
    }

    pub fn mul(&self, o: &PairPoly) -> PairPoly {
        PairPoly::new(&self.first * &o.first, &self.second * &o.second)
    }
}

impl std::fmt::Display for PairPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // components are univariate; print in x
        let show = |p: &MultiPoly| p.to_string().replace("t1", "x");
        write!(f, "({}, {})", show(&self.first), show(&self.second))
    }
}

/// `d1(p, q) = (p', 0)`.
pub fn pair_d1(p: &PairPoly) -> PairPoly {
    PairPoly::new(p.first.derivative(0), MultiPoly::zero(1))
}

/// `d2(p, q) = (0, q')`.
pub fn pair_d2(p: &PairPoly) -> PairPoly {
    PairPoly::new(MultiPoly::zero(1), p.second.derivative(0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductRingReport {
    pub max_exponent: u32,
    /// `d1` and `d2` are additive and satisfy the product rule on all
    /// sample pairs.
    pub d1_is_derivation: bool,
    pub d2_is_derivation: bool,
    /// `d1(x, 0)` and `d2(0, x)`: nonzero values showing neither map is zero.
    pub d1_witness: PairPoly,
    pub d2_witness: PairPoly,
    /// `d1 o d2` vanished on every `(x^i, x^j)`.
    pub composite_is_zero: bool,
    pub samples: usize,
}

/// Demonstrate on `(x^i, x^j)`, `i, j <= max_exponent`, that `d1` and `d2`
/// are nonzero derivations with `d1 o d2 = 0`.
pub fn product_ring_demo(max_exponent: u32) -> ProductRingReport {
    let samples: Vec<PairPoly> = (0..=max_exponent)
        .flat_map(|i| (0..=max_exponent).map(move |j| PairPoly::monomials(i, j)))
        .collect();
    let is_derivation = |d: fn(&PairPoly) -> PairPoly| {
        samples.iter().all(|x| {
            samples.iter().all(|y| {
                let leibniz = d(&x.mul(y)) == d(x).mul(y).add(&d(y).mul(x));
                let additive = d(&x.add(y)) == d(x).add(&d(y));
                leibniz && additive
            })
        })
    };
    let x = MultiPoly::var(1, 0);
    let zero = MultiPoly::zero(1);
    ProductRingReport {
        max_exponent,
        d1_is_derivation: is_derivation(pair_d1),
        d2_is_derivation: is_derivation(pair_d2),
        d1_witness: pair_d1(&PairPoly::new(x.clone(), zero.clone())),
        d2_witness: pair_d2(&PairPoly::new(zero, x)),
        composite_is_zero: samples.iter().all(|p| pair_d1(&pair_d2(p)).is_zero()),
        samples: samples.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Report {
    pub n: usize,
    pub operator: DiffOp,
    pub degree: i64,
    pub exponent_polynomial: ExpPoly,
    pub expoly_degree: i64,
    /// Nonvanishing `(n-1)`-fold nested defect.
    pub lower_witness: Option<Witness>,
    /// Nonvanishing `n`-fold nested defect among the sampled tuples (none
    /// expected).
    pub upper_counterexample: Option<Witness>,
    pub upper_tuples: usize,
}

impl Theorem2Report {
    /// Degree, exponent-polynomial degree and order all equal `n`.
    pub fn exact_order_confirmed(&self) -> bool {
        let n = self.n as i64;
        self.degree == n
            && self.expoly_degree == n
            && self.lower_witness.is_some()
            && self.upper_counterexample.is_none()
    }
}

/// Compose `d1 o ... o dn`, normalize, and confirm its order is exactly `n`:
/// degree, exponent-polynomial degree, an `(n-1)`-fold defect witness (up
/// to `witness_tries` tuples), and vanishing `n`-fold defects on
/// `upper_tuples` tuples.
pub fn theorem2_demo(
    derivations: &[Derivation],
    seed: u64,
    witness_tries: usize,
    upper_tuples: usize,
) -> Result<Theorem2Report> {
    let Some(first) = derivations.first() else {
        return Err(Error::Domain("no derivations given".into()));
    };
    let nvars = first.nvars();
    for (i, d) in derivations.iter().enumerate() {
        check_dims(nvars, d.nvars())?;
        if d.is_zero() {
            return Err(Error::ZeroDerivation { index: i });
        }
    }
    let n = derivations.len();
    let word = OpWord::single(RatFunc::one(nvars), derivations.to_vec())?;
    let operator = word.normalize()?;
    let exponent_polynomial = exponent_polynomial(&operator);
    let lower_witness = find_defect_witness(&operator, n - 1, witness_tries, seed)?;
    let tuples = defect_tuples(nvars, n, upper_tuples, seed.wrapping_add(1));
    let upper_counterexample = first_nonvanishing(&operator, &tuples)?;
    Ok(Theorem2Report {
        n,
        degree: operator.degree(),
        expoly_degree: exponent_polynomial.degree(),
        operator,
        exponent_polynomial,
        lower_witness,
        upper_counterexample,
        upper_tuples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Monomial;

    fn x(k: usize) -> GF2Poly {
        GF2Poly::monomial(k)
    }

    #[test]
    fn char2_values() {
        assert!(char2_d(&x(1)).is_zero());
        assert_eq!(char2_d(&x(2)), GF2Poly::one());
        assert_eq!(char2_d(&x(3)), x(1));
        assert!(char2_d(&x(4)).is_zero());
    }

    #[test]
    fn char2_report() {
        let r = char2_order_check(4);
        assert!(r.additive && r.order_at_most_two);
        assert_eq!(r.derivation_witness, Some((x(1), x(1))));
        assert_eq!((r.d_of_x.clone(), r.d_of_x2.clone()), (GF2Poly::zero(), GF2Poly::one()));
        assert_eq!(r.inputs, 32);
    }

    #[test]
    fn char2_low_degree_is_vacuous() {
        let r = char2_order_check(1);
        assert!(r.additive && r.order_at_most_two);
    }

    #[test]
    fn formal_derivative_is_derivation_candidate() {
        // D(x) = 1, D(x^2) = 0
        let r = char2_order_check_with(&|p: &GF2Poly| p.derivative(), 4);
        assert_eq!(r.d_of_x2, GF2Poly::zero());
        assert!(r.derivation_witness.is_none());
    }

    #[test]
    fn power_rule_values() {
        let one = GF2Poly::one();
        assert!(char2_power_rule(0, &one).is_zero());
        assert!(char2_power_rule(2, &one).is_zero());
        assert_eq!(char2_power_rule(3, &one), x(2));
    }

    #[test]
    fn composite_collapses() {
        for a in GF2Poly::all_up_to_degree(2) {
            for b in GF2Poly::all_up_to_degree(2) {
                let r = char2_compose_check(&a, &b, 8);
                assert!(r.power_rule_holds, "d1(x) = {a}, d2(x) = {b}");
                assert!(r.collapses_to_derivation);
            }
        }
    }

    #[test]
    fn product_ring() {
        let r = product_ring_demo(6);
        assert!(r.d1_is_derivation && r.d2_is_derivation && r.composite_is_zero);
        assert!(!r.d1_witness.is_zero() && !r.d2_witness.is_zero());
        let p = PairPoly::monomials(2, 3);
        let x = MultiPoly::var(1, 0);
        assert_eq!(
            pair_d2(&p),
            PairPoly::new(MultiPoly::zero(1), x.pow(2).scale(&crate::BigRational::from_integer(3.into())))
        );
        assert!(pair_d1(&pair_d2(&p)).is_zero());
        assert!(pair_d1(&PairPoly::one()).is_zero());
        assert_eq!(pair_d1(&PairPoly::new(x, MultiPoly::zero(1))), PairPoly::new(MultiPoly::one(1), MultiPoly::zero(1)));
    }

    #[test]
    fn theorem2_examples() {
        let d11 = Derivation::partial(1, 0);
        let r = theorem2_demo(&[d11.clone(), d11.clone()], 1, 50, 5).unwrap();
        assert!(r.exact_order_confirmed());
        let t = RatFunc::var(1, 0);
        let inv2 = t.pow(2).recip().unwrap();
        assert_eq!(
            r.exponent_polynomial,
            ExpPoly::from_terms(1, [(Monomial::new(vec![2]), inv2.clone()), (Monomial::new(vec![1]), -&inv2)])
        );

        let n = 2;
        let d1 = Derivation::partial(n, 0);
        let mixed = Derivation::new(vec![RatFunc::var(n, 0), RatFunc::one(n)]).unwrap();
        let r = theorem2_demo(&[d1.clone(), mixed], 2, 50, 5).unwrap();
        assert!(r.exact_order_confirmed());
        let t1 = RatFunc::var(n, 0);
        let t2 = RatFunc::var(n, 1);
        assert_eq!(
            r.exponent_polynomial,
            ExpPoly::from_terms(
                n,
                [
                    (Monomial::new(vec![2, 0]), t1.recip().unwrap()),
                    (Monomial::new(vec![1, 1]), (&t1 * &t2).recip().unwrap())
                ]
            )
        );

        let r = theorem2_demo(&[d1], 3, 50, 5).unwrap();
        assert_eq!(r.degree, 1);
        assert!(r.exact_order_confirmed());
    }

    #[test]
    fn theorem2_rejects_zero_derivation() {
        let d = Derivation::partial(1, 0);
        assert_eq!(
            theorem2_demo(&[d, Derivation::zero(1)], 0, 50, 5),
            Err(Error::ZeroDerivation { index: 1 })
        );
    }
}
