use derivcalc_core::exactnum::poly_gcd;
use derivcalc_core::genpoly::{exponent_polynomial, iterated_delta, OverIdentity};
use derivcalc_core::leibniz::{defect, order_exact};
use derivcalc_core::reconstruct::{
    check_recurrence, fit_operator, reconstruct_operator, Fit, GridValues, RecurrenceCheck,
    RecurrenceSpec,
};
use derivcalc_core::sample::Sampler;
use derivcalc_core::syntax::{parse_derivation, parse_expr, parse_op};
use derivcalc_core::{
    BigRational, DiffOp, Error, MapTable, Monomial, MultiIndex, MultiPoly, OpWord, RatFunc,
};
use proptest::prelude::*;

const K: usize = 2;

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((0u32..3, 0u32..3, -4i64..=4), 0..5).prop_map(|terms| {
        MultiPoly::from_terms(
            K,
            terms
                .into_iter()
                .map(|(a, b, c)| (Monomial::new(vec![a, b]), BigRational::from_integer(c.into()))),
        )
    })
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RatFunc::new(n, d).unwrap())
}

fn nonzero_ratfunc() -> impl Strategy<Value = RatFunc> {
    ratfunc().prop_filter("nonzero", |f| !f.is_zero())
}

fn sampler(seed: u64) -> Sampler {
    Sampler::new(seed, K)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.recip().unwrap()).is_one());
        }
    }

    #[test]
    fn canonical_form_ignores_common_factors(n in poly(), d in nonzero_poly(), h in nonzero_poly()) {
        let plain = RatFunc::new(n.clone(), d.clone()).unwrap();
        let padded = RatFunc::new(&n * &h, &d * &h).unwrap();
        prop_assert_eq!(&padded, &plain);
        prop_assert!(RatFunc::same_value(plain.numer(), plain.denom(), &n, &d));
        let again = RatFunc::new(plain.numer().clone(), plain.denom().clone()).unwrap();
        prop_assert_eq!(again, plain);
    }

    #[test]
    fn gcd_divides_and_is_greatest(a in nonzero_poly(), b in nonzero_poly(), g in nonzero_poly()) {
        let (ga, gb) = (&g * &a, &g * &b);
        let d = poly_gcd(&ga, &gb);
        prop_assert!(ga.div_exact(&d).is_some());
        prop_assert!(gb.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&g).is_some());
    }

    #[test]
    fn expressions_print_and_parse_back(f in ratfunc()) {
        prop_assert_eq!(parse_expr(&f.to_string(), K).unwrap(), f);
    }

    #[test]
    fn derivations_are_additive_and_leibniz(seed in any::<u64>(), f in ratfunc(), g in ratfunc()) {
        let d = sampler(seed).derivation();
        prop_assert_eq!(d.apply(&(&f + &g)).unwrap(), &d.apply(&f).unwrap() + &d.apply(&g).unwrap());
        let leibniz = &(&d.apply(&f).unwrap() * &g) + &(&f * &d.apply(&g).unwrap());
        prop_assert_eq!(d.apply(&(&f * &g)).unwrap(), leibniz);
        prop_assert_eq!(parse_derivation(&d.to_string(), K).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn normalized_words_act_like_the_word(seed in any::<u64>(), len in 1usize..=3, f in ratfunc()) {
        let mut s = sampler(seed);
        let word: Vec<_> = (0..len).map(|_| s.derivation()).collect();
        let c = s.coefficient();
        let w = OpWord::single(c, word).unwrap();
        let e = w.normalize().unwrap();
        prop_assert_eq!(e.apply(&f).unwrap(), w.apply(&f).unwrap());
        prop_assert_eq!(e.to_word().normalize().unwrap(), e);
    }

    #[test]
    fn composition_applies_and_adds_degrees(
        seed in any::<u64>(), n1 in 0i64..=2, n2 in 0i64..=2, f in ratfunc()
    ) {
        let mut s = sampler(seed);
        let (e1, e2) = (s.diffop(n1, false), s.diffop(n2, false));
        let c = e1.compose(&e2).unwrap();
        prop_assert_eq!(c.degree(), n1 + n2);
        prop_assert_eq!(c.apply(&f).unwrap(), e1.apply(&e2.apply(&f).unwrap()).unwrap());
        prop_assert_eq!(parse_op(&c.to_string(), K).unwrap(), c);
    }

    #[test]
    fn o0_means_vanishing_at_one(seed in any::<u64>(), n in 0i64..=3, drop_identity in any::<bool>()) {
        let mut e = sampler(seed).diffop(n, false);
        if drop_identity {
            e = e.sub(&DiffOp::scalar(e.identity_coeff().cloned().unwrap_or_else(|| RatFunc::zero(K)))).unwrap();
        }
        prop_assert_eq!(e.is_in_o0(), e.apply(&RatFunc::one(K)).unwrap().is_zero());
        if e.is_in_o0() && !e.is_zero() {
            prop_assert_eq!(order_exact(&e).unwrap().order as i64, e.degree());
        }
    }

    #[test]
    fn defect_is_symmetric_and_biadditive(
        seed in any::<u64>(), n in 1i64..=2, x in ratfunc(), x2 in ratfunc(), y in ratfunc()
    ) {
        let e = sampler(seed).diffop(n, true);
        let dxy = defect(&e, &x, &y).unwrap();
        prop_assert_eq!(&dxy, &defect(&e, &y, &x).unwrap());
        let sum = defect(&e, &(&x + &x2), &y).unwrap();
        prop_assert_eq!(sum, &dxy + &defect(&e, &x2, &y).unwrap());
    }

    #[test]
    fn differences_commute(seed in any::<u64>(), g in nonzero_ratfunc(), h in nonzero_ratfunc(), x in nonzero_ratfunc()) {
        let e = sampler(seed).diffop(2, true);
        let f = OverIdentity(&e);
        let gh = iterated_delta(&f, &[g.clone(), h.clone()], &x).unwrap();
        let hg = iterated_delta(&f, &[h, g], &x).unwrap();
        prop_assert_eq!(gh, hg);
    }

    #[test]
    fn exponent_polynomial_degree_is_operator_degree(seed in any::<u64>(), n in 0i64..=3) {
        let e = sampler(seed).diffop(n, false);
        prop_assert_eq!(exponent_polynomial(&e).degree(), n);
    }

    #[test]
    fn grid_reconstruction_round_trips(seed in any::<u64>(), n in 0u32..=3) {
        let e = sampler(seed).diffop(n as i64, false);
        let grid = GridValues::tabulate(&e, n).unwrap();
        prop_assert_eq!(reconstruct_operator(&grid).unwrap(), e);
    }

    #[test]
    fn grid_detects_degree_overflow(n in 1u32..=3, split in 1u32..=3, c in 1i64..=5) {
        // total degree n + 1 with each exponent <= n
        let a = split.min(n);
        let e = DiffOp::partial(MultiIndex::new(vec![a, n + 1 - a])).scale(&RatFunc::from_int(K, c));
        let grid = GridValues::tabulate(&e, n).unwrap();
        let overflow = matches!(reconstruct_operator(&grid), Err(Error::DegreeOverflow { .. }));
        prop_assert!(overflow);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn fitting_tabulated_operators_is_consistent(seed in any::<u64>(), n in 1u32..=2, rows in 3usize..=6) {
        let mut s = sampler(seed);
        let e = s.diffop(n as i64, true);
        let xs: Vec<RatFunc> = (0..rows).map(|_| s.proper_fraction()).collect();
        let table = MapTable::tabulate(&e, &xs).unwrap();
        match fit_operator(&table, n, true).unwrap() {
            Fit::Solved { operator, .. } => {
                prop_assert!(operator.is_in_o0());
                for (x, v) in table.entries() {
                    prop_assert_eq!(&operator.apply(x).unwrap(), v);
                }
            }
            Fit::Infeasible { element, .. } => prop_assert!(false, "infeasible at {}", element),
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn recurrences_fail_exactly_where_perturbed(
        r in nonzero_ratfunc(), len in 2usize..8, at in 0usize..8, bump in nonzero_ratfunc()
    ) {
        let seq: Vec<RatFunc> = (0..len as u32).map(|i| r.pow(i)).collect();
        let coeffs = vec![-&r, RatFunc::one(K)];
        let ok = RecurrenceSpec::new(coeffs.clone(), seq.clone()).unwrap();
        prop_assert_eq!(check_recurrence(&ok), RecurrenceCheck::Pass);
        let at = at % len;
        let mut bad = seq;
        bad[at] = &bad[at] + &bump;
        let spec = RecurrenceSpec::new(coeffs, bad).unwrap();
        prop_assert_eq!(check_recurrence(&spec), RecurrenceCheck::FailAt(at.max(1)));
    }
}
