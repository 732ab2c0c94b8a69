//! Randomized algebraic invariants for the exact arithmetic layers.

use num_complex::Complex64;
use proptest::prelude::*;

use eismeas::characters::DirichletCharacter;
use eismeas::cyclotomic::CyclotomicNumber;
use eismeas::qexp::QExpansion;
use eismeas::rational::{
    p_valuation, rat_frac, rat_i64, rational_from_string, rational_to_string, PadicValuation,
    Rational,
};

/// Cyclotomic numbers of a fixed small order with small rational coordinates.
fn cyclo(order: u64) -> impl Strategy<Value = CyclotomicNumber> {
    let degree = CyclotomicNumber::zero(order).coords().len();
    prop::collection::vec((-6i64..=6, 1i64..=4), degree).prop_map(move |pairs| {
        let poly = pairs.into_iter().map(|(n, d)| rat_frac(n, d)).collect();
        CyclotomicNumber::from_polynomial(order, poly)
    })
}

fn small_order() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![1u64, 2, 3, 4, 5, 6, 8, 10, 12])
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat_frac(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_ring_axioms(order in small_order()) {
        let strat = (cyclo(order), cyclo(order), cyclo(order));
        proptest!(ProptestConfig::with_cases(8), |((x, y, z) in strat)| {
            prop_assert_eq!(x.add(&y), y.add(&x));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            prop_assert!(x.sub(&x).is_zero());
            prop_assert_eq!(x.mul(&CyclotomicNumber::one(order)), x.clone());
        });
    }

    #[test]
    fn cyclotomic_inverse(order in small_order()) {
        proptest!(ProptestConfig::with_cases(8), |(x in cyclo(order))| {
            if !x.is_zero() {
                let inv = x.inv().unwrap();
                prop_assert_eq!(x.mul(&inv), CyclotomicNumber::one(order));
            }
        });
    }

    #[test]
    fn embed_is_a_homomorphism(order in small_order()) {
        let strat = (cyclo(order), cyclo(order));
        proptest!(ProptestConfig::with_cases(8), |((x, y) in strat)| {
            let gap_add = (x.add(&y).embed() - (x.embed() + y.embed())).norm();
            let gap_mul = (x.mul(&y).embed() - (x.embed() * y.embed())).norm();
            prop_assert!(gap_add <= 1e-9, "additive gap {gap_add:e}");
            prop_assert!(gap_mul <= 1e-9, "multiplicative gap {gap_mul:e}");
        });
    }

    #[test]
    fn lift_preserves_value(order in small_order(), factor in 2u64..=4) {
        proptest!(ProptestConfig::with_cases(8), |(x in cyclo(order))| {
            let lifted = x.lift(order * factor);
            prop_assert_eq!(lifted.order(), order * factor);
            prop_assert_eq!(lifted.reduce_order(), x.reduce_order());
            prop_assert!((lifted.embed() - x.embed()).norm() <= 1e-9);
        });
    }

    #[test]
    fn conjugation_is_an_involution(order in small_order()) {
        proptest!(ProptestConfig::with_cases(8), |(x in cyclo(order))| {
            prop_assert_eq!(x.conj().conj(), x.clone());
            // x * conj(x) embeds to |x|^2, a nonnegative real
            let norm = x.mul(&x.conj()).embed();
            prop_assert!(norm.im.abs() <= 1e-9);
            prop_assert!(norm.re >= -1e-9);
        });
    }

    #[test]
    fn integer_divisibility_scales(order in small_order(), n in 1u64..=6) {
        proptest!(ProptestConfig::with_cases(8), |(x in cyclo(order))| {
            let scaled = x.scale(&rat_i64((n * 24) as i64));
            // 24 clears every coordinate denominator produced by `cyclo`
            prop_assert!(scaled.divisible_by_integer(n));
        });
    }

    #[test]
    fn rational_string_roundtrip(r in rational()) {
        prop_assert_eq!(rational_from_string(&rational_to_string(&r)), Some(r));
    }

    #[test]
    fn valuation_is_additive(a in rational(), b in rational(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let va = p_valuation(&a, p);
        let vb = p_valuation(&b, p);
        let vab = p_valuation(&(&a * &b), p);
        match (va, vb) {
            (PadicValuation::Finite(x), PadicValuation::Finite(y)) => {
                prop_assert_eq!(vab, PadicValuation::Finite(x + y));
            }
            _ => prop_assert_eq!(vab, PadicValuation::Infinite),
        }
    }

    #[test]
    fn partial_forms_partition(coeffs in prop::collection::vec(-9i64..=9, 5..30), level in 2u64..=6) {
        let f = QExpansion::new(coeffs.iter().map(|&c| rat_i64(c)).collect());
        let mut total = QExpansion::zero(f.precision());
        for a in 0..level {
            total = total.add(&f.partial_form(a, level));
        }
        prop_assert_eq!(total, f);
    }

    #[test]
    fn u_operator_is_linear(
        a in prop::collection::vec(-9i64..=9, 10..25),
        b in prop::collection::vec(-9i64..=9, 10..25),
        p in prop::sample::select(vec![2u64, 3, 5]),
    ) {
        let q = a.len().min(b.len());
        let f = QExpansion::new(a[..q].iter().map(|&c| rat_i64(c)).collect());
        let g = QExpansion::new(b[..q].iter().map(|&c| rat_i64(c)).collect());
        let lhs = f.add(&g).u_operator(p).unwrap();
        let rhs = f.u_operator(p).unwrap().add(&g.u_operator(p).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn characters_are_multiplicative(
        index in 0u64..20,
        a in 1i64..200,
        b in 1i64..200,
    ) {
        let chi = DirichletCharacter::new(5, 2, index % 20).unwrap();
        let lhs = chi.evaluate(a * b);
        let rhs = chi.evaluate(a).mul(&chi.evaluate(b));
        prop_assert_eq!(lhs, rhs);
        // conjugate character inverts unit values
        if !chi.evaluate(a).is_zero() {
            let unit = chi.evaluate(a).mul(&chi.conjugate().evaluate(a));
            prop_assert_eq!(unit.to_rational(), Some(rat_i64(1)));
        }
    }

    #[test]
    fn gauss_sum_has_expected_norm(p in prop::sample::select(vec![5u64, 7]), index in 0u64..6) {
        let chi = DirichletCharacter::new(p, 1, index % (p - 1)).unwrap();
        let g = chi.gauss_sum().embed();
        let expect = if chi.is_principal() { 1.0 } else { (chi.conductor() as f64).sqrt() };
        prop_assert!((g.norm() - expect).abs() <= 1e-9, "|G| = {}, expected {expect}", g.norm());
    }

    #[test]
    fn horner_matches_direct_evaluation(coeffs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..12)) {
        let f = QExpansion::new(coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect());
        let q = Complex64::new(0.3, -0.4);
        let direct: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(n, &(re, im))| Complex64::new(re, im) * q.powu(n as u32))
            .sum();
        prop_assert!((f.evaluate(q) - direct).norm() <= 1e-9);
    }
}
