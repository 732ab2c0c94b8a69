//! Bernoulli numbers and polynomials, special values zeta(1-k),
//! partial zeta values, character L-values L(1-k, chi), a numeric L(k, chi)
//! for oracles, and the regular-prime test.
//!
//! Conventions: B_1 = -1/2; zeta(1-k) = -B_k/k for k >= 2; the partial zeta
//! continuation is zeta(1-k; a, N) = -N^{k-1} B_k(a/N) / k; for a character
//! of conductor C, B_{k,chi} = C^{k-1} sum_{a=1..C} chi(a) B_k(a/C) and
//! L(1-k, chi) = -B_{k,chi}/k (principal characters use the conductor-1
//! primitive convention, so they yield zeta(1-k) with no Euler factor).

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use once_cell::sync::Lazy;

use crate::characters::DirichletCharacter;
use crate::cyclotomic::CyclotomicNumber;
use crate::rational::{binomial, rat_i64, Rational};
use crate::{Error, Result};

static BERNOULLI_CACHE: Lazy<Mutex<Vec<Rational>>> =
    Lazy::new(|| Mutex::new(vec![rat_i64(1)]));

/// B_k with B_1 = -1/2, via sum_{j=0}^{k} C(k+1, j) B_j = 0.
pub fn bernoulli_number(k: u64) -> Rational {
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    while (cache.len() as u64) <= k {
        let n = cache.len() as u64;
        let mut acc = Rational::zero();
        for (j, bj) in cache.iter().enumerate() {
            acc += Rational::from_integer(binomial(n + 1, j as u64)) * bj;
        }
        let bn = -acc / Rational::from_integer(BigInt::from(n + 1));
        cache.push(bn);
    }
    cache[k as usize].clone()
}

/// B_k(x) = sum_j C(k, j) B_j x^{k-j}.
pub fn bernoulli_poly(k: u64, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut x_pow = rat_i64(1); // x^{k-j}, built from the top down
    for j in (0..=k).rev() {
        acc += Rational::from_integer(binomial(k, j)) * bernoulli_number(j) * &x_pow;
        x_pow *= x;
    }
    acc
}

/// zeta(1-k) = -B_k / k for k >= 2; zero at odd k >= 3.
pub fn zeta_neg(k: u64) -> Result<Rational> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "zeta_neg needs k >= 2, got {k}"
        )));
    }
    Ok(-bernoulli_number(k) / rat_i64(k as i64))
}

/// Continuation value zeta(1-k; a, N) of sum_{0<n=a mod N} n^{-k},
/// with the representative convention 1 <= a <= N.
pub fn partial_zeta_neg(k: u64, a: u64, n: u64) -> Result<Rational> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "partial_zeta_neg needs k >= 2, got {k}"
        )));
    }
    if a < 1 || a > n {
        return Err(Error::InvalidArgument(format!(
            "representative {a} out of range 1..={n}"
        )));
    }
    let x = Rational::new(BigInt::from(a), BigInt::from(n));
    let nk1 = rat_i64(n as i64).pow((k - 1) as i32);
    Ok(-nk1 * bernoulli_poly(k, &x) / rat_i64(k as i64))
}

/// Generalized Bernoulli number B_{k,chi} over the conductor of chi.
pub fn generalized_bernoulli(k: u64, chi: &DirichletCharacter) -> CyclotomicNumber {
    let c = chi.conductor();
    let ck1 = rat_i64(c as i64).pow((k - 1) as i32);
    let mut acc = CyclotomicNumber::zero(1);
    for a in 1..=c {
        let x = Rational::new(BigInt::from(a), BigInt::from(c));
        let coeff = bernoulli_poly(k, &x) * &ck1;
        acc = acc.add(&chi.evaluate_primitive(a as i64).scale(&coeff));
    }
    acc.reduce_order()
}

/// L(1-k, chi) = -B_{k,chi} / k; equals zeta(1-k) for principal chi.
pub fn l_neg(k: u64, chi: &DirichletCharacter) -> Result<CyclotomicNumber> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "l_neg needs k >= 2, got {k}"
        )));
    }
    Ok(generalized_bernoulli(k, chi).scale(&-Rational::new(BigInt::from(1), BigInt::from(k))))
}

/// Partial sum of L(k, chi) = sum chi(n) n^{-k} with its tail bound.
pub struct LSeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Numeric L(k, chi) by direct summation of `terms` terms; the tail is
/// bounded by terms^{1-k}/(k-1).
pub fn l_complex(k: u64, chi: &DirichletCharacter, terms: u64) -> LSeriesValue {
    let mut acc = Complex64::new(0.0, 0.0);
    // cache the phi(p^m) embedded character values once
    let modulus = chi.modulus();
    let values: Vec<Complex64> = (0..modulus)
        .map(|r| chi.evaluate(r as i64).embed())
        .collect();
    for n in 1..=terms {
        let v = values[(n % modulus) as usize];
        if v != Complex64::new(0.0, 0.0) {
            acc += v * (n as f64).powi(-(k as i32));
        }
    }
    LSeriesValue {
        value: acc,
        tail_bound: (terms as f64).powi(1 - k as i32) / (k as f64 - 1.0),
    }
}

/// Numeric two-sided functional-equation comparison for a primitive
/// character of conductor C: returns (L(1-k, chi) embedded, the completed
/// right side C^{k-1} Gamma(k) (2 pi)^{-k} 2 i^delta cos(pi(k-delta)/2)
/// G(chi) L(k, conj chi), propagated tail bound). Both sides vanish when
/// the parity of chi differs from that of k.
pub fn functional_equation_numeric(
    k: u64,
    chi: &DirichletCharacter,
    terms: u64,
) -> Result<(Complex64, Complex64, f64)> {
    if chi.conductor() != chi.modulus() && !chi.is_principal() {
        return Err(Error::InvalidArgument(
            "functional equation comparison needs a primitive character".into(),
        ));
    }
    let c = chi.conductor().max(1);
    let lhs = l_neg(k, chi)?.embed();
    let delta = chi.parity();
    let cos = match (k as i64 - delta as i64).rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    };
    let mut gamma = 1.0f64;
    for i in 2..k {
        gamma *= i as f64;
    }
    let pref = (c as f64).powi(k as i32 - 1)
        * gamma
        * (2.0 * std::f64::consts::PI).powi(-(k as i32))
        * 2.0
        * cos;
    let i_delta = if delta == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let g = chi.gauss_sum().embed();
    let l = l_complex(k, &chi.conjugate(), terms);
    let rhs = i_delta * g * l.value * pref;
    let tail = pref.abs() * g.norm() * l.tail_bound;
    Ok((lhs, rhs, tail))
}

/// True iff p divides no numerator of B_k for even k in 2..=p-3.
pub fn is_regular_prime(p: u64) -> bool {
    let pp = BigInt::from(p);
    (2..=p.saturating_sub(3))
        .step_by(2)
        .all(|k| !(bernoulli_number(k).numer().abs() % &pp).is_zero())
}

/// Memo table for special values; hits must equal recomputation exactly.
#[derive(Default)]
pub struct SpecialValueCache {
    rationals: Mutex<HashMap<(&'static str, Vec<i64>), Rational>>,
    cyclotomics: Mutex<HashMap<(&'static str, Vec<i64>), CyclotomicNumber>>,
}

impl SpecialValueCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rational(
        &self,
        kind: &'static str,
        params: &[i64],
        compute: impl FnOnce() -> Rational,
    ) -> Rational {
        let key = (kind, params.to_vec());
        let mut map = self.rationals.lock().unwrap();
        map.entry(key).or_insert_with(compute).clone()
    }

    pub fn cyclotomic(
        &self,
        kind: &'static str,
        params: &[i64],
        compute: impl FnOnce() -> CyclotomicNumber,
    ) -> CyclotomicNumber {
        let key = (kind, params.to_vec());
        let mut map = self.cyclotomics.lock().unwrap();
        map.entry(key).or_insert_with(compute).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::numtheory::euler_phi;
    use crate::rational::rat_frac;
    use num_traits::One;

    #[test]
    fn bernoulli_basics() {
        assert_eq!(bernoulli_number(0), rat_i64(1));
        assert_eq!(bernoulli_number(1), rat_frac(-1, 2));
        assert_eq!(bernoulli_number(4), rat_frac(-1, 30));
        for k in (3..=21).step_by(2) {
            assert!(bernoulli_number(k).is_zero());
        }
        // numeric cross-check: zeta(4) = pi^4/90 = -B_4 (2 pi)^4 / (2 * 4!)
        let z4 = {
            let b4 = bernoulli_number(4);
            let b4f = b4.numer().to_string().parse::<f64>().unwrap()
                / b4.denom().to_string().parse::<f64>().unwrap();
            -b4f * (2.0 * std::f64::consts::PI).powi(4) / 48.0
        };
        assert!((z4 - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_poly_identities() {
        assert_eq!(bernoulli_poly(2, &rat_i64(0)), rat_frac(1, 6));
        for k in 2..=10 {
            assert_eq!(
                bernoulli_poly(k, &rat_i64(1)),
                bernoulli_poly(k, &rat_i64(0))
            );
        }
        // difference identity B_k(x+1) - B_k(x) = k x^{k-1}
        let x = rat_frac(3, 7);
        for k in 1..=8u64 {
            let lhs = bernoulli_poly(k, &(&x + rat_i64(1))) - bernoulli_poly(k, &x);
            let rhs = rat_i64(k as i64) * x.pow(k as i32 - 1);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_neg(2).unwrap(), rat_frac(-1, 12));
        assert_eq!(zeta_neg(4).unwrap(), rat_frac(1, 120));
        assert!(zeta_neg(5).unwrap().is_zero());
        assert!(zeta_neg(1).is_err());
    }

    #[test]
    fn partial_zeta_partition() {
        assert_eq!(partial_zeta_neg(2, 1, 1).unwrap(), rat_frac(-1, 12));
        for (k, n) in [(4u64, 5u64), (2, 7), (6, 4)] {
            let total: Rational = (1..=n)
                .map(|a| partial_zeta_neg(k, a, n).unwrap())
                .sum();
            assert_eq!(total, zeta_neg(k).unwrap());
        }
        assert!(partial_zeta_neg(4, 0, 5).is_err());
        assert!(partial_zeta_neg(4, 6, 5).is_err());
    }

    #[test]
    fn partial_zeta_refinement() {
        for p in [3u64, 5, 7] {
            for m in 1..=2u32 {
                for k in [4u64, 6] {
                    let pm = p.pow(m - 1) * p; // p^m
                    for a in 1..=pm {
                        let lhs = partial_zeta_neg(k, a, pm).unwrap();
                        let rhs: Rational = (0..p)
                            .map(|j| partial_zeta_neg(k, a + j * pm, pm * p).unwrap())
                            .sum();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn von_staudt_clausen_denominators() {
        for k in (2..=30u64).step_by(2) {
            let mut product = BigInt::one();
            for p in 2..=k + 1 {
                if crate::numtheory::is_prime(p) && k % (p - 1) == 0 {
                    product *= BigInt::from(p);
                }
            }
            // denominator of B_k is exactly the product of primes with (p-1)|k
            assert_eq!(bernoulli_number(k).denom(), &product);
        }
    }

    #[test]
    fn l_neg_values() {
        let chars = enumerate_characters(5, 1).unwrap();
        assert_eq!(
            l_neg(4, &chars[0]).unwrap().to_rational().unwrap(),
            rat_frac(1, 120)
        );
        // odd character, even k: parity-trivial zero
        let quartic = chars.iter().find(|c| c.order() == 4).unwrap();
        assert!(l_neg(4, quartic).unwrap().is_zero());
    }

    #[test]
    fn l_neg_matches_partial_zeta_sum() {
        for p in [5u64, 7] {
            for m in 1..=2u32 {
                let pm = p.pow(m);
                for chi in enumerate_characters(p, m).unwrap() {
                    if chi.conductor() != pm {
                        continue; // identity is for primitive chi mod p^m
                    }
                    for k in [4u64, 6] {
                        let mut rhs = CyclotomicNumber::zero(1);
                        for a in 1..=pm {
                            if a % p == 0 {
                                continue;
                            }
                            let z = partial_zeta_neg(k, a, pm).unwrap();
                            rhs = rhs.add(&chi.evaluate(a as i64).scale(&z));
                        }
                        assert_eq!(l_neg(k, &chi).unwrap(), rhs.reduce_order());
                    }
                }
            }
        }
    }

    #[test]
    fn l_complex_basics() {
        let principal_mod_5 = &enumerate_characters(5, 1).unwrap()[0];
        // with the mod-5 principal character the series drops multiples of 5:
        // zeta(4)(1 - 5^{-4})
        let got = l_complex(4, principal_mod_5, 100_000);
        let expect = std::f64::consts::PI.powi(4) / 90.0 * (1.0 - 5f64.powi(-4));
        assert!((got.value.re - expect).abs() < 1e-10);
        assert!(got.value.im.abs() < 1e-15);

        let quad = enumerate_characters(5, 1)
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        let a = l_complex(4, &quad, 50_000);
        let b = l_complex(4, &quad, 100_000);
        assert!(a.value.norm() < 2.0);
        assert!((a.value - b.value).norm() <= a.tail_bound);
    }

    #[test]
    fn regular_primes() {
        assert!(is_regular_prime(5));
        assert!(is_regular_prime(7));
        assert!(is_regular_prime(11));
        assert!(!is_regular_prime(37));
    }

    #[test]
    fn cache_hits_equal_recomputation() {
        let cache = SpecialValueCache::new();
        let v1 = cache.rational("zeta_neg", &[4], || zeta_neg(4).unwrap());
        let v2 = cache.rational("zeta_neg", &[4], || panic!("must hit cache"));
        assert_eq!(v1, v2);
        assert_eq!(v1, zeta_neg(4).unwrap());
        let phi = euler_phi(5) as i64;
        let c1 = cache.cyclotomic("root", &[phi], || {
            CyclotomicNumber::root_of_unity(phi as u64, 1)
        });
        let c2 = cache.cyclotomic("root", &[phi], || panic!("must hit cache"));
        assert_eq!(c1, c2);
    }
}
