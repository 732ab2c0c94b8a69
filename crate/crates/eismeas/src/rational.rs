//! Exact rational scalars: arbitrary-precision fractions in lowest terms,
//! p-adic valuations, and the `"num/den"` string form used on the wire.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision exact fraction, always in lowest terms with a
/// positive denominator; zero is 0/1.
pub type Rational = BigRational;

pub fn rat_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// p-adic valuation with `None` standing for +infinity (the valuation of 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PadicValuation {
    Finite(i64),
    Infinite,
}

impl PadicValuation {
    pub fn is_nonnegative(self) -> bool {
        match self {
            PadicValuation::Finite(v) => v >= 0,
            PadicValuation::Infinite => true,
        }
    }

    pub fn at_least(self, bound: i64) -> bool {
        match self {
            PadicValuation::Finite(v) => v >= bound,
            PadicValuation::Infinite => true,
        }
    }
}

fn int_valuation(n: &BigInt, p: u64) -> PadicValuation {
    if n.is_zero() {
        return PadicValuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if r.is_zero() {
            v += 1;
            n = q;
        } else {
            return PadicValuation::Finite(v);
        }
    }
}

/// v_p(r), with v_p(0) = +infinity and v_p(ab) = v_p(a) + v_p(b).
pub fn p_valuation(r: &Rational, p: u64) -> PadicValuation {
    match (int_valuation(r.numer(), p), int_valuation(r.denom(), p)) {
        (PadicValuation::Infinite, _) => PadicValuation::Infinite,
        (PadicValuation::Finite(a), PadicValuation::Finite(b)) => PadicValuation::Finite(a - b),
        (_, PadicValuation::Infinite) => unreachable!("denominator is nonzero"),
    }
}

/// Fractional part {x} of the least nonnegative representative, i.e.
/// x - floor(x) as an exact rational in [0, 1).
pub fn fractional_part(x: &Rational) -> Rational {
    x - x.floor()
}

/// Serialize as `"num/den"`, with `/den` omitted when the denominator is 1.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the `"num/den"` form produced by [`rational_to_string`].
pub fn rational_from_string(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((n, d)) => {
            let n = n.parse::<BigInt>().ok()?;
            let d = d.parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
    }
}

/// Nearest double to an exact rational, via a quotient-remainder split so
/// huge numerators and denominators do not overflow to NaN.
pub fn rational_approx(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let (q, rem) = num_integer::Integer::div_rem(r.numer(), r.denom());
    q.to_f64().unwrap_or(0.0)
        + rem.to_f64().unwrap_or(0.0) / r.denom().to_f64().unwrap_or(f64::INFINITY)
}

/// Binomial coefficient C(n, k) as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    BigInt::from(num / den)
}

/// n! as an exact integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}
