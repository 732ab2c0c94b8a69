//! Arithmetic in cyclotomic fields Q(zeta_n) using the power basis
//! 1, zeta_n, ..., zeta_n^{phi(n)-1} with canonical reduction modulo the
//! n-th cyclotomic polynomial.
//!
//! Reduction is canonical, so equality of elements of the same order is
//! coordinate-wise; mixed-order arithmetic lifts both operands to the lcm
//! of their orders via zeta_m -> zeta_L^{L/m}. Divisibility of an element
//! by a rational integer N is checked coordinate-wise, which is exact
//! because the power basis is an integral basis of Z[zeta_n].

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numtheory::{divisors, euler_phi, gcd, lcm};
use crate::rational::{rational_from_string, rational_to_string, Rational};
use crate::{Error, Result};

static CYCLOTOMIC_CACHE: Lazy<Mutex<HashMap<u64, Vec<BigInt>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Coefficients (ascending, monic) of the n-th cyclotomic polynomial,
/// computed by dividing x^n - 1 by the product of Phi_d over proper
/// divisors d of n.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    if let Some(hit) = CYCLOTOMIC_CACHE.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let poly = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        // x^n - 1
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::one();
        for d in divisors(n) {
            if d < n {
                num = int_poly_div_exact(&num, &cyclotomic_polynomial(d));
            }
        }
        num
    };
    CYCLOTOMIC_CACHE
        .lock()
        .unwrap()
        .insert(n, poly.clone());
    poly
}

/// Exact division of integer polynomials (divisor monic).
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn].clone();
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Element of Q(zeta_n) in the reduced power basis.
#[derive(Debug, Clone)]
pub struct CyclotomicNumber {
    order: u64,
    coords: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn zero(order: u64) -> Self {
        CyclotomicNumber {
            order,
            coords: vec![Rational::zero(); euler_phi(order) as usize],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational_with_order(Rational::one(), order)
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_rational_with_order(r, 1)
    }

    pub fn from_rational_with_order(r: Rational, order: u64) -> Self {
        let mut z = Self::zero(order);
        z.coords[0] = r;
        z
    }

    /// zeta_n^j = e(j/n), with j taken mod n.
    pub fn root_of_unity(order: u64, j: i64) -> Self {
        let j = j.rem_euclid(order as i64) as usize;
        let mut poly = vec![Rational::zero(); j + 1];
        poly[j] = Rational::one();
        Self::from_polynomial(order, poly)
    }

    /// Build from an arbitrary-degree polynomial in zeta_n, reducing mod Phi_n.
    pub fn from_polynomial(order: u64, mut poly: Vec<Rational>) -> Self {
        let phi_poly = cyclotomic_polynomial(order);
        reduce_mod(&mut poly, &phi_poly);
        let deg = euler_phi(order) as usize;
        poly.resize(deg, Rational::zero());
        CyclotomicNumber {
            order,
            coords: poly,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The rational this element equals, if it lies in Q.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Embed into Q(zeta_target) via zeta_n -> zeta_target^{target/n}.
    pub fn lift(&self, target: u64) -> Self {
        assert!(
            target % self.order == 0,
            "lift target must be a multiple of the order"
        );
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coords.len() - 1) * step + 1];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                poly[i * step] = c.clone();
            }
        }
        Self::from_polynomial(target, poly)
    }

    fn common_order(&self, other: &Self) -> u64 {
        lcm(self.order, other.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let (a, b) = (self.lift(n), other.lift(n));
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| x + y)
            .collect();
        CyclotomicNumber { order: n, coords }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            order: self.order,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let (a, b) = (self.lift(n), other.lift(n));
        let mut poly = vec![Rational::zero(); a.coords.len() + b.coords.len() - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        Self::from_polynomial(n, poly)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicNumber {
            order: self.order,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x]
    /// against Phi_n.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("cyclotomic inverse"));
        }
        let modulus: Vec<Rational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        // Bezout: u * self + v * Phi = gcd; gcd is a nonzero constant.
        let mut r0 = modulus;
        let mut r1 = trim(self.coords.clone());
        let mut u0: Vec<Rational> = vec![];
        let mut u1 = vec![Rational::one()];
        while !r1.is_empty() && r1.len() > 1 {
            let (q, rem) = poly_div(&r0, &r1);
            let new_u = poly_sub(&u0, &poly_mul(&q, &u1));
            r0 = r1;
            r1 = rem;
            u0 = u1;
            u1 = new_u;
        }
        if r1.is_empty() {
            return Err(Error::DivisionByZero("cyclotomic inverse"));
        }
        let c = r1[0].clone(); // nonzero constant gcd
        let inv_poly: Vec<Rational> = u1.iter().map(|x| x / &c).collect();
        Ok(Self::from_polynomial(self.order, inv_poly))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Galois action zeta_n -> zeta_n^j for gcd(j, n) = 1.
    pub fn galois(&self, j: i64) -> Self {
        let n = self.order;
        let jj = j.rem_euclid(n as i64) as u64;
        assert!(gcd(jj, n) == 1, "galois exponent must be coprime to the order");
        let mut poly = vec![Rational::zero(); n as usize];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                let e = (i as u64 * jj % n) as usize;
                poly[e] += c;
            }
        }
        Self::from_polynomial(n, poly)
    }

    /// Complex conjugation, i.e. zeta -> zeta^{-1}.
    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        self.galois(self.order as i64 - 1)
    }

    /// Rewrite over the smallest cyclotomic subfield Q(zeta_d), d | n,
    /// that contains this element.
    pub fn reduce_order(&self) -> Self {
        let n = self.order;
        for d in divisors(n) {
            if self.fixed_by_subfield_stabilizer(d) {
                if let Some(reduced) = self.express_in_suborder(d) {
                    return reduced;
                }
            }
        }
        self.clone()
    }

    fn fixed_by_subfield_stabilizer(&self, d: u64) -> bool {
        let n = self.order;
        for j in 1..n {
            if gcd(j, n) == 1 && j % d == 1 % d {
                if self.galois(j as i64) != *self {
                    return false;
                }
            }
        }
        true
    }

    fn express_in_suborder(&self, d: u64) -> Option<Self> {
        if d == self.order {
            return Some(self.clone());
        }
        let rows = self.coords.len();
        let cols = euler_phi(d) as usize;
        // Columns: coordinates of zeta_d^i lifted to order n; solve for the
        // coefficient vector reproducing self.
        let mut aug = vec![vec![Rational::zero(); cols + 1]; rows];
        for i in 0..cols {
            let lifted = Self::root_of_unity(d, i as i64).lift(self.order);
            for r in 0..rows {
                aug[r][i] = lifted.coords[r].clone();
            }
        }
        for r in 0..rows {
            aug[r][cols] = self.coords[r].clone();
        }
        let sol = solve_linear(aug, cols)?;
        Some(CyclotomicNumber {
            order: d,
            coords: sol,
        })
    }

    /// True iff every power-basis coordinate is an integer divisible by n.
    pub fn divisible_by_integer(&self, n: u64) -> bool {
        let n = BigInt::from(n);
        self.coords.iter().all(|c| {
            c.denom().is_one() && (c.numer() % &n).is_zero()
        })
    }

    /// True iff every coordinate is a rational integer.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }

    /// Evaluate at zeta_n = exp(2 pi i / n).
    pub fn embed(&self) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI / self.order as f64;
        let zeta = Complex64::new(theta.cos(), theta.sin());
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coords.iter().rev() {
            acc = acc * zeta + Complex64::new(rational_to_f64(c), 0.0);
        }
        acc
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    crate::rational::rational_approx(r)
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coords == other.coords;
        }
        let n = self.common_order(other);
        self.lift(n).coords == other.lift(n).coords
    }
}

impl Eq for CyclotomicNumber {}

/// Accumulator for large sums of rational multiples of roots of unity
/// zeta_n^e; coefficients are collected unreduced and folded through a
/// single reduction at the end.
pub struct CycloAccumulator {
    order: u64,
    acc: Vec<Rational>,
}

impl CycloAccumulator {
    pub fn new(order: u64) -> Self {
        CycloAccumulator {
            order,
            acc: vec![Rational::zero(); order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn add_root_multiple(&mut self, exponent: i64, coeff: &Rational) {
        let e = exponent.rem_euclid(self.order as i64) as usize;
        self.acc[e] += coeff;
    }

    pub fn finish(self) -> CyclotomicNumber {
        CyclotomicNumber::from_polynomial(self.order, self.acc)
    }
}

// --- dense polynomial helpers over Q (ascending coefficients) ---

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn reduce_mod(poly: &mut Vec<Rational>, modulus: &[BigInt]) {
    let deg = modulus.len() - 1;
    while trim_len(poly) > deg {
        let top = trim_len(poly) - 1;
        let c = poly[top].clone();
        if c.is_zero() {
            poly.truncate(top);
            continue;
        }
        let shift = top - deg;
        for (j, mj) in modulus.iter().enumerate() {
            if !mj.is_zero() {
                poly[shift + j] -= &c * &Rational::from_integer(mj.clone());
            }
        }
    }
}

fn trim_len(p: &[Rational]) -> usize {
    let mut len = p.len();
    while len > 0 && p[len - 1].is_zero() {
        len -= 1;
    }
    len
}

fn poly_div(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let dn = den.len() - 1;
    if rem.len() <= dn {
        return (vec![], rem);
    }
    let lead = den[dn].clone();
    let mut quot = vec![Rational::zero(); rem.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dn] / &lead;
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                let t = &c * dj;
                rem[i + j] -= t;
            }
        }
        quot[i] = c;
    }
    (trim(quot), trim(rem))
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Gaussian elimination for an overdetermined consistent system; `aug` is
/// rows of [coefficients | rhs] with `cols` unknowns.
fn solve_linear(mut aug: Vec<Vec<Rational>>, cols: usize) -> Option<Vec<Rational>> {
    let rows = aug.len();
    let mut pivot_rows = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let pivot = (r..rows).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(r, pivot);
        let inv = aug[r][c].clone();
        for j in c..=cols {
            let v = &aug[r][j] / &inv;
            aug[r][j] = v;
        }
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in c..=cols {
                    let t = &f * &aug[r][j];
                    aug[i][j] -= t;
                }
            }
        }
        pivot_rows.push(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    if pivot_rows.len() < cols {
        return None;
    }
    // consistency of the remaining rows
    for i in r..rows {
        if !aug[i][cols].is_zero() {
            return None;
        }
    }
    Some((0..cols).map(|c| aug[c][cols].clone()).collect())
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CyclotomicNumber", 2)?;
        s.serialize_field("order", &self.order)?;
        let coords: Vec<String> = self.coords.iter().map(rational_to_string).collect();
        s.serialize_field("coords", &coords)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            order: u64,
            coords: Vec<String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.coords.len() != euler_phi(raw.order) as usize {
            return Err(D::Error::custom("coordinate count must equal phi(order)"));
        }
        let coords = raw
            .coords
            .iter()
            .map(|s| rational_from_string(s).ok_or_else(|| D::Error::custom("bad rational")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CyclotomicNumber {
            order: raw.order,
            coords,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat_frac, rat_i64};

    #[test]
    fn cyclotomic_polynomials_small() {
        let to_i = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect::<Vec<_>>();
        assert_eq!(cyclotomic_polynomial(1), to_i(vec![-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), to_i(vec![1, 1]));
        assert_eq!(cyclotomic_polynomial(4), to_i(vec![1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(5), to_i(vec![1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(12), to_i(vec![1, 0, -1, 0, 1]));
    }

    #[test]
    fn root_identities() {
        // zeta_4^2 = -1
        let m1 = CyclotomicNumber::root_of_unity(4, 2);
        assert_eq!(m1.to_rational().unwrap(), rat_i64(-1));
        // zeta_1^0 = 1
        assert_eq!(
            CyclotomicNumber::root_of_unity(1, 0).to_rational().unwrap(),
            rat_i64(1)
        );
        // full sum of 5th roots vanishes
        let mut s = CyclotomicNumber::zero(5);
        for j in 0..5 {
            s = s.add(&CyclotomicNumber::root_of_unity(5, j));
        }
        assert!(s.is_zero());
        // periodicity in the exponent
        assert_eq!(
            CyclotomicNumber::root_of_unity(5, 7),
            CyclotomicNumber::root_of_unity(5, 2)
        );
    }

    #[test]
    fn inverse_and_mixed_order() {
        let a = CyclotomicNumber::one(5).add(&CyclotomicNumber::root_of_unity(5, 1));
        let prod = a.mul(&a.inv().unwrap());
        assert_eq!(prod.to_rational().unwrap(), rat_i64(1));

        // zeta_4 * zeta_5 = zeta_20^9 after lifting
        let z = CyclotomicNumber::root_of_unity(4, 1).mul(&CyclotomicNumber::root_of_unity(5, 1));
        assert_eq!(z, CyclotomicNumber::root_of_unity(20, 9));
        let w = z.embed();
        let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 9.0 / 20.0);
        assert!((w - expect).norm() < 1e-12);

        assert!(CyclotomicNumber::zero(7).neg().is_zero());
    }

    #[test]
    fn embed_examples() {
        let i = CyclotomicNumber::root_of_unity(4, 1).embed();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let m1 = CyclotomicNumber::from_rational(rat_i64(-1)).embed();
        assert!((m1 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn divisibility() {
        // 10 + 5 zeta_4 divisible by 5
        let v = CyclotomicNumber::from_rational_with_order(rat_i64(10), 4)
            .add(&CyclotomicNumber::root_of_unity(4, 1).scale(&rat_i64(5)));
        assert!(v.divisible_by_integer(5));
        assert!(!CyclotomicNumber::one(1).divisible_by_integer(2));
        // divisibility by MN implies divisibility by M
        assert!(v.scale(&rat_i64(3)).divisible_by_integer(15));
        assert!(v.scale(&rat_i64(3)).divisible_by_integer(5));
        // non-integral coordinates are never divisible
        assert!(!CyclotomicNumber::from_rational(rat_frac(10, 3)).divisible_by_integer(5));
    }

    #[test]
    fn lift_and_reduce_roundtrip() {
        let a = CyclotomicNumber::root_of_unity(5, 2)
            .add(&CyclotomicNumber::from_rational_with_order(rat_frac(3, 7), 5));
        let lifted = a.lift(40);
        assert_eq!(lifted.order(), 40);
        let back = lifted.reduce_order();
        assert_eq!(back.order(), 5);
        assert_eq!(back, a);
    }

    #[test]
    fn conjugation_is_involutive() {
        let a = CyclotomicNumber::root_of_unity(7, 3)
            .add(&CyclotomicNumber::root_of_unity(7, 5).scale(&rat_i64(2)));
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn accumulator_matches_direct_sum() {
        let mut acc = CycloAccumulator::new(12);
        let mut direct = CyclotomicNumber::zero(12);
        for (e, c) in [(3i64, 2i64), (7, -1), (15, 4), (-2, 3)] {
            acc.add_root_multiple(e, &rat_i64(c));
            direct = direct.add(&CyclotomicNumber::root_of_unity(12, e).scale(&rat_i64(c)));
        }
        assert_eq!(acc.finish(), direct);
    }

    #[test]
    fn serde_roundtrip() {
        let a = CyclotomicNumber::root_of_unity(5, 1).scale(&rat_frac(2, 3));
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"order\":5"));
        let b: CyclotomicNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(a, b);
    }
}
