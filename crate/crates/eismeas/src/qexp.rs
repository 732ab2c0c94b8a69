//! Truncated formal q-expansions over an exchangeable scalar ring, with
//! the U operator (a_n -> a_{pn}), character twists, and partial forms
//! (restriction of the index n to a residue class).

use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::characters::DirichletCharacter;
use crate::cyclotomic::CyclotomicNumber;
use crate::rational::{rational_to_string, Rational};
use crate::{Error, Result};

/// Coefficient ring for q-expansions.
pub trait Scalar: Clone + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    /// Tag used in the serialized form.
    fn kind() -> &'static str;
    fn coeff_json(&self) -> Value;
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn kind() -> &'static str {
        "rational"
    }
    fn coeff_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }
}

impl Scalar for CyclotomicNumber {
    fn zero() -> Self {
        CyclotomicNumber::zero(1)
    }
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        CyclotomicNumber::add(self, other)
    }
    fn kind() -> &'static str {
        "cyclotomic"
    }
    fn coeff_json(&self) -> Value {
        serde_json::to_value(self).expect("cyclotomic serialization")
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn kind() -> &'static str {
        "complex"
    }
    fn coeff_json(&self) -> Value {
        json!([self.re, self.im])
    }
}

/// Truncated power series a_0 + a_1 q + ... + a_{Q-1} q^{Q-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> QExpansion<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "precision must be positive");
        QExpansion { coeffs }
    }

    pub fn zero(precision: usize) -> Self {
        Self::new(vec![S::zero(); precision])
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &S {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn truncate(&self, precision: usize) -> Self {
        Self::new(self.coeffs[..precision.min(self.coeffs.len())].to_vec())
    }

    /// Sum, truncated to the smaller precision.
    pub fn add(&self, other: &Self) -> Self {
        let q = self.precision().min(other.precision());
        Self::new(
            (0..q)
                .map(|n| self.coeffs[n].add(&other.coeffs[n]))
                .collect(),
        )
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(usize, &S) -> T) -> QExpansion<T> {
        QExpansion::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| f(n, c))
                .collect(),
        )
    }

    /// g|U = sum a(pn) q^n; a(pn) is known for pn < Q, so the precision
    /// drops to ceil(Q/p).
    pub fn u_operator(&self, p: u64) -> Result<Self> {
        let p = p as usize;
        if self.precision() < p {
            return Err(Error::PrecisionTooSmall {
                need: p,
                have: self.precision(),
            });
        }
        let q = self.precision().div_ceil(p);
        Ok(Self::new((0..q).map(|n| self.coeffs[n * p].clone()).collect()))
    }

    /// Keep the coefficients with n = a mod `level`, zeroing the rest.
    pub fn partial_form(&self, a: u64, level: u64) -> Self {
        let a = a % level;
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    if n as u64 % level == a {
                        c.clone()
                    } else {
                        S::zero()
                    }
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "precision": self.precision(),
            "scalar": S::kind(),
            "coeffs": self.coeffs.iter().map(S::coeff_json).collect::<Vec<_>>(),
        })
    }
}

impl QExpansion<Rational> {
    pub fn to_cyclotomic(&self) -> QExpansion<CyclotomicNumber> {
        self.map(|_, c| CyclotomicNumber::from_rational(c.clone()))
    }

    pub fn embed(&self) -> QExpansion<Complex64> {
        self.map(|_, c| Complex64::new(crate::rational::rational_approx(c), 0.0))
    }
}

impl QExpansion<CyclotomicNumber> {
    /// Coefficient-wise twist a_n -> chi(n) a_n.
    pub fn twist(&self, chi: &DirichletCharacter) -> Self {
        self.map(|n, c| chi.evaluate(n as i64).mul(c))
    }

    pub fn embed(&self) -> QExpansion<Complex64> {
        self.map(|_, c| c.embed())
    }
}

impl QExpansion<Complex64> {
    pub fn twist(&self, chi: &DirichletCharacter) -> Self {
        self.map(|n, c| chi.evaluate(n as i64).embed() * c)
    }

    /// Evaluate the truncated series at a given value of q by Horner.
    pub fn evaluate(&self, q: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::rational::rat_i64;

    fn qexp_i64(v: &[i64]) -> QExpansion<Rational> {
        QExpansion::new(v.iter().map(|&x| rat_i64(x)).collect())
    }

    #[test]
    fn u_operator_definition() {
        let f = qexp_i64(&[1, 1, 2, 3, 4]);
        let g = f.u_operator(2).unwrap();
        assert_eq!(g, qexp_i64(&[1, 2, 4]));
        assert!(qexp_i64(&[1]).u_operator(2).is_err());
        // constants are fixed by U
        let c = qexp_i64(&[7, 0, 0, 0, 0, 0]);
        assert_eq!(c.u_operator(2).unwrap(), qexp_i64(&[7, 0, 0]));
        // U^2 = U applied twice
        let f = qexp_i64(&(0..50).collect::<Vec<_>>());
        assert_eq!(
            f.u_operator(2).unwrap().u_operator(2).unwrap(),
            f.u_operator(4).unwrap()
        );
    }

    #[test]
    fn partial_form_partition_and_refinement() {
        let f = qexp_i64(&(1..=40).collect::<Vec<_>>());
        // partition over residues reassembles f
        let mut total = QExpansion::zero(f.precision());
        for a in 0..4 {
            total = total.add(&f.partial_form(a, 4));
        }
        assert_eq!(total, f);
        // refinement: class mod 2 splits into two classes mod 4
        let lhs = f.partial_form(1, 2);
        let rhs = f.partial_form(1, 4).add(&f.partial_form(3, 4));
        assert_eq!(lhs, rhs);
        // 1 + q + q^2, a=1 mod 2 keeps just q
        assert_eq!(
            qexp_i64(&[1, 1, 1]).partial_form(1, 2),
            qexp_i64(&[0, 1, 0])
        );
    }

    #[test]
    fn twist_properties() {
        let chars = enumerate_characters(5, 1).unwrap();
        let principal = &chars[0];
        let f = qexp_i64(&(1..=30).collect::<Vec<_>>()).to_cyclotomic();
        // principal twist zeroes p-divisible indices and keeps the rest
        let t = f.twist(principal);
        for n in 0..30usize {
            if n % 5 == 0 {
                assert!(t.coeff(n).is_zero());
            } else {
                assert_eq!(t.coeff(n), f.coeff(n));
            }
        }
        for chi in &chars {
            // chi then conj(chi) recovers f away from p
            let tt = f.twist(chi).twist(&chi.conjugate());
            assert_eq!(tt, t);
            // twist = sum_a chi(a) * partial_form(f, a, 5)
            let mut s: QExpansion<CyclotomicNumber> = QExpansion::zero(30);
            for a in 1..5u64 {
                let part = f.partial_form(a, 5);
                s = s.add(&part.map(|_, c| chi.evaluate(a as i64).mul(c)));
            }
            assert_eq!(s, f.twist(chi));
        }
    }

    #[test]
    fn evaluate_horner() {
        let f = QExpansion::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ]);
        let q = Complex64::new(0.5, 0.0);
        assert!((f.evaluate(q) - Complex64::new(1.0 + 1.0 + 0.75, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let f = qexp_i64(&[1, 2]);
        let v = f.to_json();
        assert_eq!(v["precision"], 2);
        assert_eq!(v["scalar"], "rational");
        assert_eq!(v["coeffs"][1], "2");
    }
}
