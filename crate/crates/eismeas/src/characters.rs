//! Dirichlet characters modulo p^m for odd primes p.
//!
//! (Z/p^m)^* is cyclic, so a character is pinned down by a fixed primitive
//! root g and an index j with chi(g) = zeta_phi^j where phi = phi(p^m).
//! Values are monomials in Q(zeta_phi), read off a shared discrete-log
//! table.

use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::{CycloAccumulator, CyclotomicNumber};
use crate::numtheory::{euler_phi, gcd, mod_pow, primitive_root};
use crate::{Error, Result};

/// Character mod p^m determined by its value zeta_phi^index at the fixed
/// primitive root.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    p: u64,
    m: u32,
    generator: u64,
    index: u64,
    conductor: u64,
    dlog: Arc<Vec<u64>>,
}

fn dlog_table(p: u64, m: u32, g: u64) -> Vec<u64> {
    let modulus = p.pow(m);
    let phi = euler_phi(modulus);
    // sentinel u64::MAX marks non-units
    let mut table = vec![u64::MAX; modulus as usize];
    let mut acc = 1u64;
    for e in 0..phi {
        table[acc as usize] = e;
        acc = acc * g % modulus;
    }
    table
}

impl DirichletCharacter {
    pub fn new(p: u64, m: u32, index: u64) -> Result<Self> {
        if p == 2 || p % 2 == 0 {
            return Err(Error::InvalidArgument(
                "characters are only supported for odd prime modulus".into(),
            ));
        }
        let g = primitive_root(p, m);
        let dlog = Arc::new(dlog_table(p, m, g));
        Ok(Self::with_table(p, m, g, index, dlog))
    }

    fn with_table(p: u64, m: u32, generator: u64, index: u64, dlog: Arc<Vec<u64>>) -> Self {
        let phi = euler_phi(p.pow(m));
        let index = index % phi;
        let conductor = conductor_from_index(p, m, index);
        DirichletCharacter {
            p,
            m,
            generator,
            index,
            conductor,
            dlog,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// phi(p^m), the order of zeta carrying the character values.
    pub fn value_order(&self) -> u64 {
        euler_phi(self.modulus())
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// Multiplicative order of the character in the dual group.
    pub fn order(&self) -> u64 {
        let phi = self.value_order();
        phi / gcd(self.index, phi)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// delta with chi(-1) = (-1)^delta; equals the parity of the index.
    pub fn parity(&self) -> u8 {
        (self.index % 2) as u8
    }

    pub fn conjugate(&self) -> Self {
        let phi = self.value_order();
        Self::with_table(
            self.p,
            self.m,
            self.generator,
            (phi - self.index) % phi,
            Arc::clone(&self.dlog),
        )
    }

    /// Exponent e with chi(n) = zeta_{phi(p^m)}^e, or None when p | n.
    pub fn value_exponent(&self, n: i64) -> Option<u64> {
        let modulus = self.modulus();
        let r = n.rem_euclid(modulus as i64) as usize;
        let d = self.dlog[r];
        if d == u64::MAX {
            return None;
        }
        let phi = self.value_order();
        Some(self.index * d % phi)
    }

    /// chi(n) with the modulus-p^m convention chi(n) = 0 for p | n.
    pub fn evaluate(&self, n: i64) -> CyclotomicNumber {
        match self.value_exponent(n) {
            Some(e) => CyclotomicNumber::root_of_unity(self.value_order(), e as i64),
            None => CyclotomicNumber::zero(self.value_order()),
        }
    }

    /// Evaluation through the primitive restriction of conductor C: differs
    /// from [`evaluate`] only for the principal character (C = 1), which is
    /// identically 1 even at multiples of p.
    pub fn evaluate_primitive(&self, n: i64) -> CyclotomicNumber {
        if self.conductor == 1 {
            return CyclotomicNumber::one(self.value_order());
        }
        self.evaluate(n)
    }

    /// G(chi) = sum over u mod C of chi(u) e(u/C); 1 for the principal
    /// character.
    pub fn gauss_sum(&self) -> CyclotomicNumber {
        let c = self.conductor;
        if c == 1 {
            return CyclotomicNumber::one(1);
        }
        let phi = self.value_order();
        let order = crate::numtheory::lcm(phi, c);
        let mut acc = CycloAccumulator::new(order);
        let one = crate::rational::rat_i64(1);
        for u in 1..c {
            if let Some(e) = self.value_exponent(u as i64) {
                let exp = e * (order / phi) + u * (order / c);
                acc.add_root_multiple(exp as i64, &one);
            }
        }
        acc.finish().reduce_order()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.index == other.index
    }
}

impl Eq for DirichletCharacter {}

/// Smallest p-power modulus p^c through which the index-j character mod p^m
/// factors: chi kills 1 + p^c Z_p iff j * phi(p^c) = 0 mod phi(p^m).
fn conductor_from_index(p: u64, m: u32, index: u64) -> u64 {
    let phi = euler_phi(p.pow(m));
    for c in 0..=m {
        let sub_phi = euler_phi(p.pow(c));
        if index * sub_phi % phi == 0 {
            return p.pow(c);
        }
    }
    unreachable!("a character factors through its own modulus")
}

/// All phi(p^m) characters mod p^m, in index order; index 0 is principal.
pub fn enumerate_characters(p: u64, m: u32) -> Result<Vec<DirichletCharacter>> {
    if p == 2 || p % 2 == 0 || !crate::numtheory::is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "modulus base must be an odd prime, got {p}"
        )));
    }
    let g = primitive_root(p, m);
    let dlog = Arc::new(dlog_table(p, m, g));
    let phi = euler_phi(p.pow(m));
    Ok((0..phi)
        .map(|j| DirichletCharacter::with_table(p, m, g, j, Arc::clone(&dlog)))
        .collect())
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("DirichletCharacter", 4)?;
        s.serialize_field("p", &self.p)?;
        s.serialize_field("m", &self.m)?;
        s.serialize_field("generator", &self.generator)?;
        s.serialize_field("index", &self.index)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: u64,
            m: u32,
            generator: u64,
            index: u64,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.p % 2 == 0 || !crate::numtheory::is_prime(raw.p) {
            return Err(D::Error::custom("p must be an odd prime"));
        }
        let modulus = raw.p.pow(raw.m);
        let phi = euler_phi(modulus);
        if mod_pow(raw.generator, phi, modulus) != 1 {
            return Err(D::Error::custom("generator must be a unit"));
        }
        let dlog = Arc::new(dlog_table(raw.p, raw.m, raw.generator));
        // a true primitive root hits every unit exactly once
        let units = dlog.iter().filter(|&&d| d != u64::MAX).count() as u64;
        if units != phi {
            return Err(D::Error::custom("generator is not a primitive root"));
        }
        Ok(DirichletCharacter::with_table(
            raw.p,
            raw.m,
            raw.generator,
            raw.index,
            dlog,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_i64;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_characters(5, 1).unwrap().len(), 4);
        assert_eq!(enumerate_characters(5, 2).unwrap().len(), 20);
        assert!(enumerate_characters(2, 1).is_err());
        assert!(enumerate_characters(9, 1).is_err());
    }

    #[test]
    fn conductor_census_mod_5() {
        let chars = enumerate_characters(5, 1).unwrap();
        let cond_5 = chars.iter().filter(|c| c.conductor() == 5).count();
        let cond_1 = chars.iter().filter(|c| c.conductor() == 1).count();
        assert_eq!((cond_1, cond_5), (1, 3));
        assert_eq!(chars[0].conductor(), 1); // index 0 principal
    }

    #[test]
    fn evaluation_basics() {
        let chars = enumerate_characters(5, 1).unwrap();
        let principal = &chars[0];
        assert_eq!(
            principal.evaluate(7).to_rational().unwrap(),
            rat_i64(1)
        );
        for chi in &chars {
            assert!(chi.evaluate(10).is_zero());
        }
        // quadratic character: 2 is a non-residue mod 5
        let quad = chars.iter().find(|c| c.order() == 2).unwrap();
        assert_eq!(quad.evaluate(2).to_rational().unwrap(), rat_i64(-1));
        assert_eq!(quad.evaluate(4).to_rational().unwrap(), rat_i64(1));
    }

    #[test]
    fn multiplicativity() {
        for chi in enumerate_characters(7, 1).unwrap() {
            for u in 1..7i64 {
                for v in 1..7i64 {
                    assert_eq!(
                        chi.evaluate(u * v),
                        chi.evaluate(u).mul(&chi.evaluate(v))
                    );
                }
            }
        }
    }

    #[test]
    fn parity_matches_minus_one() {
        for chi in enumerate_characters(5, 2).unwrap() {
            let expect = if chi.parity() == 0 { 1 } else { -1 };
            assert_eq!(chi.evaluate(-1).to_rational().unwrap(), rat_i64(expect));
        }
        // an order-4 character mod 5 is odd
        let chars = enumerate_characters(5, 1).unwrap();
        let quartic = chars.iter().find(|c| c.order() == 4).unwrap();
        assert_eq!(quartic.parity(), 1);
        // quadratic character mod 5 is even with conductor 5
        let quad = chars.iter().find(|c| c.order() == 2).unwrap();
        assert_eq!((quad.conductor(), quad.parity()), (5, 0));
    }

    #[test]
    fn principal_conductor_mod_25() {
        let chars = enumerate_characters(5, 2).unwrap();
        assert_eq!(chars[0].conductor(), 1);
        assert_eq!(chars[0].gauss_sum().to_rational().unwrap(), rat_i64(1));
    }

    #[test]
    fn gauss_sum_quadratic_squares_to_5() {
        let chars = enumerate_characters(5, 1).unwrap();
        let quad = chars.iter().find(|c| c.order() == 2).unwrap();
        let g = quad.gauss_sum();
        assert_eq!(g.mul(&g).to_rational().unwrap(), rat_i64(5));
        let e = g.embed();
        assert!((e.re - 5f64.sqrt()).abs() < 1e-10 && e.im.abs() < 1e-10);
    }

    #[test]
    fn gauss_sum_product_conjugate() {
        for chi in enumerate_characters(5, 1).unwrap() {
            if chi.conductor() != 5 {
                continue;
            }
            let lhs = chi.gauss_sum().mul(&chi.conjugate().gauss_sum());
            let rhs = chi.evaluate(-1).scale(&rat_i64(5));
            assert_eq!(lhs, rhs);
            // |G(chi)|^2 = C via the conjugation action on coordinates
            let norm = chi.gauss_sum().mul(&chi.gauss_sum().conj());
            assert_eq!(norm.to_rational().unwrap(), rat_i64(5));
        }
    }

    #[test]
    fn orthogonality() {
        let p = 5u64;
        let m = 2u32;
        let modulus = p.pow(m);
        let chars = enumerate_characters(p, m).unwrap();
        for n in 1..modulus {
            if n % p == 0 {
                continue;
            }
            let mut total = CyclotomicNumber::zero(1);
            for chi in &chars {
                total = total.add(&chi.evaluate(n as i64));
            }
            let expect = if n == 1 { chars.len() as i64 } else { 0 };
            assert_eq!(total.to_rational().unwrap(), rat_i64(expect));
        }
    }

    #[test]
    fn serde_roundtrip() {
        let chi = DirichletCharacter::new(5, 2, 7).unwrap();
        let json = serde_json::to_string(&chi).unwrap();
        let back: DirichletCharacter = serde_json::from_str(&json).unwrap();
        assert_eq!(chi, back);
        assert_eq!(back.conductor(), chi.conductor());
    }
}
