//! Elementary number-theoretic helpers shared across the crate.

/// Euler's totient of `n`.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Moebius function values mu(1), ..., mu(limit) by sieving.
pub fn moebius_sieve(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    let mut is_prime = vec![true; limit + 1];
    if limit >= 1 {
        mu[0] = 0;
    }
    for i in 2..=limit {
        if is_prime[i] {
            for j in (i..=limit).step_by(i) {
                if j > i {
                    is_prime[j] = false;
                }
                mu[j] = -mu[j];
            }
            let sq = i.checked_mul(i);
            if let Some(sq) = sq {
                for j in (sq..=limit).step_by(sq) {
                    mu[j] = 0;
                }
            }
        }
    }
    mu
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Modular inverse of `a` mod `n` for gcd(a, n) = 1.
pub fn mod_inverse(a: i64, n: u64) -> Option<u64> {
    let n = n as i64;
    let a = a.rem_euclid(n);
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (n, a);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(n) as u64)
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc: u128 = 1;
    let m = modulus as u128;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Trial-division primality; fine for the desk-scale moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest primitive root of `p^m` for an odd prime `p`.
///
/// (Z/p^m)^* is cyclic for odd p; a primitive root mod p that also has
/// full order mod p^2 is primitive for every power.
pub fn primitive_root(p: u64, m: u32) -> u64 {
    assert!(p % 2 == 1 && is_prime(p), "primitive_root needs an odd prime");
    let modulus = p.pow(m);
    let phi = euler_phi(modulus);
    let prime_factors = {
        let mut f = Vec::new();
        let mut n = phi;
        let mut q = 2;
        while q * q <= n {
            if n % q == 0 {
                f.push(q);
                while n % q == 0 {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            f.push(n);
        }
        f
    };
    'outer: for g in 2..modulus {
        if gcd(g, p) != 1 {
            continue;
        }
        for &q in &prime_factors {
            if mod_pow(g, phi / q, modulus) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("cyclic group has a generator")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_small() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(5), 4);
        assert_eq!(euler_phi(25), 20);
        assert_eq!(euler_phi(100), 40);
    }

    #[test]
    fn moebius_values() {
        let mu = moebius_sieve(12);
        assert_eq!(&mu[1..=12], &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5, 1), 2);
        assert_eq!(primitive_root(5, 2), 2);
        assert_eq!(primitive_root(7, 1), 3);
    }

    #[test]
    fn inverse_roundtrip() {
        for a in 1..25u64 {
            if gcd(a, 25) == 1 {
                let inv = mod_inverse(a as i64, 25).unwrap();
                assert_eq!(a * inv % 25, 1);
            }
        }
        assert_eq!(mod_inverse(5, 25), None);
    }
}
