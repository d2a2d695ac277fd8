//! Exact arithmetic: Kronecker symbols, imaginary quadratic discriminants and
//! their class numbers, finite fields of order `q` and `q^2`, polynomials over
//! them, and the supersingular polynomial.

mod field;
mod poly;
mod supersingular;

pub use field::{FieldElem, PrimeFieldElem, QuadExtElem, QuadExtField};
pub use poly::{poly_roots_in_fq2, roots_with_multiplicity, Poly, DEFAULT_ROOT_SEED};
pub use supersingular::{
    supersingular_count, supersingular_polynomial, supersingular_polynomial_seeded, SupersingularPolynomial,
};

use crate::error::{Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Default upper bound on `D` for class numbers computed by reduced-form enumeration.
pub const DEFAULT_CLASS_NUMBER_BOUND: u64 = 10_000_000;

/// Full Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if n == 0 {
        return Err(Error::InvalidInput("kronecker symbol with n = 0".into()));
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut sign: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    // factor out powers of two from n
    let tab2 = |a: i128| -> i8 {
        match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    };
    if n % 2 == 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        while n % 2 == 0 {
            n /= 2;
            sign *= tab2(a);
        }
    }
    // n odd positive: Jacobi symbol
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Primes in `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Prime factorisation as `(prime, exponent)` pairs, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A negative discriminant `-D = -d c^2` with `-d` fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadDiscriminant {
    d_abs: u64,
    fundamental: u64,
    conductor: u64,
}

impl QuadDiscriminant {
    /// `d_abs` is `D`, i.e. the discriminant is `-D`.
    pub fn new(d_abs: u64) -> Result<Self> {
        if d_abs == 0 || !matches!(d_abs % 4, 0 | 3) {
            return Err(Error::InvalidInput(format!("-{d_abs} is not a quadratic discriminant")));
        }
        let mut square = 1u64;
        let mut kernel = 1u64;
        for (p, e) in factorize(d_abs) {
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                kernel *= p;
            }
        }
        let (fundamental, conductor) = if kernel % 4 == 3 {
            (kernel, square)
        } else {
            debug_assert!(square % 2 == 0);
            (4 * kernel, square / 2)
        };
        Ok(Self { d_abs, fundamental, conductor })
    }

    /// `D` (the discriminant is `-D`).
    pub fn d(&self) -> u64 {
        self.d_abs
    }

    /// `d` with `-d` the fundamental discriminant.
    pub fn fundamental(&self) -> u64 {
        self.fundamental
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// The discriminant itself, a negative integer.
    pub fn value(&self) -> i64 {
        -(self.d_abs as i64)
    }

    /// `|O^* / ±1|` for the order of this discriminant.
    pub fn unit_index(&self) -> u64 {
        match self.d_abs {
            3 => 3,
            4 => 2,
            _ => 1,
        }
    }

    /// Kronecker symbol `(-D / n)`, telling how `n` decomposes in the order.
    pub fn splitting(&self, n: u64) -> i8 {
        kronecker(self.value(), n as i64).expect("n > 0")
    }
}

/// Number of classes of primitive positive definite forms of discriminant
/// `-D`, found by listing reduced forms `|b| <= a <= c`.
pub fn class_number(disc: QuadDiscriminant) -> u64 {
    class_number_bounded(disc, DEFAULT_CLASS_NUMBER_BOUND).expect("within default bound")
}

pub fn class_number_bounded(disc: QuadDiscriminant, bound: u64) -> Result<u64> {
    let d = disc.d();
    if d > bound {
        return Err(Error::EnumerationOverflow(format!("D = {d} exceeds class number bound {bound}")));
    }
    let mut h = 0u64;
    let mut a = 1u64;
    // reduced forms satisfy 3a^2 <= D
    while 3 * a * a <= d {
        let b_start = if d % 2 == 1 { 1i64 } else { 0 };
        let mut b = b_start;
        while b <= a as i64 {
            let num = (b * b) as u64 + d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && (b as u64).gcd(&a).gcd(&c) == 1 {
                    // (a, b, c) and (a, -b, c) are distinct reduced forms unless
                    // b = 0, |b| = a or a = c
                    if b == 0 || b as u64 == a || a == c {
                        h += 1;
                    } else {
                        h += 2;
                    }
                }
            }
            b += 2;
        }
        a += 1;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(251, 137).unwrap(), -1);
        assert_eq!(kronecker(-7, 137).unwrap(), 1);
        assert_eq!(kronecker(-267, 137).unwrap(), 1);
        assert_eq!(kronecker(137, 251).unwrap(), -1);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1).unwrap(), 1);
        }
        assert!(kronecker(3, 0).is_err());
        assert_eq!(kronecker(-4, 5).unwrap(), 1);
        assert_eq!(kronecker(-4, 7).unwrap(), -1);
        assert_eq!(kronecker(5, 2).unwrap(), -1);
        assert_eq!(kronecker(7, 2).unwrap(), 1);
        assert_eq!(kronecker(3, -1).unwrap(), 1);
        assert_eq!(kronecker(-3, -1).unwrap(), -1);
    }

    #[test]
    fn discriminant_decomposition() {
        let d = QuadDiscriminant::new(28).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (7, 2));
        let d = QuadDiscriminant::new(36).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (4, 3));
        let d = QuadDiscriminant::new(267).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (267, 1));
        let d = QuadDiscriminant::new(16).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (4, 2));
        assert!(QuadDiscriminant::new(5).is_err());
        assert!(QuadDiscriminant::new(0).is_err());
    }

    #[test]
    fn small_class_numbers() {
        let h = |d| class_number(QuadDiscriminant::new(d).unwrap());
        assert_eq!(h(3), 1);
        assert_eq!(h(4), 1);
        assert_eq!(h(28), 1);
        assert_eq!(h(36), 2);
        assert_eq!(h(163), 1);
        assert_eq!(h(251), 7);
        assert_eq!(h(267), 2);
        assert_eq!(h(23), 3);
    }

    #[test]
    fn class_number_bound_enforced() {
        let d = QuadDiscriminant::new(1_000_003).unwrap();
        assert!(class_number_bounded(d, 1000).is_err());
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }
}
