use super::{mul_mod, pow_mod};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Operations shared by the finite fields used here, so polynomial
/// arithmetic can be written once.
pub trait FieldElem:
    Clone + PartialEq + Eq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Number of elements of the field.
    fn order(&self) -> u128;
    fn random_like<R: Rng>(&self, rng: &mut R) -> Self;

    fn pow(&self, mut e: u128) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

/// An element of `F_q`, `q` an odd prime below `2^32`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeFieldElem {
    value: u64,
    modulus: u64,
}

impl PrimeFieldElem {
    pub fn new(value: i64, modulus: u64) -> Self {
        Self { value: value.rem_euclid(modulus as i64) as u64, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Representative in `(-q/2, q/2]`.
    pub fn signed(&self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }

    pub fn legendre(&self) -> i8 {
        if self.value == 0 {
            return 0;
        }
        if pow_mod(self.value, (self.modulus - 1) / 2, self.modulus) == 1 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Debug for PrimeFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for PrimeFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for PrimeFieldElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        let mut v = self.value + o.value;
        if v >= self.modulus {
            v -= self.modulus;
        }
        Self { value: v, modulus: self.modulus }
    }
}

impl Sub for PrimeFieldElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for PrimeFieldElem {
    type Output = Self;
    fn neg(self) -> Self {
        let v = if self.value == 0 { 0 } else { self.modulus - self.value };
        Self { value: v, modulus: self.modulus }
    }
}

impl Mul for PrimeFieldElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        Self { value: mul_mod(self.value, o.value, self.modulus), modulus: self.modulus }
    }
}

impl FieldElem for PrimeFieldElem {
    fn zero_like(&self) -> Self {
        Self { value: 0, modulus: self.modulus }
    }
    fn one_like(&self) -> Self {
        Self { value: 1, modulus: self.modulus }
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        Some(Self { value: pow_mod(self.value, self.modulus - 2, self.modulus), modulus: self.modulus })
    }
    fn order(&self) -> u128 {
        self.modulus as u128
    }
    fn random_like<R: Rng>(&self, rng: &mut R) -> Self {
        Self { value: rng.gen_range(0..self.modulus), modulus: self.modulus }
    }
}

/// `F_{q^2} = F_q[s] / (s^2 - n)` for the least quadratic non-residue `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadExtField {
    q: u64,
    nonresidue: u64,
}

impl QuadExtField {
    pub fn new(q: u64) -> Self {
        assert!(q > 2 && q % 2 == 1, "odd characteristic expected");
        let nonresidue = (2..q).find(|&n| pow_mod(n, (q - 1) / 2, q) == q - 1).expect("q prime");
        Self { q, nonresidue }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn elem(&self, a0: i64, a1: i64) -> QuadExtElem {
        QuadExtElem {
            a0: PrimeFieldElem::new(a0, self.q),
            a1: PrimeFieldElem::new(a1, self.q),
            nonresidue: self.nonresidue,
        }
    }

    pub fn from_base(&self, x: PrimeFieldElem) -> QuadExtElem {
        QuadExtElem { a0: x, a1: PrimeFieldElem::new(0, self.q), nonresidue: self.nonresidue }
    }

    pub fn zero(&self) -> QuadExtElem {
        self.elem(0, 0)
    }

    /// Every element of the field, in a fixed order. Intended for small `q`.
    pub fn elements(&self) -> impl Iterator<Item = QuadExtElem> + '_ {
        (0..self.q).flat_map(move |a1| (0..self.q).map(move |a0| self.elem(a0 as i64, a1 as i64)))
    }
}

/// `a0 + a1 s` with `s^2` the field's fixed non-residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadExtElem {
    pub a0: PrimeFieldElem,
    pub a1: PrimeFieldElem,
    nonresidue: u64,
}

impl QuadExtElem {
    pub fn field(&self) -> QuadExtField {
        QuadExtField { q: self.a0.modulus(), nonresidue: self.nonresidue }
    }

    /// `x -> x^q`.
    pub fn frobenius(&self) -> Self {
        Self { a0: self.a0, a1: -self.a1, nonresidue: self.nonresidue }
    }

    pub fn norm(&self) -> PrimeFieldElem {
        let n = PrimeFieldElem::new(self.nonresidue as i64, self.a0.modulus());
        self.a0 * self.a0 - n * self.a1 * self.a1
    }

    pub fn trace(&self) -> PrimeFieldElem {
        self.a0 + self.a0
    }

    pub fn is_in_base_field(&self) -> bool {
        self.a1.is_zero()
    }

    pub fn base_value(&self) -> Option<PrimeFieldElem> {
        self.is_in_base_field().then_some(self.a0)
    }
}

impl fmt::Debug for QuadExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a1.is_zero() {
            write!(f, "{}", self.a0.signed())
        } else {
            write!(f, "{}+{}s", self.a0.value(), self.a1.value())
        }
    }
}

impl Add for QuadExtElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a0: self.a0 + o.a0, a1: self.a1 + o.a1, nonresidue: self.nonresidue }
    }
}

impl Sub for QuadExtElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a0: self.a0 - o.a0, a1: self.a1 - o.a1, nonresidue: self.nonresidue }
    }
}

impl Neg for QuadExtElem {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a0: -self.a0, a1: -self.a1, nonresidue: self.nonresidue }
    }
}

impl Mul for QuadExtElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let n = PrimeFieldElem::new(self.nonresidue as i64, self.a0.modulus());
        Self {
            a0: self.a0 * o.a0 + n * self.a1 * o.a1,
            a1: self.a0 * o.a1 + self.a1 * o.a0,
            nonresidue: self.nonresidue,
        }
    }
}

impl FieldElem for QuadExtElem {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().elem(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.a1.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        let n_inv = self.norm().inv()?;
        let c = self.frobenius();
        Some(Self { a0: c.a0 * n_inv, a1: c.a1 * n_inv, nonresidue: self.nonresidue })
    }
    fn order(&self) -> u128 {
        let q = self.a0.modulus() as u128;
        q * q
    }
    fn random_like<R: Rng>(&self, rng: &mut R) -> Self {
        Self { a0: self.a0.random_like(rng), a1: self.a1.random_like(rng), nonresidue: self.nonresidue }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn prime_field_ring_axioms(a in 0i64..251, b in 0i64..251, c in 0i64..251) {
            let f = |v| PrimeFieldElem::new(v, 251);
            let (a, b, c) = (f(a), f(b), f(c));
            prop_assert_eq!((a + b) * c, a * c + b * c);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a - a, a.zero_like());
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv().unwrap(), a.one_like());
            }
        }

        #[test]
        fn quad_ext_frobenius_and_norm(a0 in 0i64..251, a1 in 0i64..251, b0 in 0i64..251, b1 in 0i64..251) {
            let k = QuadExtField::new(251);
            let x = k.elem(a0, a1);
            let y = k.elem(b0, b1);
            prop_assert_eq!(x.frobenius().frobenius(), x);
            prop_assert_eq!(x.pow(251), x.frobenius());
            prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
            if !x.is_zero() {
                prop_assert_eq!(x * x.inv().unwrap(), x.one_like());
            }
        }
    }

    #[test]
    fn signed_representatives() {
        assert_eq!(PrimeFieldElem::new(-29, 251).signed(), -29);
        assert_eq!(PrimeFieldElem::new(1728, 251).value(), 222);
        assert_eq!(PrimeFieldElem::new(1728, 251).signed(), -29);
    }

    #[test]
    fn nonresidue_choice() {
        assert_eq!(QuadExtField::new(251).nonresidue(), 2);
        assert_eq!(QuadExtField::new(11).nonresidue(), 2);
    }
}
