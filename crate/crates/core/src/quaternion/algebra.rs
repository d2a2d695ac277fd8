use crate::arith::{is_prime, kronecker};
use crate::error::{Error, Result};
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Neg;

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

/// `(a, b)_v` for nonzero integers `a`, `b`.
pub fn hilbert_symbol(a: i64, b: i64, place: Place) -> Result<i8> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidInput("Hilbert symbol of zero".into()));
    }
    match place {
        Place::Infinite => Ok(if a < 0 && b < 0 { -1 } else { 1 }),
        Place::Finite(p) => {
            if !is_prime(p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            let split = |mut x: i64| {
                let mut e = 0u32;
                while x % p as i64 == 0 {
                    x /= p as i64;
                    e += 1;
                }
                (e, x)
            };
            let (alpha, u) = split(a);
            let (beta, v) = split(b);
            if p == 2 {
                let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
                let omega = |x: i64| ((x * x - 1) / 8).rem_euclid(2);
                let e = eps(u) * eps(v) + alpha as i64 * omega(v) + beta as i64 * omega(u);
                Ok(if e % 2 == 0 { 1 } else { -1 })
            } else {
                let eps = ((p - 1) / 2) as i64;
                let mut s: i8 = if (alpha as i64 * beta as i64 * eps) % 2 == 0 { 1 } else { -1 };
                if beta % 2 == 1 {
                    s *= kronecker(u, p as i64)?;
                }
                if alpha % 2 == 1 {
                    s *= kronecker(v, p as i64)?;
                }
                Ok(s)
            }
        }
    }
}

/// `B = (a, b)_Q` with basis `1, i, j, k = ij`, `i^2 = a`, `j^2 = b`, `ij = -ji`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    /// The finite ramified prime.
    pub q: u64,
}

/// The algebra ramified at `{q, inf}` for a prime `q = 3 mod 4`, as `(-1, -q)`.
pub fn build_algebra(q: u64) -> Result<QuaternionAlgebra> {
    if !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    if q % 4 != 3 {
        return Err(Error::UnsupportedRegime(format!("q = {q} is not 3 mod 4")));
    }
    if q <= 3 {
        return Err(Error::UnsupportedRegime("q = 3 has unit groups of order 12".into()));
    }
    let alg = QuaternionAlgebra { a: -1, b: -(q as i64), q };
    let ram = alg.ramified_places()?;
    if ram != vec![Place::Finite(q), Place::Infinite] {
        return Err(Error::Internal(format!("(-1, -{q}) ramified at {ram:?}")));
    }
    Ok(alg)
}

impl QuaternionAlgebra {
    /// Places where the Hilbert symbol is `-1`, finite places first.
    pub fn ramified_places(&self) -> Result<Vec<Place>> {
        let mut candidates: Vec<u64> = vec![2];
        for (p, _) in crate::arith::factorize(self.a.unsigned_abs())
            .into_iter()
            .chain(crate::arith::factorize(self.b.unsigned_abs()))
        {
            if !candidates.contains(&p) {
                candidates.push(p);
            }
        }
        candidates.sort();
        let mut out = Vec::new();
        for p in candidates {
            if hilbert_symbol(self.a, self.b, Place::Finite(p))? == -1 {
                out.push(Place::Finite(p));
            }
        }
        if hilbert_symbol(self.a, self.b, Place::Infinite)? == -1 {
            out.push(Place::Infinite);
        }
        Ok(out)
    }

    /// Diagonal of the reduced norm in the standard basis: `(1, -a, -b, ab)`.
    pub fn norm_diagonal(&self) -> [i64; 4] {
        [1, -self.a, -self.b, self.a * self.b]
    }

    pub fn mul<T>(&self, x: &Quaternion<T>, y: &Quaternion<T>) -> Quaternion<T>
    where
        T: Clone + Num + FromPrimitive,
    {
        let a = T::from_i64(self.a).unwrap();
        let b = T::from_i64(self.b).unwrap();
        let ab = a.clone() * b.clone();
        let [x0, x1, x2, x3] = x.coords.clone();
        let [y0, y1, y2, y3] = y.coords.clone();
        let z0 = x0.clone() * y0.clone() + a.clone() * x1.clone() * y1.clone() + b.clone() * x2.clone() * y2.clone()
            - ab * x3.clone() * y3.clone();
        let z1 = x0.clone() * y1.clone() + x1.clone() * y0.clone() - b.clone() * x2.clone() * y3.clone()
            + b * x3.clone() * y2.clone();
        let z2 = x0.clone() * y2.clone() + x2.clone() * y0.clone() + a.clone() * x1.clone() * y3.clone()
            - a * x3.clone() * y1.clone();
        let z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
        Quaternion { coords: [z0, z1, z2, z3] }
    }

    pub fn norm<T>(&self, x: &Quaternion<T>) -> T
    where
        T: Clone + Num + FromPrimitive,
    {
        let d = self.norm_diagonal();
        x.coords.iter().zip(d).fold(T::zero(), |acc, (c, di)| acc + T::from_i64(di).unwrap() * c.clone() * c.clone())
    }

    /// `Tr(x conj(y))`, twice the polar form of the norm.
    pub fn trace_pairing<T>(&self, x: &Quaternion<T>, y: &Quaternion<T>) -> T
    where
        T: Clone + Num + FromPrimitive,
    {
        let d = self.norm_diagonal();
        let two = T::one() + T::one();
        (0..4).fold(T::zero(), |acc, k| {
            acc + two.clone() * T::from_i64(d[k]).unwrap() * x.coords[k].clone() * y.coords[k].clone()
        })
    }

    /// Inverse of a nonzero element over a field of scalars.
    pub fn inverse<T>(&self, x: &Quaternion<T>) -> Option<Quaternion<T>>
    where
        T: Clone + Num + FromPrimitive + Neg<Output = T>,
    {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        let c = x.conj();
        Some(Quaternion { coords: c.coords.map(|v| v / n.clone()) })
    }
}

/// An element `x0 + x1 i + x2 j + x3 k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub coords: [T; 4],
}

impl<T: Clone + Num> Quaternion<T> {
    pub fn new(c: [T; 4]) -> Self {
        Self { coords: c }
    }

    pub fn scalar(s: T) -> Self {
        Self { coords: [s, T::zero(), T::zero(), T::zero()] }
    }

    pub fn one() -> Self {
        Self::scalar(T::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn trace(&self) -> T {
        self.coords[0].clone() + self.coords[0].clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { coords: self.coords.clone().map(|c| c * s.clone()) }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.coords.clone();
        for (x, y) in c.iter_mut().zip(o.coords.iter()) {
            *x = x.clone() + y.clone();
        }
        Self { coords: c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut c = self.coords.clone();
        for (x, y) in c.iter_mut().zip(o.coords.iter()) {
            *x = x.clone() - y.clone();
        }
        Self { coords: c }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Quaternion<U> {
        Quaternion { coords: [f(&self.coords[0]), f(&self.coords[1]), f(&self.coords[2]), f(&self.coords[3])] }
    }
}

impl<T: Clone + Num + Neg<Output = T>> Quaternion<T> {
    pub fn conj(&self) -> Self {
        let [a, b, c, d] = self.coords.clone();
        Self { coords: [a, -b, -c, -d] }
    }
}

impl<T: fmt::Display> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.coords;
        write!(f, "{a} + {b}i + {c}j + {d}k")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    #[test]
    fn ramification() {
        let alg = build_algebra(11).unwrap();
        assert_eq!((alg.a, alg.b), (-1, -11));
        for p in [2u64, 3, 5] {
            assert_eq!(hilbert_symbol(-1, -11, Place::Finite(p)).unwrap(), 1);
        }
        assert_eq!(hilbert_symbol(-1, -11, Place::Finite(11)).unwrap(), -1);
        assert_eq!(hilbert_symbol(-1, -11, Place::Infinite).unwrap(), -1);
        assert_eq!(build_algebra(7).unwrap().ramified_places().unwrap(), vec![Place::Finite(7), Place::Infinite]);
        assert_eq!(build_algebra(251).unwrap().ramified_places().unwrap(), vec![Place::Finite(251), Place::Infinite]);
        assert!(build_algebra(13).is_err());
        assert!(build_algebra(15).is_err());
        // Hamilton quaternions ramify at 2
        let h = QuaternionAlgebra { a: -1, b: -1, q: 2 };
        assert_eq!(h.ramified_places().unwrap(), vec![Place::Finite(2), Place::Infinite]);
    }

    #[test]
    fn hilbert_product_formula() {
        for a in [-35i64, -6, -1, 2, 3, 5, 7, 10, 21] {
            for b in [-11i64, -3, -2, 3, 6, 13, 15] {
                let mut prod = hilbert_symbol(a, b, Place::Infinite).unwrap();
                for p in crate::arith::primes_in(2, 50) {
                    prod *= hilbert_symbol(a, b, Place::Finite(p)).unwrap();
                }
                assert_eq!(prod, 1, "({a}, {b})");
            }
        }
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(x in proptest::array::uniform4(-20i64..20), y in proptest::array::uniform4(-20i64..20)) {
            let alg = build_algebra(251).unwrap();
            let (x, y) = (Quaternion::new(x), Quaternion::new(y));
            let xy = alg.mul(&x, &y);
            prop_assert_eq!(alg.norm(&xy), alg.norm(&x) * alg.norm(&y));
            prop_assert_eq!(alg.mul(&x, &x.conj()), Quaternion::scalar(alg.norm(&x)));
            let z = Quaternion::new([1i64, 2, -1, 3]);
            prop_assert_eq!(alg.mul(&alg.mul(&x, &y), &z), alg.mul(&x, &alg.mul(&y, &z)));
        }

        #[test]
        fn rational_inverse(x in proptest::array::uniform4(-9i64..9)) {
            prop_assume!(x.iter().any(|&c| c != 0));
            let alg = build_algebra(11).unwrap();
            let xq = Quaternion::new(x).map(|&c| Ratio::<i64>::from_integer(c));
            let inv = alg.inverse(&xq).unwrap();
            prop_assert_eq!(alg.mul(&xq, &inv), Quaternion::one());
        }
    }
}
