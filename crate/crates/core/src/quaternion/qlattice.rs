use super::algebra::{Quaternion, QuaternionAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{hnf_rows, integer_kernel, Matrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type IntQuaternion = Quaternion<BigInt>;
pub type RatQuaternion = Quaternion<BigRational>;

/// A full-rank lattice `span(rows of basis) / den` in the standard
/// coordinates `(1, i, j, k)`. The basis is in Hermite normal form and
/// `gcd(content(basis), den) = 1`, so equality of lattices is equality of values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QLattice {
    basis: Matrix<BigInt>,
    den: BigInt,
}

fn rat_gcd(values: impl IntoIterator<Item = BigRational>) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        // gcd(a/b, c/d) = gcd(ad, cb) / bd, then reduce
        let (a, b) = (num.clone(), den.clone());
        let (c, d) = (v.numer().abs(), v.denom().clone());
        num = (a * &d).gcd(&(c * &b));
        den = b * d;
        let g = num.gcd(&den);
        if !g.is_zero() {
            num /= &g;
            den /= &g;
        }
    }
    BigRational::new(num, den)
}

impl QLattice {
    /// Lattice spanned by integer generators divided by `den`.
    pub fn from_integer_generators(gens: &[[BigInt; 4]], den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let m = Matrix::from_rows(gens.iter().map(|g| g.to_vec()).collect());
        let h = hnf_rows(&m);
        if h.rows() != 4 {
            return Err(Error::InvalidInput(format!("lattice of rank {} (4 required)", h.rows())));
        }
        Ok(Self::normalized(h, den))
    }

    fn normalized(basis: Matrix<BigInt>, den: BigInt) -> Self {
        let mut g = den.abs();
        for x in basis.entries() {
            g = g.gcd(x);
        }
        let sign = if den.is_negative() { -BigInt::one() } else { BigInt::one() };
        let basis = basis.map(|x| x / &g);
        Self { basis, den: sign * den / &g }
    }

    pub fn from_rational_generators(gens: &[RatQuaternion]) -> Result<Self> {
        let mut den = BigInt::one();
        for g in gens {
            for c in &g.coords {
                den = den.lcm(c.denom());
            }
        }
        let ints: Vec<[BigInt; 4]> = gens
            .iter()
            .map(|g| g.coords.clone().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()))
            .collect();
        Self::from_integer_generators(&ints, den)
    }

    pub fn basis_matrix(&self) -> &Matrix<BigInt> {
        &self.basis
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    fn int_row(&self, r: usize) -> [BigInt; 4] {
        let row = self.basis.row(r);
        [row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()]
    }

    pub fn basis(&self) -> Vec<RatQuaternion> {
        (0..4).map(|r| Quaternion::new(self.int_row(r).map(|c| BigRational::new(c, self.den.clone())))).collect()
    }

    /// `self * other` as the lattice spanned by products of basis elements.
    pub fn mul(&self, alg: &QuaternionAlgebra, other: &QLattice) -> QLattice {
        let mut gens = Vec::with_capacity(16);
        for r in 0..4 {
            let x = Quaternion::new(self.int_row(r));
            for s in 0..4 {
                let y = Quaternion::new(other.int_row(s));
                gens.push(alg.mul(&x, &y).coords);
            }
        }
        Self::from_integer_generators(&gens, &self.den * &other.den).expect("product of full lattices is full")
    }

    pub fn conj(&self) -> QLattice {
        let gens: Vec<[BigInt; 4]> = (0..4)
            .map(|r| {
                let [a, b, c, d] = self.int_row(r);
                [a, -b, -c, -d]
            })
            .collect();
        Self::from_integer_generators(&gens, self.den.clone()).unwrap()
    }

    pub fn scale(&self, s: &BigRational) -> QLattice {
        assert!(!s.is_zero(), "scaling by zero");
        let basis = self.basis.map(|x| x * s.numer());
        Self::from_integer_generators(
            &(0..4)
                .map(|r| {
                    let row = basis.row(r);
                    [row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()]
                })
                .collect::<Vec<_>>(),
            &self.den * s.denom(),
        )
        .unwrap()
    }

    fn element_parts(x: &RatQuaternion) -> ([BigInt; 4], BigInt) {
        let mut den = BigInt::one();
        for c in &x.coords {
            den = den.lcm(c.denom());
        }
        (x.coords.clone().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()), den)
    }

    /// `x * self`.
    pub fn left_mul(&self, alg: &QuaternionAlgebra, x: &RatQuaternion) -> QLattice {
        let (xi, xd) = Self::element_parts(x);
        let xq = Quaternion::new(xi);
        let gens: Vec<[BigInt; 4]> = (0..4).map(|r| alg.mul(&xq, &Quaternion::new(self.int_row(r))).coords).collect();
        Self::from_integer_generators(&gens, &self.den * xd).expect("x nonzero")
    }

    /// `self * x`.
    pub fn right_mul(&self, alg: &QuaternionAlgebra, x: &RatQuaternion) -> QLattice {
        let (xi, xd) = Self::element_parts(x);
        let xq = Quaternion::new(xi);
        let gens: Vec<[BigInt; 4]> = (0..4).map(|r| alg.mul(&Quaternion::new(self.int_row(r)), &xq).coords).collect();
        Self::from_integer_generators(&gens, &self.den * xd).expect("x nonzero")
    }

    /// Coordinates of `v / vden` in the basis, if it lies in the lattice.
    pub fn coordinates_int(&self, v: &[BigInt; 4], vden: &BigInt) -> Option<[BigInt; 4]> {
        // solve c * basis = v * den / vden with basis upper triangular
        let mut target: Vec<BigInt> = Vec::with_capacity(4);
        for x in v {
            let t = x * &self.den;
            if !t.is_multiple_of(vden) {
                return None;
            }
            target.push(t / vden);
        }
        let mut c: [BigInt; 4] = Default::default();
        for i in 0..4 {
            let piv = &self.basis[(i, i)];
            if !target[i].is_multiple_of(piv) {
                return None;
            }
            let ci = &target[i] / piv;
            for j in i..4 {
                target[j] = &target[j] - &ci * &self.basis[(i, j)];
            }
            c[i] = ci;
        }
        Some(c)
    }

    pub fn coordinates(&self, x: &RatQuaternion) -> Option<[BigInt; 4]> {
        let (xi, xd) = Self::element_parts(x);
        self.coordinates_int(&xi, &xd)
    }

    pub fn contains(&self, x: &RatQuaternion) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &QLattice) -> bool {
        (0..4).all(|r| self.coordinates_int(&other.int_row(r), &other.den).is_some())
    }

    /// The element with coordinates `c` in this basis.
    pub fn element(&self, c: &[BigInt]) -> RatQuaternion {
        let v = self.basis.vec_mul(c);
        Quaternion::new([0, 1, 2, 3].map(|k| BigRational::new(v[k].clone(), self.den.clone())))
    }

    /// Integer numerator of the element with coordinates `c`, over `den()`.
    pub fn element_int(&self, c: &[BigInt]) -> [BigInt; 4] {
        let v = self.basis.vec_mul(c);
        [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
    }

    pub fn sum(&self, other: &QLattice) -> QLattice {
        let den = self.den.lcm(&other.den);
        let (f1, f2) = (&den / &self.den, &den / &other.den);
        let mut gens: Vec<[BigInt; 4]> = (0..4).map(|r| self.int_row(r).map(|x| x * &f1)).collect();
        gens.extend((0..4).map(|r| other.int_row(r).map(|x| x * &f2)));
        Self::from_integer_generators(&gens, den).unwrap()
    }

    pub fn intersect(&self, other: &QLattice) -> QLattice {
        let den = self.den.lcm(&other.den);
        let (f1, f2) = (&den / &self.den, &den / &other.den);
        let a = self.basis.map(|x| x * &f1);
        let b = other.basis.map(|x| x * &f2);
        // (u, v) with u A = v B
        let m = Matrix::from_fn(4, 8, |i, j| if j < 4 { a[(j, i)].clone() } else { -b[(j - 4, i)].clone() });
        let k = integer_kernel(&m);
        let gens: Vec<[BigInt; 4]> = (0..k.rows())
            .map(|r| {
                let u = &k.row(r)[..4];
                let v = a.vec_mul(u);
                [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
            })
            .collect();
        Self::from_integer_generators(&gens, den).expect("intersection of full lattices is full")
    }

    /// Covolume relative to `Z^4` in the standard coordinates.
    pub fn covolume(&self) -> BigRational {
        let d: BigInt = (0..4).map(|i| self.basis[(i, i)].clone()).product();
        BigRational::new(d, self.den.pow(4))
    }

    /// `[Tr(b_r conj(b_s))]`.
    pub fn gram(&self, alg: &QuaternionAlgebra) -> Matrix<BigRational> {
        let d = alg.norm_diagonal();
        let den2 = &self.den * &self.den;
        Matrix::from_fn(4, 4, |r, s| {
            let mut acc = BigInt::zero();
            for (k, dk) in d.iter().enumerate() {
                acc += &self.basis[(r, k)] * &self.basis[(s, k)] * dk;
            }
            BigRational::new(acc * 2, den2.clone())
        })
    }

    /// The fractional ideal of `Q` generated by the reduced norms of elements.
    pub fn norm(&self, alg: &QuaternionAlgebra) -> BigRational {
        let g = self.gram(alg);
        let two = BigRational::from_integer(BigInt::from(2));
        let mut vals = Vec::new();
        for r in 0..4 {
            vals.push(&g[(r, r)] / &two);
            for s in r + 1..4 {
                vals.push(g[(r, s)].clone());
            }
        }
        rat_gcd(vals)
    }

    /// Gram matrix of `N(x) / norm` (so `N(x) = norm * x^T G x / 2`), integral
    /// with even diagonal.
    pub fn normalized_gram(&self, alg: &QuaternionAlgebra) -> (Matrix<BigInt>, BigRational) {
        let n = self.norm(alg);
        let g = self.gram(alg);
        let gi = g.map(|x| {
            let v = x / &n;
            debug_assert!(v.is_integer());
            v.to_integer()
        });
        (gi, n)
    }

    pub fn is_integral_over(&self, other: &QLattice) -> bool {
        other.contains_lattice(self)
    }
}

impl std::fmt::Display for QLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(1/{}) <", self.den)?;
        for r in 0..4 {
            if r > 0 {
                write!(f, ", ")?;
            }
            let row = self.basis.row(r);
            write!(f, "[{} {} {} {}]", row[0], row[1], row[2], row[3])?;
        }
        write!(f, ">")
    }
}
