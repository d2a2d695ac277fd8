use super::algebra::{Quaternion, QuaternionAlgebra};
use super::ideal::{neighbors, ReducedForm, RightIdeal};
use super::qlattice::{QLattice, RatQuaternion};
use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::linalg::{det_bareiss, Matrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A quaternion order: maximal (`level = 1`) or Eichler of prime level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderLattice {
    pub algebra: QuaternionAlgebra,
    pub lattice: QLattice,
    pub level: u64,
}

impl OrderLattice {
    /// Wrap a lattice after checking it is an order.
    pub fn new(algebra: QuaternionAlgebra, lattice: QLattice, level: u64) -> Result<Self> {
        let o = Self { algebra, lattice, level };
        if !o.is_order() {
            return Err(Error::InvalidInput("lattice is not an order".into()));
        }
        Ok(o)
    }

    pub fn is_order(&self) -> bool {
        self.lattice.contains(&Quaternion::one()) && self.lattice.mul(&self.algebra, &self.lattice) == self.lattice
    }

    /// Integral Gram matrix `[Tr(b_r conj(b_s))]`.
    pub fn gram(&self) -> Matrix<BigInt> {
        self.lattice.gram(&self.algebra).map(|x| {
            debug_assert!(x.is_integer());
            x.to_integer()
        })
    }

    /// Reduced discriminant, the square root of the Gram determinant.
    pub fn reduced_discriminant(&self) -> BigInt {
        let d = det_bareiss(&self.gram());
        let r = d.sqrt();
        debug_assert_eq!(&r * &r, d);
        r
    }

    pub fn units(&self) -> Result<Vec<RatQuaternion>> {
        units_of(&self.algebra, &self.lattice)
    }

    pub fn basis(&self) -> Vec<RatQuaternion> {
        self.lattice.basis()
    }

    pub fn contains(&self, x: &RatQuaternion) -> bool {
        self.lattice.contains(x)
    }

    /// The order itself as a right ideal.
    pub fn unit_ideal(&self) -> RightIdeal {
        RightIdeal { lattice: self.lattice.clone(), norm: BigRational::one() }
    }

    /// `q * level`.
    pub fn expected_discriminant(&self) -> u64 {
        self.algebra.q * self.level
    }
}

/// Norm-one elements of an order given as a lattice.
pub fn units_of(alg: &QuaternionAlgebra, order: &QLattice) -> Result<Vec<RatQuaternion>> {
    let rf = ReducedForm::of(order, alg)?;
    if !rf.norm.is_one() {
        return Err(Error::Internal(format!("order has lattice norm {}", rf.norm)));
    }
    Ok(rf.vectors_of_value(2)?.iter().map(|c| rf.element(order, c)).collect())
}

/// The order with basis `1, i, (i + j)/2, (1 + k)/2` in `(-1, -q)`.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<OrderLattice> {
    if alg.a != -1 || alg.b != -(alg.q as i64) || alg.q % 4 != 3 {
        return Err(Error::UnsupportedRegime("maximal order recipe needs (-1, -q) with q = 3 mod 4".into()));
    }
    let rows = [[2i64, 0, 0, 0], [0, 2, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1]];
    let gens: Vec<[BigInt; 4]> = rows.iter().map(|r| r.map(BigInt::from)).collect();
    let lattice = QLattice::from_integer_generators(&gens, BigInt::from(2))?;
    let o = OrderLattice::new(*alg, lattice, 1)?;
    if o.reduced_discriminant() != BigInt::from(alg.q) {
        return Err(Error::Internal("maximal order has the wrong discriminant".into()));
    }
    Ok(o)
}

/// `O cap O_L(J)` for the first `p`-neighbor `J` of `O`; an Eichler order of
/// level `p` for any prime `p != q`, including `p = 2`.
pub fn eichler_suborder(max_order: &OrderLattice, p: u64) -> Result<OrderLattice> {
    if max_order.level != 1 {
        return Err(Error::InvalidInput("Eichler suborder needs a maximal order".into()));
    }
    if !is_prime(p) || p == max_order.algebra.q {
        return Err(Error::InvalidInput(format!("level {p} must be a prime different from q")));
    }
    let alg = &max_order.algebra;
    let nb = neighbors(alg, &max_order.lattice, &max_order.unit_ideal(), p)?;
    let other = nb[0].left_order(alg);
    let lattice = max_order.lattice.intersect(&other);
    let o = OrderLattice::new(*alg, lattice, p)?;
    if o.reduced_discriminant() != BigInt::from(alg.q * p) {
        return Err(Error::Internal("Eichler order has the wrong discriminant".into()));
    }
    Ok(o)
}

/// Eichler order of odd prime level `p != q`.
pub fn eichler_order(max_order: &OrderLattice, p: u64) -> Result<OrderLattice> {
    if p == 2 {
        return Err(Error::UnsupportedRegime("level 2 is outside the supported regime".into()));
    }
    if p == max_order.algebra.q {
        return Err(Error::InvalidInput("level must differ from the ramified prime".into()));
    }
    eichler_suborder(max_order, p)
}

/// A two-sided integral ideal of prime reduced norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedIdeal {
    pub lattice: QLattice,
    pub prime: u64,
}

/// The two-sided ideal of norm `l` for `l` dividing the reduced discriminant:
/// `l O` plus a lift of the radical of the trace form mod `l`.
pub fn atkin_lehner_ideal(order: &OrderLattice, l: u64) -> Result<TwoSidedIdeal> {
    let disc = order.reduced_discriminant();
    if !is_prime(l) || !(&disc % l).is_zero() {
        return Err(Error::InvalidInput(format!("{l} does not divide the discriminant {disc}")));
    }
    let alg = &order.algebra;
    let g = order.gram();
    let li = l as i64;
    let lb = BigInt::from(l);
    let gm: Vec<Vec<i64>> =
        (0..4).map(|i| (0..4).map(|j| (((&g[(i, j)] % &lb) + &lb) % &lb).to_i64().unwrap()).collect()).collect();
    let kernel = kernel_mod(&gm, li);
    if kernel.len() != 2 {
        return Err(Error::Internal(format!("radical mod {l} has dimension {}", kernel.len())));
    }
    let om = order.lattice.basis_matrix();
    let mut gens: Vec<[BigInt; 4]> = (0..4).map(|r| [0, 1, 2, 3].map(|k| &om[(r, k)] * &lb)).collect();
    for v in &kernel {
        let c: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        gens.push(order.lattice.element_int(&c));
    }
    let lattice = QLattice::from_integer_generators(&gens, order.lattice.den().clone())?;
    let ideal = TwoSidedIdeal { lattice, prime: l };
    let prod_left = order.lattice.mul(alg, &ideal.lattice);
    let prod_right = ideal.lattice.mul(alg, &order.lattice);
    if prod_left != ideal.lattice || prod_right != ideal.lattice {
        return Err(Error::Internal("radical lift is not two-sided".into()));
    }
    if ideal.lattice.norm(alg) != BigRational::from_integer(lb.clone()) {
        return Err(Error::Internal("Atkin-Lehner ideal has the wrong norm".into()));
    }
    let sq = ideal.lattice.mul(alg, &ideal.lattice);
    if sq != order.lattice.scale(&BigRational::from_integer(lb)) {
        return Err(Error::Internal("square of the Atkin-Lehner ideal is not l O".into()));
    }
    Ok(ideal)
}

/// Kernel of a symmetric matrix over `F_l`, as row vectors.
fn kernel_mod(m: &[Vec<i64>], l: i64) -> Vec<Vec<i64>> {
    use crate::arith::{FieldElem, PrimeFieldElem};
    let n = m.len();
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|x| x.rem_euclid(l)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| a[r][col] != 0) else { continue };
        a.swap(row, p);
        let inv = PrimeFieldElem::new(a[row][col], l as u64).inv().unwrap().value() as i64;
        for x in a[row].iter_mut() {
            *x = (*x * inv).rem_euclid(l);
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..n {
                    a[r][c] = (a[r][c] - f * a[row][c]).rem_euclid(l);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0i64; n];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[r][f]).rem_euclid(l);
            }
            v
        })
        .collect()
}
