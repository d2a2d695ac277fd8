use super::ideal::{find_isomorphism, neighbors, theta_depth, ReducedForm, RightIdeal};
use super::order::{units_of, OrderLattice};
use super::qlattice::{QLattice, RatQuaternion};
use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A right ideal class with the data attached to its representative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RightIdealClass {
    pub ideal: RightIdeal,
    pub right_order: QLattice,
    pub left_order: QLattice,
    /// Norm-one elements of the left order.
    pub units: Vec<RatQuaternion>,
    /// `|units / +-1|`.
    pub weight: u32,
    /// Counts of normalized norms `1..=depth` in the representative.
    pub theta: Vec<usize>,
}

impl RightIdealClass {
    pub fn new(order: &OrderLattice, ideal: RightIdeal, depth: usize) -> Result<Self> {
        let alg = &order.algebra;
        let left_order = ideal.left_order(alg);
        let units = units_of(alg, &left_order)?;
        let weight = (units.len() / 2) as u32;
        if !matches!(weight, 1..=3) {
            return Err(Error::Internal(format!("unexpected unit group of order {}", units.len())));
        }
        let theta = ideal.reduced_form(alg)?.theta(depth)?;
        Ok(Self { ideal, right_order: order.lattice.clone(), left_order, units, weight, theta })
    }

    pub fn norm(&self) -> &BigRational {
        &self.ideal.norm
    }
}

/// A complete set of right ideal class representatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSet {
    pub order: OrderLattice,
    pub classes: Vec<RightIdealClass>,
    pub neighbor_prime: u64,
    pub theta_depth: usize,
}

/// Smallest prime not dividing `2 * disc`.
pub fn default_neighbor_prime(disc: u64) -> u64 {
    (3..).find(|&l| is_prime(l) && disc % l != 0).unwrap()
}

/// `(q - 1)/24`, times `p + 1` at Eichler level `p`.
pub fn expected_mass(order: &OrderLattice) -> BigRational {
    let base = BigRational::new(BigInt::from(order.algebra.q - 1), BigInt::from(24));
    if order.level == 1 {
        base
    } else {
        base * BigInt::from(order.level + 1)
    }
}

pub fn right_ideal_classes(order: &OrderLattice) -> Result<ClassSet> {
    right_ideal_classes_with(order, None)
}

/// Class set by neighbor search from the unit ideal, stopping when the mass
/// formula is saturated.
pub fn right_ideal_classes_with(order: &OrderLattice, neighbor_prime: Option<u64>) -> Result<ClassSet> {
    let alg = &order.algebra;
    let disc = order.expected_discriminant();
    let l = neighbor_prime.unwrap_or_else(|| default_neighbor_prime(disc));
    if !is_prime(l) || disc % l == 0 || l == 2 {
        return Err(Error::InvalidInput(format!("neighbor prime {l} must be an odd prime not dividing {disc}")));
    }
    let depth = theta_depth(disc);
    let expected = expected_mass(order);
    let mut set = ClassSet { order: order.clone(), classes: Vec::new(), neighbor_prime: l, theta_depth: depth };
    set.classes.push(RightIdealClass::new(order, order.unit_ideal(), depth)?);
    let mut mass = set.mass();
    let mut next = 0;
    while mass < expected && next < set.classes.len() {
        let nb = neighbors(alg, &order.lattice, &set.classes[next].ideal, l)?;
        let candidates: Vec<(RightIdeal, Vec<usize>)> = nb
            .par_iter()
            .map(|j| {
                let small = j.small_representative(alg)?;
                let theta = small.reduced_form(alg)?.theta(depth)?;
                Ok((small, theta))
            })
            .collect::<Result<_>>()?;
        for (j, theta) in candidates {
            if mass >= expected {
                break;
            }
            if set.find_class(&j, &theta)?.is_none() {
                let cls = RightIdealClass::new(order, j, depth)?;
                mass += BigRational::new(BigInt::from(1), BigInt::from(2 * cls.weight));
                log::debug!("class {} of norm {} with weight {}", set.classes.len(), cls.ideal.norm, cls.weight);
                set.classes.push(cls);
            }
        }
        next += 1;
    }
    if mass != expected {
        return Err(Error::MassMismatch { found: mass.to_string(), expected: expected.to_string() });
    }
    Ok(set)
}

impl ClassSet {
    /// `sum 1/|units|`.
    pub fn mass(&self) -> BigRational {
        self.classes.iter().map(|c| BigRational::new(BigInt::from(1), BigInt::from(2 * c.weight))).sum()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.weight).collect()
    }

    fn find_class(&self, j: &RightIdeal, theta: &[usize]) -> Result<Option<(usize, RatQuaternion)>> {
        let alg = &self.order.algebra;
        for (k, c) in self.classes.iter().enumerate() {
            if c.theta != theta {
                continue;
            }
            if let Some(alpha) = find_isomorphism(alg, j, &c.ideal)? {
                return Ok(Some((k, alpha)));
            }
        }
        Ok(None)
    }

    /// Class index `k` and `alpha` with `J = alpha I_k`.
    pub fn identify(&self, j: &RightIdeal) -> Result<(usize, RatQuaternion)> {
        let theta = j.reduced_form(&self.order.algebra)?.theta(self.theta_depth)?;
        self.find_class(j, &theta)?.ok_or_else(|| Error::Internal("ideal matches no class".into()))
    }
}

/// `B(n)`: entry `(i, j)` counts the `n`-neighbors of `I_i` in class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtMatrix {
    pub n: u64,
    pub entries: Matrix<i64>,
}

impl BrandtMatrix {
    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.entries.rows()).map(|i| self.entries.row(i).iter().sum()).collect()
    }
}

/// Reduced forms of `I_i conj(I_j)` for `i <= j`, reused across Hecke indices.
pub struct BrandtContext<'a> {
    set: &'a ClassSet,
    forms: Vec<Vec<(ReducedForm, BigRational)>>,
}

impl<'a> BrandtContext<'a> {
    pub fn new(set: &'a ClassSet) -> Result<Self> {
        let alg = &set.order.algebra;
        let h = set.len();
        let forms = (0..h)
            .into_par_iter()
            .map(|i| {
                (i..h)
                    .map(|j| {
                        let m = set.classes[i].ideal.lattice.mul(alg, &set.classes[j].ideal.conj());
                        let rf = ReducedForm::of(&m, alg)?;
                        // value of c^T G c for norm n N_i N_j is n times this
                        let unit = &set.classes[i].ideal.norm * &set.classes[j].ideal.norm * BigInt::from(2) / &rf.norm;
                        Ok((rf, unit))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { set, forms })
    }

    /// `#{b in I_i conj(I_j) : N(b) = n N(I_i) N(I_j)}`.
    fn count(&self, i: usize, j: usize, n: u64) -> Result<i64> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let (rf, unit) = &self.forms[a][b - a];
        let target = unit * BigInt::from(n);
        if !target.is_integer() {
            return Ok(0);
        }
        let value = target.to_integer().to_i128().ok_or_else(|| Error::EnumerationOverflow("Brandt target".into()))?;
        Ok(rf.vectors_of_value(value)?.len() as i64)
    }

    pub fn matrix(&self, n: u64) -> Result<BrandtMatrix> {
        let disc = self.set.order.expected_discriminant();
        if n == 0 || n.gcd(&disc) != 1 {
            return Err(Error::InvalidInput(format!("Hecke index {n} not coprime to {disc}")));
        }
        let h = self.set.len();
        let counts: Vec<Vec<i64>> = (0..h)
            .into_par_iter()
            .map(|i| (0..h).map(|j| if j < i { Ok(0) } else { self.count(i, j, n) }).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut entries = Matrix::<i64>::zeros(h, h);
        for i in 0..h {
            for j in 0..h {
                let c = if j >= i { counts[i][j] } else { counts[j][i] };
                let units = 2 * self.set.classes[j].weight as i64;
                if c % units != 0 {
                    return Err(Error::Internal(format!("count {c} not divisible by {units}")));
                }
                entries[(i, j)] = c / units;
            }
        }
        Ok(BrandtMatrix { n, entries })
    }
}

pub fn brandt_matrix(set: &ClassSet, n: u64) -> Result<BrandtMatrix> {
    BrandtContext::new(set)?.matrix(n)
}

/// `sigma(n)`, the common row sum of `B(n)` for `n` coprime to the level.
pub fn divisor_sum(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{build_algebra, eichler_suborder, maximal_order};

    fn classes(q: u64) -> ClassSet {
        let alg = build_algebra(q).unwrap();
        right_ideal_classes(&maximal_order(&alg).unwrap()).unwrap()
    }

    #[test]
    fn small_class_sets() {
        let mut w = classes(11).weights();
        w.sort();
        assert_eq!(w, vec![2, 3]);
        let mut w = classes(23).weights();
        w.sort();
        assert_eq!(w, vec![1, 2, 3]);
    }

    #[test]
    fn eichler_level_two() {
        let alg = build_algebra(11).unwrap();
        let e = eichler_suborder(&maximal_order(&alg).unwrap(), 2).unwrap();
        let set = right_ideal_classes(&e).unwrap();
        let mut w = set.weights();
        w.sort();
        assert_eq!(w, vec![1, 1, 2]);
    }

    #[test]
    fn brandt_rows_and_hecke_relations() {
        let set = classes(59);
        let ctx = BrandtContext::new(&set).unwrap();
        let b2 = ctx.matrix(2).unwrap();
        let b3 = ctx.matrix(3).unwrap();
        let b6 = ctx.matrix(6).unwrap();
        let b4 = ctx.matrix(4).unwrap();
        for b in [&b2, &b3, &b6, &b4] {
            assert!(b.row_sums().iter().all(|&s| s as u64 == divisor_sum(b.n)));
        }
        assert_eq!(b2.entries.mul_mat(&b3.entries), b6.entries);
        assert_eq!(b2.entries.mul_mat(&b3.entries), b3.entries.mul_mat(&b2.entries));
        // T_2^2 = T_4 + 2
        let mut t = b2.entries.mul_mat(&b2.entries);
        for i in 0..set.len() {
            t[(i, i)] -= 2;
        }
        assert_eq!(t, b4.entries);
        let w = set.weights();
        for i in 0..set.len() {
            for j in 0..set.len() {
                assert_eq!(b3.entries[(i, j)] * w[j] as i64, b3.entries[(j, i)] * w[i] as i64);
            }
        }
        assert!(ctx.matrix(59).is_err());
    }

    #[test]
    fn identify_recovers_generator() {
        let set = classes(23);
        let alg = &set.order.algebra;
        for c in &set.classes {
            let x = crate::quaternion::Quaternion::new([1i64, 2, 0, 1])
                .map(|&v| BigRational::from_integer(BigInt::from(v)));
            let j = c.ideal.left_mul(alg, &x);
            let (k, alpha) = set.identify(&j).unwrap();
            assert_eq!(c.ideal.lattice, set.classes[k].ideal.lattice);
            assert_eq!(set.classes[k].ideal.left_mul(alg, &alpha).lattice, j.lattice);
        }
    }
}
