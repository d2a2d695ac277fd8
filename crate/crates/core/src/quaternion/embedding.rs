use super::algebra::{Quaternion, QuaternionAlgebra};
use super::classes::RightIdealClass;
use super::ideal::ReducedForm;
use super::qlattice::{QLattice, RatQuaternion};
use crate::arith::{factorize, QuadDiscriminant};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Images `x = phi((t + sqrt(-D))/2)` of optimal embeddings `O_{-D} -> R`,
/// with `t = D mod 2`.
pub fn optimal_embedding_images(
    alg: &QuaternionAlgebra,
    order: &QLattice,
    disc: &QuadDiscriminant,
) -> Result<Vec<RatQuaternion>> {
    let rf = ReducedForm::of(order, alg)?;
    if !rf.norm.is_one() {
        return Err(Error::InvalidInput("embedding target is not an order".into()));
    }
    let d = disc.d();
    let t = d % 2;
    let n = (t * t + d) / 4;
    let trace = BigRational::from_integer(BigInt::from(t));
    let conductor_primes: Vec<u64> = factorize(disc.conductor()).into_iter().map(|(l, _)| l).collect();
    let mut out = Vec::new();
    for c in rf.vectors_of_value(2 * n as i128)? {
        let x = rf.element(order, &c);
        if x.trace() != trace {
            continue;
        }
        let extends = conductor_primes.iter().any(|&l| {
            let inv_l = BigRational::new(BigInt::one(), BigInt::from(l));
            (0..l).any(|a| {
                let shifted = x.sub(&Quaternion::scalar(BigRational::from_integer(BigInt::from(a))));
                order.contains(&shifted.scale(&inv_l))
            })
        });
        if !extends {
            out.push(x);
        }
    }
    Ok(out)
}

/// `h(-D)` in `order` modulo conjugation by its units: `#images * u_D / w`.
pub fn optimal_embedding_count_in(
    alg: &QuaternionAlgebra,
    order: &QLattice,
    weight: u32,
    disc: &QuadDiscriminant,
) -> Result<u64> {
    let images = optimal_embedding_images(alg, order, disc)?.len() as u64;
    let scaled = images * disc.unit_index();
    if scaled % weight as u64 != 0 {
        return Err(Error::Internal(format!("{images} embeddings of -{} not a union of orbits", disc.d())));
    }
    Ok(scaled / weight as u64)
}

/// Optimal embeddings of `O_{-D}` into the order attached to the class,
/// its left order `I conj(I) / N(I)`.
pub fn optimal_embedding_count(alg: &QuaternionAlgebra, cls: &RightIdealClass, disc: &QuadDiscriminant) -> Result<u64> {
    optimal_embedding_count_in(alg, &cls.left_order, cls.weight, disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{class_number, kronecker};
    use crate::quaternion::{build_algebra, maximal_order, right_ideal_classes};

    // Eichler: sum_i h_i(-D) = h(-D) (1 - (-D/q)) for a maximal order.
    #[test]
    fn embedding_numbers_sum_to_class_numbers() {
        for q in [11u64, 23, 59] {
            let alg = build_algebra(q).unwrap();
            let set = right_ideal_classes(&maximal_order(&alg).unwrap()).unwrap();
            for d in [3u64, 4, 7, 8, 11, 12, 15, 16, 19, 20, 23, 24, 27, 28, 35, 36, 40, 43, 51, 52] {
                let disc = QuadDiscriminant::new(d).unwrap();
                let total: u64 = set.classes.iter().map(|c| optimal_embedding_count(&alg, c, &disc).unwrap()).sum();
                let chi = kronecker(-(d as i64), q as i64).unwrap() as i64;
                let expected = class_number(disc) as i64 * (1 - chi);
                assert_eq!(total as i64, expected, "q={q} D={d}");
            }
        }
    }
}
