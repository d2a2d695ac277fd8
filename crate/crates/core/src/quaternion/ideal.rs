use super::algebra::{Quaternion, QuaternionAlgebra};
use super::qlattice::{QLattice, RatQuaternion};
use crate::error::{Error, Result};
use crate::lattice::{lll_gram_integral, short_vectors, DEFAULT_ENUMERATION_LIMIT};
use crate::linalg::Matrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// A lattice together with its reduced norm (the gcd of element norms).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RightIdeal {
    pub lattice: QLattice,
    pub norm: BigRational,
}

/// LLL-reduced normalized norm form of a lattice: for reduced coordinates `c`,
/// `N(x) = norm * c^T gram c / 2` with `x = lattice.element(c * transform)`.
#[derive(Debug, Clone)]
pub struct ReducedForm {
    pub transform: Matrix<BigInt>,
    pub gram: Matrix<i64>,
    pub norm: BigRational,
}

impl ReducedForm {
    pub fn of(lattice: &QLattice, alg: &QuaternionAlgebra) -> Result<Self> {
        let (g, norm) = lattice.normalized_gram(alg);
        let (transform, gram) = lll_gram_integral(&g)?;
        Ok(Self { transform, gram, norm })
    }

    pub fn element(&self, lattice: &QLattice, c: &[i64]) -> RatQuaternion {
        let cb: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        lattice.element(&self.transform.vec_mul(&cb))
    }

    /// Reduced coordinates of vectors with `c^T G c = value`.
    pub fn vectors_of_value(&self, value: i128) -> Result<Vec<Vec<i64>>> {
        crate::lattice::vectors_of_value(&self.gram, value, DEFAULT_ENUMERATION_LIMIT)
    }

    /// Counts of `c^T G c = 2k` for `k = 1..=kmax`.
    pub fn theta(&self, kmax: usize) -> Result<Vec<usize>> {
        crate::lattice::theta_counts(&self.gram, kmax, DEFAULT_ENUMERATION_LIMIT)
    }
}

impl RightIdeal {
    pub fn new(lattice: QLattice, alg: &QuaternionAlgebra) -> Self {
        let norm = lattice.norm(alg);
        Self { lattice, norm }
    }

    pub fn conj(&self) -> QLattice {
        self.lattice.conj()
    }

    /// `I conj(I) / N(I)`.
    pub fn left_order(&self, alg: &QuaternionAlgebra) -> QLattice {
        self.lattice.mul(alg, &self.lattice.conj()).scale(&self.norm.recip())
    }

    /// `conj(I) I / N(I)`.
    pub fn right_order(&self, alg: &QuaternionAlgebra) -> QLattice {
        self.lattice.conj().mul(alg, &self.lattice).scale(&self.norm.recip())
    }

    pub fn left_mul(&self, alg: &QuaternionAlgebra, x: &RatQuaternion) -> RightIdeal {
        let n = alg.norm(x);
        RightIdeal { lattice: self.lattice.left_mul(alg, x), norm: &self.norm * n }
    }

    pub fn right_mul(&self, alg: &QuaternionAlgebra, x: &RatQuaternion) -> RightIdeal {
        let n = alg.norm(x);
        RightIdeal { lattice: self.lattice.right_mul(alg, x), norm: &self.norm * n }
    }

    pub fn reduced_form(&self, alg: &QuaternionAlgebra) -> Result<ReducedForm> {
        ReducedForm::of(&self.lattice, alg)
    }

    /// An equivalent integral ideal of small norm: `conj(b) I / N(I)` for a
    /// shortest `b` in `I`.
    pub fn small_representative(&self, alg: &QuaternionAlgebra) -> Result<RightIdeal> {
        let rf = self.reduced_form(alg)?;
        let minimum = (0..4).map(|i| rf.gram[(i, i)] as i128).min().unwrap();
        let mut best: Option<(i128, Vec<i64>)> = None;
        for (c, v) in short_vectors::<f64>(&rf.gram, minimum, DEFAULT_ENUMERATION_LIMIT)? {
            if best.as_ref().is_none_or(|(bv, bc)| v < *bv || (v == *bv && c > *bc)) {
                best = Some((v, c));
            }
        }
        let (_, c) = best.ok_or_else(|| Error::Internal("empty lattice".into()))?;
        let beta = rf.element(&self.lattice, &c);
        let alpha = beta.conj().scale(&self.norm.recip());
        Ok(self.left_mul(alg, &alpha))
    }
}

/// `alpha` with `J = alpha I` when the right ideals `J`, `I` of a common order
/// are isomorphic.
pub fn find_isomorphism(alg: &QuaternionAlgebra, j: &RightIdeal, i: &RightIdeal) -> Result<Option<RatQuaternion>> {
    let m = j.lattice.mul(alg, &i.conj());
    let rf = ReducedForm::of(&m, alg)?;
    let target = &j.norm * &i.norm * BigRational::from_integer(BigInt::from(2)) / &rf.norm;
    if !target.is_integer() {
        return Ok(None);
    }
    let value = target.to_integer().to_i128().ok_or_else(|| Error::EnumerationOverflow("target value".into()))?;
    let found = short_vectors::<f64>(&rf.gram, value, DEFAULT_ENUMERATION_LIMIT)?;
    let Some((c, _)) = found.into_iter().find(|(_, v)| *v == value) else {
        return Ok(None);
    };
    let beta = rf.element(&m, &c);
    let alpha = beta.scale(&i.norm.recip());
    if i.lattice.left_mul(alg, &alpha) != j.lattice {
        return Err(Error::Internal("isomorphism witness does not map I onto J".into()));
    }
    Ok(Some(alpha))
}

/// Arithmetic mod a small prime on coordinate vectors.
mod modp {
    pub fn reduce(v: &mut [i64], l: i64) {
        v.iter_mut().for_each(|x| *x = x.rem_euclid(l));
    }

    pub fn inv(a: i64, l: i64) -> i64 {
        use crate::arith::FieldElem;
        crate::arith::PrimeFieldElem::new(a, l as u64).inv().expect("invertible").value() as i64
    }

    /// Echelon basis of the span of `rows`.
    pub fn echelon(rows: &[Vec<i64>], l: i64) -> Vec<Vec<i64>> {
        let mut basis: Vec<Vec<i64>> = Vec::new();
        for r in rows {
            let mut v = r.clone();
            reduce(&mut v, l);
            for b in &basis {
                let piv = b.iter().position(|&x| x != 0).unwrap();
                if v[piv] != 0 {
                    let f = v[piv];
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = (*x - f * y).rem_euclid(l);
                    }
                }
            }
            if let Some(piv) = v.iter().position(|&x| x != 0) {
                let iv = inv(v[piv], l);
                v.iter_mut().for_each(|x| *x = (*x * iv).rem_euclid(l));
                for b in basis.iter_mut() {
                    if b[piv] != 0 {
                        let f = b[piv];
                        for (x, y) in b.iter_mut().zip(&v) {
                            *x = (*x - f * y).rem_euclid(l);
                        }
                    }
                }
                basis.push(v);
                basis.sort_by_key(|b| b.iter().position(|&x| x != 0));
            }
        }
        basis
    }

    pub fn in_span(basis: &[Vec<i64>], v: &[i64], l: i64) -> bool {
        let mut rows = basis.to_vec();
        rows.push(v.to_vec());
        echelon(&rows, l).len() == basis.len()
    }
}

/// Quadratic and polar forms of `N(x)/N(I)` reduced mod `l`.
struct FormModL {
    g: Vec<Vec<i64>>,
    l: i64,
}

impl FormModL {
    fn new(gram: &Matrix<BigInt>, l: u64) -> Self {
        let lb = BigInt::from(l);
        let g = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let v = if i == j { &gram[(i, i)] / 2 } else { gram[(i, j)].clone() };
                        (((v % &lb) + &lb) % &lb).to_i64().unwrap()
                    })
                    .collect()
            })
            .collect();
        Self { g, l: l as i64 }
    }

    fn q(&self, c: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..4 {
            s = (s + self.g[i][i] * c[i] % self.l * c[i]) % self.l;
            for j in i + 1..4 {
                s = (s + self.g[i][j] * c[i] % self.l * c[j]) % self.l;
            }
        }
        s.rem_euclid(self.l)
    }

    fn polar(&self, c: &[i64], d: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..4 {
            s = (s + 2 * self.g[i][i] * c[i] % self.l * d[i]) % self.l;
            for j in i + 1..4 {
                s = (s + self.g[i][j] * ((c[i] * d[j] + c[j] * d[i]) % self.l)) % self.l;
            }
        }
        s.rem_euclid(self.l)
    }
}

fn lex_vectors(l: i64) -> impl Iterator<Item = Vec<i64>> {
    let total = (l as u128).pow(4);
    (1..total).map(move |mut idx| {
        let mut v = vec![0i64; 4];
        for k in (0..4).rev() {
            v[k] = (idx % l as u128) as i64;
            idx /= l as u128;
        }
        v
    })
}

/// `x O + l I` for `x` with coordinates `c` in the basis of `I`.
fn ideal_from_vector(
    ideal: &RightIdeal,
    order: &QLattice,
    alg: &QuaternionAlgebra,
    c: &[i64],
    l: u64,
) -> Result<QLattice> {
    let cb: Vec<BigInt> = c.iter().map(|&v| BigInt::from(v)).collect();
    let x = Quaternion::new(ideal.lattice.element_int(&cb));
    let om = order.basis_matrix();
    let mut gens: Vec<[BigInt; 4]> = Vec::with_capacity(8);
    for r in 0..4 {
        let o = Quaternion::new([0, 1, 2, 3].map(|k| om[(r, k)].clone()));
        gens.push(alg.mul(&x, &o).coords);
    }
    let im = ideal.lattice.basis_matrix();
    let scale = order.den() * BigInt::from(l);
    for r in 0..4 {
        gens.push([0, 1, 2, 3].map(|k| &im[(r, k)] * &scale));
    }
    QLattice::from_integer_generators(&gens, ideal.lattice.den() * order.den())
}

/// Subspace of `I / l I` (in coordinates of the basis of `I`) cut out by `J`.
fn subspace_mod_l(ideal: &QLattice, sub: &QLattice, l: i64) -> Result<Vec<Vec<i64>>> {
    let lb = BigInt::from(l);
    let mut rows = Vec::new();
    let sm = sub.basis_matrix();
    for r in 0..4 {
        let v = [0, 1, 2, 3].map(|k| sm[(r, k)].clone());
        let c = ideal
            .coordinates_int(&v, sub.den())
            .ok_or_else(|| Error::Internal("neighbor not contained in ideal".into()))?;
        rows.push(c.iter().map(|x| (((x % &lb) + &lb) % &lb).to_i64().unwrap()).collect::<Vec<_>>());
    }
    Ok(modp::echelon(&rows, l))
}

/// The `l + 1` sub-ideals `J` of `I` with `N(J) = l N(I)` and the same right
/// order, for a prime `l` not dividing the discriminant of `order`.
///
/// Order: `J_t = (u1 + t u2) O + l I` for `t = 0..l`, then `J_inf`.
pub fn neighbors(alg: &QuaternionAlgebra, order: &QLattice, ideal: &RightIdeal, l: u64) -> Result<Vec<RightIdeal>> {
    let li = l as i64;
    let (gram, norm) = ideal.lattice.normalized_gram(alg);
    if norm != ideal.norm {
        return Err(Error::Internal("stored ideal norm is stale".into()));
    }
    let form = FormModL::new(&gram, l);
    let target_norm = &ideal.norm * BigRational::from_integer(BigInt::from(l));
    let make = |c: &[i64]| -> Result<RightIdeal> {
        let lat = ideal_from_vector(ideal, order, alg, c, l)?;
        let j = RightIdeal::new(lat, alg);
        if j.norm != target_norm {
            return Err(Error::Internal(format!("neighbor norm {} != {}", j.norm, target_norm)));
        }
        Ok(j)
    };
    let u1 = lex_vectors(li).find(|c| form.q(c) == 0).ok_or_else(|| Error::Internal("no isotropic vector".into()))?;
    let j1 = make(&u1)?;
    let s1 = subspace_mod_l(&ideal.lattice, &j1.lattice, li)?;
    if s1.len() != 2 {
        return Err(Error::Internal(format!("neighbor subspace of dimension {}", s1.len())));
    }
    let u = lex_vectors(li)
        .find(|c| form.q(c) == 0 && !modp::in_span(&s1, c, li))
        .ok_or_else(|| Error::Internal("no second isotropic line".into()))?;
    let j2 = make(&u)?;
    let s2 = subspace_mod_l(&ideal.lattice, &j2.lattice, li)?;
    let (a, b) = (form.polar(&u1, &s2[0]), form.polar(&u1, &s2[1]));
    let mut u2: Vec<i64> = (0..4).map(|k| (b * s2[0][k] - a * s2[1][k]).rem_euclid(li)).collect();
    if u2.iter().all(|&x| x == 0) {
        u2 = s2[0].clone();
    }
    let mut out = Vec::with_capacity(l as usize + 1);
    for t in 0..li {
        let v: Vec<i64> = (0..4).map(|k| (u1[k] + t * u2[k]).rem_euclid(li)).collect();
        if form.q(&v) != 0 {
            return Err(Error::Internal("pencil vector not isotropic".into()));
        }
        out.push(if t == 0 { j1.clone() } else { make(&v)? });
    }
    out.push(j2);
    Ok(out)
}

/// The default theta depth for class invariants at discriminant `disc`.
pub fn theta_depth(disc: u64) -> usize {
    (2.0 * (disc as f64).sqrt()).ceil().max(3.0) as usize
}

/// Whether `x` lies in `O_L(I)`.
pub fn stabilises(alg: &QuaternionAlgebra, ideal: &RightIdeal, x: &RatQuaternion) -> bool {
    ideal.lattice.left_mul(alg, x) == ideal.lattice
}

/// The scalar `r` as a quaternion.
pub fn rat_scalar(r: BigRational) -> RatQuaternion {
    Quaternion::scalar(r)
}

/// The integer `n` as a quaternion.
pub fn int_scalar(n: i64) -> RatQuaternion {
    Quaternion::scalar(BigRational::from_integer(BigInt::from(n)))
}
