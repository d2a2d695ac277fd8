//! Reduction and short-vector enumeration for positive definite integral
//! quadratic forms of small rank.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Default cap on the number of vectors a single enumeration may return.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 2_000_000;

/// Gram-Schmidt data `(mu, B)` of a Gram matrix.
fn gram_schmidt(g: &Matrix<BigRational>) -> (Matrix<BigRational>, Vec<BigRational>) {
    let n = g.rows();
    let mut mu = Matrix::<BigRational>::zeros(n, n);
    let mut b = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[(i, j)].clone();
            for l in 0..j {
                s -= &mu[(j, l)] * &mu[(i, l)] * &b[l];
            }
            mu[(i, j)] = s / &b[j];
        }
        let mut s = g[(i, i)].clone();
        for l in 0..i {
            s -= &mu[(i, l)] * &mu[(i, l)] * &b[l];
        }
        b[i] = s;
    }
    (mu, b)
}

/// `b_k -= r b_j` applied to the transform rows and to the Gram matrix.
fn sub_row(g: &mut Matrix<BigRational>, t: &mut Matrix<BigInt>, k: usize, j: usize, r: &BigInt) {
    let n = g.rows();
    let rq = BigRational::from_integer(r.clone());
    for c in 0..n {
        let v = &t[(k, c)] - r * &t[(j, c)];
        t[(k, c)] = v;
    }
    // G' = E G E^T with E = I - r e_k e_j^T
    let gkj = g[(k, j)].clone();
    let gjj = g[(j, j)].clone();
    let gkk = g[(k, k)].clone();
    for c in 0..n {
        if c != k {
            let v = &g[(k, c)] - &rq * &g[(j, c)];
            g[(k, c)] = v.clone();
            g[(c, k)] = v;
        }
    }
    g[(k, k)] = gkk - BigRational::from_integer(BigInt::from(2)) * &rq * gkj + &rq * &rq * gjj;
}

/// LLL reduction of a positive definite Gram matrix with `delta = 3/4`.
///
/// Returns `(T, G')` with `G' = T G T^T`, `T` unimodular; rows of `T` give the
/// reduced basis in terms of the input basis.
pub fn lll_gram(g: &Matrix<BigRational>) -> (Matrix<BigInt>, Matrix<BigRational>) {
    let n = g.rows();
    let mut g = g.clone();
    let mut t = Matrix::<BigInt>::identity(n);
    if n <= 1 {
        return (t, g);
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k = 1;
    while k < n {
        let (mu, _) = gram_schmidt(&g);
        let mut mu_k: Vec<BigRational> = (0..k).map(|j| mu[(k, j)].clone()).collect();
        for j in (0..k).rev() {
            if mu_k[j].abs() > half {
                let r = mu_k[j].round().to_integer();
                sub_row(&mut g, &mut t, k, j, &r);
                let rq = BigRational::from_integer(r);
                for (l, m) in mu_k.iter_mut().enumerate().take(j) {
                    *m -= &rq * &mu[(j, l)];
                }
                mu_k[j] -= rq;
            }
        }
        let (mu, b) = gram_schmidt(&g);
        let m = &mu[(k, k - 1)];
        if b[k] < (&delta - m * m) * &b[k - 1] {
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            t.swap_rows(k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    (t, g)
}

/// LLL on an integral Gram matrix, returning an `i64` reduced Gram matrix.
pub fn lll_gram_integral(g: &Matrix<BigInt>) -> Result<(Matrix<BigInt>, Matrix<i64>)> {
    let gq = g.map(|x| BigRational::from_integer(x.clone()));
    let (t, red) = lll_gram(&gq);
    let mut out = Matrix::<i64>::zeros(red.rows(), red.cols());
    for i in 0..red.rows() {
        for j in 0..red.cols() {
            let v = &red[(i, j)];
            if !v.is_integer() {
                return Err(Error::Internal("reduced Gram matrix not integral".into()));
            }
            out[(i, j)] = v
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::EnumerationOverflow("reduced Gram entry exceeds i64".into()))?;
        }
    }
    Ok((t, out))
}

/// Cholesky-type decomposition `Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`.
pub fn quadratic_completion<F: Float + FromPrimitive>(g: &Matrix<i64>) -> Result<Matrix<F>> {
    let n = g.rows();
    let mut q = g.map(|&x| F::from_i64(x).expect("i64 fits a float"));
    for i in 0..n {
        if q[(i, i)] <= F::zero() {
            return Err(Error::InvalidInput("Gram matrix not positive definite".into()));
        }
        for j in i + 1..n {
            q[(j, i)] = q[(i, j)];
            q[(i, j)] = q[(i, j)] / q[(i, i)];
        }
        for k in i + 1..n {
            for l in k..n {
                q[(k, l)] = q[(k, l)] - q[(k, i)] * q[(i, l)];
            }
        }
    }
    Ok(q)
}

fn exact_value(g: &Matrix<i64>, x: &[i64]) -> i128 {
    let n = g.rows();
    let mut s: i128 = 0;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        let mut r: i128 = 0;
        for j in 0..n {
            r += g[(i, j)] as i128 * x[j] as i128;
        }
        s += x[i] as i128 * r;
    }
    s
}

/// All nonzero `x` with `x^T G x <= bound`, both signs included, with exact
/// values. Floating point only steers the search; values are recomputed exactly.
pub fn short_vectors<F: Float + FromPrimitive>(
    g: &Matrix<i64>,
    bound: i128,
    limit: usize,
) -> Result<Vec<(Vec<i64>, i128)>> {
    let n = g.rows();
    let mut out = Vec::new();
    if n == 0 || bound <= 0 {
        return Ok(out);
    }
    let q = quadratic_completion::<F>(g)?;
    let c = F::from_i128(bound).unwrap();
    let slack = c * F::from_f64(1e-9).unwrap() + F::from_f64(1e-6).unwrap();
    let mut x = vec![0i64; n];
    enumerate_level::<F>(&q, g, n - 1, c + slack, &mut x, bound, limit, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level<F: Float + FromPrimitive>(
    q: &Matrix<F>,
    g: &Matrix<i64>,
    i: usize,
    remaining: F,
    x: &mut Vec<i64>,
    bound: i128,
    limit: usize,
    out: &mut Vec<(Vec<i64>, i128)>,
) -> Result<()> {
    let n = g.rows();
    let mut center = F::zero();
    for j in i + 1..n {
        center = center - q[(i, j)] * F::from_i64(x[j]).unwrap();
    }
    let radius = (remaining.max(F::zero()) / q[(i, i)]).sqrt();
    let lo = (center - radius).ceil().to_i64().unwrap();
    let hi = (center + radius).floor().to_i64().unwrap();
    for v in lo..=hi {
        x[i] = v;
        let d = F::from_i64(v).unwrap() - center;
        let rest = remaining - q[(i, i)] * d * d;
        if i == 0 {
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            let val = exact_value(g, x);
            if val <= bound {
                if out.len() >= limit {
                    return Err(Error::EnumerationOverflow(format!("more than {limit} vectors below {bound}")));
                }
                out.push((x.clone(), val));
            }
        } else {
            enumerate_level(q, g, i - 1, rest, x, bound, limit, out)?;
        }
    }
    x[i] = 0;
    Ok(())
}

/// Vectors with `x^T G x` exactly `value`.
pub fn vectors_of_value(g: &Matrix<i64>, value: i128, limit: usize) -> Result<Vec<Vec<i64>>> {
    Ok(short_vectors::<f64>(g, value, limit)?.into_iter().filter(|(_, v)| *v == value).map(|(x, _)| x).collect())
}

/// Counts of vectors with `x^T G x = 2k` for `k = 1..=max_k`.
pub fn theta_counts(g: &Matrix<i64>, max_k: usize, limit: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; max_k];
    for (_, v) in short_vectors::<f64>(g, 2 * max_k as i128, limit)? {
        if v % 2 == 0 && v > 0 {
            counts[(v / 2 - 1) as usize] += 1;
        }
    }
    Ok(counts)
}

/// Apply the transform `T` (rows are new basis vectors in old coordinates) to
/// a coordinate vector in the reduced basis, returning old coordinates.
pub fn lift_coordinates(t: &Matrix<BigInt>, x: &[i64]) -> Vec<BigInt> {
    let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
    t.vec_mul(&xb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(g: &Matrix<i64>, bound: i128, box_size: i64) -> usize {
        let n = g.rows();
        let mut count = 0;
        let side = (2 * box_size + 1) as usize;
        let total = side.pow(n as u32);
        for idx in 0..total {
            let mut r = idx;
            let x: Vec<i64> = (0..n)
                .map(|_| {
                    let v = (r % side) as i64 - box_size;
                    r /= side;
                    v
                })
                .collect();
            if x.iter().any(|&v| v != 0) && exact_value(g, &x) <= bound {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn d4_root_count() {
        // D4 root lattice: 24 vectors of norm 2
        let g =
            Matrix::from_rows(vec![vec![2i64, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]);
        assert_eq!(theta_counts(&g, 2, 1000).unwrap(), vec![24, 24]);
    }

    #[test]
    fn lll_preserves_form() {
        let g = Matrix::from_rows(vec![
            vec![BigInt::from(1_000_001), BigInt::from(1_000_000)],
            vec![BigInt::from(1_000_000), BigInt::from(1_000_001)],
        ]);
        let (t, red) = lll_gram_integral(&g).unwrap();
        assert!(red[(0, 0)] <= 2 && red[(1, 1)] <= 2_000_002);
        let back = t.mul_mat(&g).mul_mat(&t.transpose());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(back[(i, j)], BigInt::from(red[(i, j)]));
            }
        }
    }

    #[test]
    fn overflow_guard() {
        let g = Matrix::<i64>::identity(4);
        assert!(short_vectors::<f64>(&g, 100, 10).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn enumeration_matches_brute_force(a in 1i64..6, b in -2i64..3, c in 2i64..6, d in -1i64..2, e in 3i64..7) {
            let g = Matrix::from_rows(vec![vec![2 * a + 2, b, d], vec![b, 2 * c + 2, 1], vec![d, 1, 2 * e]]);
            prop_assume!(det_positive(&g));
            let bound = 30;
            let found = short_vectors::<f64>(&g, bound, 100_000).unwrap();
            for (x, v) in &found {
                prop_assert_eq!(*v, exact_value(&g, x));
            }
            prop_assert_eq!(found.len(), brute(&g, bound, 8));
        }
    }

    fn det_positive(g: &Matrix<i64>) -> bool {
        let m = g.map(|&x| BigInt::from(x));
        (1..=g.rows()).all(|k| {
            let minor = Matrix::from_fn(k, k, |i, j| m[(i, j)].clone());
            crate::linalg::det_bareiss(&minor) > BigInt::zero()
        })
    }
}
