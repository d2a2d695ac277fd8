use super::Matrix;
use num_integer::Integer;
use num_traits::Signed;

/// `a mod m` in `[0, |m|)`.
fn reduce<T: Integer + Signed + Clone>(a: &T, m: &T) -> T {
    a.mod_floor(&m.abs())
}

/// Insert `v` into the triangular basis `basis` (row `k` has pivot in column `k`
/// or is zero). With `modulus = Some(d)` every entry is reduced mod `d`, which
/// is sound when `d Z^n` is contained in the lattice.
fn insert<T: Integer + Signed + Clone>(basis: &mut [Vec<T>], mut v: Vec<T>, modulus: Option<&T>) {
    let n = v.len();
    for k in 0..n {
        if let Some(d) = modulus {
            for x in v.iter_mut().skip(k) {
                *x = reduce(x, d);
            }
        }
        if v[k].is_zero() {
            continue;
        }
        if basis[k][k].is_zero() {
            if v[k].is_negative() {
                v.iter_mut().for_each(|x| *x = -x.clone());
            }
            basis[k] = v;
            return;
        }
        let a = basis[k][k].clone();
        let b = v[k].clone();
        let eg = a.extended_gcd(&b);
        let (g, s, t) = (eg.gcd, eg.x, eg.y);
        let (ag, bg) = (a / g.clone(), b / g.clone());
        let row = basis[k].clone();
        let new_row: Vec<T> = (0..n).map(|j| s.clone() * row[j].clone() + t.clone() * v[j].clone()).collect();
        v = (0..n).map(|j| ag.clone() * v[j].clone() - bg.clone() * row[j].clone()).collect();
        basis[k] = new_row;
        if basis[k][k].is_negative() {
            basis[k].iter_mut().for_each(|x| *x = -x.clone());
        }
        if let Some(d) = modulus {
            for x in basis[k].iter_mut().skip(k + 1) {
                *x = reduce(x, d);
            }
        }
    }
}

/// Hermite normal form of the lattice spanned by the rows of `gens`.
///
/// Returns the nonzero rows of the canonical upper-triangular basis: positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hnf_rows<T: Integer + Signed + Clone>(gens: &Matrix<T>) -> Matrix<T> {
    let n = gens.cols();
    let mut basis: Vec<Vec<T>> = vec![vec![T::zero(); n]; n];
    let mut modulus: Option<T> = None;
    for r in 0..gens.rows() {
        insert(&mut basis, gens.row(r).to_vec(), modulus.as_ref());
        if modulus.is_none() && (0..n).all(|k| !basis[k][k].is_zero()) {
            // full rank: the determinant times Z^n lies in the lattice
            let d = (0..n).fold(T::one(), |acc, k| acc * basis[k][k].clone());
            for k in 0..n {
                for x in basis[k].iter_mut().skip(k + 1) {
                    *x = reduce(x, &d);
                }
            }
            modulus = Some(d);
        }
    }
    for j in 0..n {
        let p = basis[j][j].clone();
        if p.is_zero() {
            continue;
        }
        for i in 0..j {
            let f = basis[i][j].div_floor(&p);
            if !f.is_zero() {
                let pivot_row = basis[j].clone();
                for (x, y) in basis[i].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * y;
                }
            }
        }
    }
    let rows: Vec<Vec<T>> = (0..n).filter(|&k| !basis[k][k].is_zero()).map(|k| basis[k].clone()).collect();
    if rows.is_empty() {
        return Matrix::zeros(0, n);
    }
    Matrix::from_rows(rows)
}

/// Row echelon form `U A = E` by unimodular row operations.
/// Returns `(E, U, rank)`; rows `rank..` of `E` are zero.
pub fn echelon_with_transform<T: Integer + Signed + Clone>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>, usize) {
    let (m, n) = (a.rows(), a.cols());
    let mut e = a.clone();
    let mut u = Matrix::<T>::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero entry at or below row r
            let piv = (r..m).filter(|&i| !e[(i, c)].is_zero()).min_by(|&i, &j| e[(i, c)].abs().cmp(&e[(j, c)].abs()));
            let Some(piv) = piv else { break };
            e.swap_rows(r, piv);
            u.swap_rows(r, piv);
            let mut done = true;
            for i in r + 1..m {
                if e[(i, c)].is_zero() {
                    continue;
                }
                let f = e[(i, c)].div_floor(&e[(r, c)]);
                row_axpy(&mut e, i, r, &f);
                row_axpy(&mut u, i, r, &f);
                if !e[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                r += 1;
                break;
            }
        }
    }
    (e, u, r)
}

/// `row_i -= f * row_r`.
fn row_axpy<T: Integer + Clone>(m: &mut Matrix<T>, i: usize, r: usize, f: &T) {
    for j in 0..m.cols() {
        let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
        m[(i, j)] = v;
    }
}

/// Basis (as rows) of `{x in Z^n : A x = 0}` for an `m x n` matrix `A`.
pub fn integer_kernel<T: Integer + Signed + Clone>(a: &Matrix<T>) -> Matrix<T> {
    let at = a.transpose();
    let (_, u, rank) = echelon_with_transform(&at);
    let n = a.cols();
    let rows: Vec<Vec<T>> = (rank..n).map(|i| u.row(i).to_vec()).collect();
    if rows.is_empty() {
        return Matrix::zeros(0, n);
    }
    hnf_rows(&Matrix::from_rows(rows))
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det_bareiss<T: Integer + Signed + Clone>(a: &Matrix<T>) -> T {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return T::one();
    }
    let mut m = a.clone();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return T::zero();
            };
            m.swap_rows(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m[(i, j)].clone() * m[(k, k)].clone() - m[(i, k)].clone() * m[(k, j)].clone()) / prev.clone();
                m[(i, j)] = v;
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn brute_det(m: &Matrix<i64>) -> i64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        (0..n)
            .map(|j| {
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[(0, j)] * brute_det(&minor)
            })
            .sum()
    }

    #[test]
    fn hnf_is_canonical() {
        let g = Matrix::from_rows(vec![vec![2i64, 4, 6], vec![0, 3, 9], vec![1, 1, 1], vec![4, 8, 12]]);
        let h = hnf_rows(&g);
        assert_eq!(h.rows(), 3);
        for i in 0..3 {
            assert!(h[(i, i)] > 0);
            for k in 0..i {
                assert_eq!(h[(i, k)], 0);
                assert!(h[(k, i)] >= 0 && h[(k, i)] < h[(i, i)]);
            }
        }
        let permuted =
            Matrix::from_rows(vec![g.row(2).to_vec(), g.row(0).to_vec(), g.row(3).to_vec(), g.row(1).to_vec()]);
        assert_eq!(hnf_rows(&permuted), h);
    }

    #[test]
    fn kernel_annihilates() {
        let a = Matrix::from_rows(vec![vec![1i64, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let k = integer_kernel(&a);
        assert_eq!(k.rows(), 2);
        for r in 0..k.rows() {
            assert!(a.mul_vec(k.row(r)).iter().all(|&x| x == 0));
        }
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(entries in proptest::collection::vec(-9i64..10, 16)) {
            let m = Matrix::from_fn(4, 4, |i, j| entries[4 * i + j]);
            prop_assert_eq!(det_bareiss(&m), brute_det(&m));
        }

        #[test]
        fn hnf_preserves_index(entries in proptest::collection::vec(-20i64..21, 24)) {
            let g = Matrix::from_fn(6, 4, |i, j| BigInt::from(entries[4 * i + j]));
            let h = hnf_rows(&g);
            // every generator is an integer combination of the HNF rows
            for r in 0..g.rows() {
                let mut v = g.row(r).to_vec();
                for k in 0..h.rows() {
                    let piv = (0..4).find(|&c| h[(k, c)] != BigInt::from(0)).unwrap();
                    let f = &v[piv] / &h[(k, piv)];
                    prop_assert_eq!(&f * &h[(k, piv)], v[piv].clone());
                    for c in 0..4 {
                        v[c] = &v[c] - &f * &h[(k, c)];
                    }
                }
                prop_assert!(v.iter().all(|x| *x == BigInt::from(0)));
            }
        }
    }
}
