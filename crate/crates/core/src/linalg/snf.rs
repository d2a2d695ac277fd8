use super::Matrix;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmithForm<T> {
    /// Diagonal of `D`, length `min(rows, cols)`; zeros trail.
    pub diagonal: Vec<T>,
    pub rank: usize,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Integer + Signed + Clone> SmithForm<T> {
    /// Invariant factors different from 1 (the torsion of the cokernel).
    pub fn torsion_factors(&self) -> Vec<T> {
        self.diagonal[..self.rank].iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Rank of the free part of the cokernel `Z^rows / A Z^cols`.
    pub fn cokernel_free_rank(&self) -> usize {
        self.u.rows() - self.rank
    }

    /// Order of the torsion part of the cokernel.
    pub fn torsion_order(&self) -> T {
        self.diagonal[..self.rank].iter().fold(T::one(), |acc, d| acc * d.clone())
    }

    /// Whether `b` lies in the column span `A Z^cols`.
    pub fn in_image(&self, b: &[T]) -> bool
    where
        T: Zero,
    {
        let c = self.u.mul_vec(b);
        c.iter().enumerate().all(
            |(i, ci)| {
                if i < self.rank {
                    ci.mod_floor(&self.diagonal[i]).is_zero()
                } else {
                    ci.is_zero()
                }
            },
        )
    }
}

/// Smith normal form with both transforms, pivoting on the entry of least
/// absolute value.
pub fn smith_normal_form<T: Integer + Signed + Clone>(a: &Matrix<T>) -> SmithForm<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::<T>::identity(m);
    let mut v = Matrix::<T>::identity(n);
    let mut rank = 0;
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v, rank);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let f = d[(i, t)].div_floor(&p);
                row_sub(&mut d, i, t, &f);
                row_sub(&mut u, i, t, &f);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let f = d[(t, j)].div_floor(&p);
                col_sub(&mut d, j, t, &f);
                col_sub(&mut v, j, t, &f);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].mod_floor(&p).is_zero()));
            if let Some(i) = bad {
                let minus_one = -T::one();
                row_sub(&mut d, t, i, &minus_one);
                row_sub(&mut u, t, i, &minus_one);
                continue;
            }
            break;
        }
        if d[(t, t)].is_negative() {
            for j in 0..n {
                let x = -d[(t, j)].clone();
                d[(t, j)] = x;
            }
            for j in 0..m {
                let x = -u[(t, j)].clone();
                u[(t, j)] = x;
            }
        }
        rank += 1;
    }
    finish(d, u, v, rank)
}

fn finish<T: Integer + Signed + Clone>(d: Matrix<T>, u: Matrix<T>, v: Matrix<T>, rank: usize) -> SmithForm<T> {
    let diagonal = (0..d.rows().min(d.cols())).map(|i| d[(i, i)].clone()).collect();
    SmithForm { diagonal, rank, u, v }
}

/// `row_i -= f * row_r`.
fn row_sub<T: Integer + Clone>(m: &mut Matrix<T>, i: usize, r: usize, f: &T) {
    for j in 0..m.cols() {
        let x = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
        m[(i, j)] = x;
    }
}

/// `col_j -= f * col_c`.
fn col_sub<T: Integer + Clone>(m: &mut Matrix<T>, j: usize, c: usize, f: &T) {
    for i in 0..m.rows() {
        let x = m[(i, j)].clone() - f.clone() * m[(i, c)].clone();
        m[(i, j)] = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &Matrix<i64>) -> SmithForm<i64> {
        let s = smith_normal_form(a);
        let prod = s.u.mul_mat(a).mul_mat(&s.v);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let want = if i == j { s.diagonal[i] } else { 0 };
                assert_eq!(prod[(i, j)], want);
            }
        }
        for w in s.diagonal[..s.rank].windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        assert!(s.diagonal[..s.rank].iter().all(|&x| x > 0));
        s
    }

    #[test]
    fn small_examples() {
        let a = Matrix::from_rows(vec![vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = check(&a);
        assert_eq!(s.diagonal, vec![2, 6, 12]);
        let cyc = Matrix::from_rows(vec![vec![2i64, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]);
        let s = check(&cyc);
        assert_eq!(s.torsion_factors(), vec![3]);
        assert_eq!(s.cokernel_free_rank(), 1);
    }

    proptest! {
        #[test]
        fn transforms_diagonalise(entries in proptest::collection::vec(-6i64..7, 20)) {
            let a = Matrix::from_fn(4, 5, |i, j| entries[5 * i + j]);
            let s = check(&a);
            // image membership agrees with the image of the standard basis
            for j in 0..5 {
                prop_assert!(s.in_image(&a.column(j)));
            }
        }
    }
}
