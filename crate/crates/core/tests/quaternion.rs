use num_bigint::BigInt;
use num_rational::BigRational;
use shimura_core::arith::primes_in;
use shimura_core::quaternion::{
    build_algebra, eichler_order, maximal_order, right_ideal_classes, BrandtContext, ClassSet,
};
use std::sync::OnceLock;

fn classes(q: u64) -> &'static ClassSet {
    static C11: OnceLock<ClassSet> = OnceLock::new();
    static C23: OnceLock<ClassSet> = OnceLock::new();
    static C251: OnceLock<ClassSet> = OnceLock::new();
    let cell = match q {
        11 => &C11,
        23 => &C23,
        251 => &C251,
        _ => unreachable!(),
    };
    cell.get_or_init(|| right_ideal_classes(&maximal_order(&build_algebra(q).unwrap()).unwrap()).unwrap())
}

#[test]
fn q251_class_set() {
    let set = classes(251);
    assert_eq!(set.len(), 22);
    let mut w = set.weights();
    w.sort();
    let mut expected = vec![1; 20];
    expected.extend([2, 3]);
    assert_eq!(w, expected);
    assert_eq!(set.mass(), BigRational::new(BigInt::from(250), BigInt::from(24)));
}

#[test]
fn eichler_mass() {
    let alg = build_algebra(11).unwrap();
    let max = maximal_order(&alg).unwrap();
    for p in [3u64, 5, 7] {
        let e = eichler_order(&max, p).unwrap();
        assert_eq!(e.reduced_discriminant(), BigInt::from(11 * p));
        let set = right_ideal_classes(&e).unwrap();
        assert_eq!(set.mass(), BigRational::new(BigInt::from(10 * (p + 1)), BigInt::from(24)));
    }
}

#[test]
fn brandt_consistency() {
    for q in [11u64, 23, 251] {
        let set = classes(q);
        let ctx = BrandtContext::new(set).unwrap();
        let primes: Vec<u64> = primes_in(2, 13).into_iter().filter(|&n| n != q).collect();
        let mats: Vec<_> = primes.iter().map(|&n| ctx.matrix(n).unwrap()).collect();
        let eis: Vec<BigRational> =
            set.weights().iter().map(|&w| BigRational::new(BigInt::from(1), BigInt::from(w))).collect();
        for (b, &n) in mats.iter().zip(&primes) {
            assert!(b.row_sums().iter().all(|&s| s as u64 == n + 1), "q={q} n={n}");
            assert!(b.entries.entries().all(|&x| x >= 0));
            for j in 0..set.len() {
                let s: BigRational = (0..set.len()).map(|i| &eis[i] * BigInt::from(b.entries[(i, j)])).sum();
                assert_eq!(s, &eis[j] * BigInt::from(n + 1), "q={q} n={n} column {j}");
            }
        }
        for (a, &m) in mats.iter().zip(&primes) {
            for (b, &n) in mats.iter().zip(&primes) {
                if m < n && m * n <= 35 {
                    assert_eq!(a.entries.mul_mat(&b.entries), ctx.matrix(m * n).unwrap().entries, "q={q} {m}*{n}");
                }
                assert_eq!(a.entries.mul_mat(&b.entries), b.entries.mul_mat(&a.entries));
            }
        }
    }
}
