use super::field::{FieldElem, PrimeFieldElem, QuadExtElem};
use super::is_prime;
use super::poly::{poly_roots_in_fq2, Poly};
use crate::error::{Error, Result};
use serde::Serialize;

/// Supersingular j-invariants in characteristic `q`, with the factorization
/// of their polynomial over `F_q`.
#[derive(Debug, Clone, Serialize)]
pub struct SupersingularPolynomial {
    pub q: u64,
    /// Seed used for root splitting.
    pub seed: u64,
    #[serde(skip)]
    pub poly: Poly<PrimeFieldElem>,
    /// Distinct roots, rational ones first, conjugate pairs adjacent.
    pub roots: Vec<QuadExtElem>,
    pub linear_roots: Vec<PrimeFieldElem>,
    /// Monic irreducible quadratics, as `[c0, c1]` for `x^2 + c1 x + c0`.
    pub quadratic_factors: Vec<[PrimeFieldElem; 2]>,
}

/// Number of supersingular j-invariants in characteristic `q > 3`.
pub fn supersingular_count(q: u64) -> u64 {
    q / 12
        + match q % 12 {
            1 => 0,
            5 | 7 => 1,
            11 => 2,
            _ => 0,
        }
}

fn hasse_polynomial(q: u64) -> Poly<PrimeFieldElem> {
    let m = (q - 1) / 2;
    let f = |v: i64| PrimeFieldElem::new(v, q);
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    let mut binom = f(1);
    for i in 0..=m {
        coeffs.push(binom * binom);
        if i < m {
            binom = binom * f((m - i) as i64) * f((i + 1) as i64).inv().unwrap();
        }
    }
    Poly::new(coeffs, f(0))
}

fn lambda_to_j(l: QuadExtElem) -> Result<QuadExtElem> {
    let one = l.one_like();
    let k = l.field();
    let num = l * l - l + one;
    let den = l * l * (l - one) * (l - one);
    let inv = den.inv().ok_or_else(|| Error::Internal("Legendre parameter at 0 or 1".into()))?;
    Ok(k.elem(256, 0) * num * num * num * inv)
}

pub fn supersingular_polynomial(q: u64) -> Result<SupersingularPolynomial> {
    supersingular_polynomial_seeded(q, super::DEFAULT_ROOT_SEED)
}

pub fn supersingular_polynomial_seeded(q: u64, seed: u64) -> Result<SupersingularPolynomial> {
    if q <= 3 || !is_prime(q) {
        return Err(Error::InvalidInput(format!("supersingular polynomial needs a prime q > 3, got {q}")));
    }
    let lambdas = poly_roots_in_fq2(&hasse_polynomial(q), seed)?;
    if lambdas.len() as u64 != (q - 1) / 2 {
        return Err(Error::Internal("Hasse polynomial does not split over F_{q^2}".into()));
    }
    let mut js: Vec<QuadExtElem> = Vec::new();
    for l in lambdas {
        let j = lambda_to_j(l)?;
        if !js.contains(&j) {
            js.push(j);
        }
    }
    if js.len() as u64 != supersingular_count(q) {
        return Err(Error::Internal(format!(
            "found {} supersingular invariants, expected {}",
            js.len(),
            supersingular_count(q)
        )));
    }
    let mut linear: Vec<PrimeFieldElem> = js.iter().filter_map(|j| j.base_value()).collect();
    linear.sort_by_key(|x| x.value());
    let mut quadratic = Vec::new();
    let mut pairs: Vec<(QuadExtElem, QuadExtElem)> = Vec::new();
    for j in js.iter().filter(|j| !j.is_in_base_field()) {
        let c = j.frobenius();
        if pairs.iter().any(|(a, b)| a == j || b == j) {
            continue;
        }
        if !js.contains(&c) {
            return Err(Error::Internal("supersingular set not Frobenius stable".into()));
        }
        pairs.push((*j, c));
        let (t, n) = ((*j + c).base_value().unwrap(), (*j * c).base_value().unwrap());
        quadratic.push([n, -t]);
    }
    quadratic.sort_by_key(|f| (f[1].value(), f[0].value()));
    pairs.sort_by_key(|(a, b)| {
        let t = (*a + *b).base_value().unwrap();
        let n = (*a * *b).base_value().unwrap();
        ((-t).value(), n.value())
    });

    let zero = PrimeFieldElem::new(0, q);
    let mut poly = Poly::constant(PrimeFieldElem::new(1, q));
    for r in &linear {
        poly = poly.mul(&Poly::linear(*r));
    }
    for f in &quadratic {
        poly = poly.mul(&Poly::new(vec![f[0], f[1], PrimeFieldElem::new(1, q)], zero));
    }
    let k = super::QuadExtField::new(q);
    let mut roots: Vec<QuadExtElem> = linear.iter().map(|r| k.from_base(*r)).collect();
    for (a, b) in pairs {
        roots.push(a);
        roots.push(b);
    }
    Ok(SupersingularPolynomial { q, seed, poly, roots, linear_roots: linear, quadratic_factors: quadratic })
}

impl SupersingularPolynomial {
    /// Roots recomputed from `poly` alone.
    pub fn recompute_roots(&self) -> Result<Vec<QuadExtElem>> {
        poly_roots_in_fq2(&self.poly, self.seed)
    }

    pub fn contains(&self, j: &QuadExtElem) -> bool {
        self.roots.contains(j)
    }
}
