use super::field::{FieldElem, PrimeFieldElem, QuadExtElem, QuadExtField};
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Seed used by equal-degree splitting unless the caller supplies one.
pub const DEFAULT_ROOT_SEED: u64 = 0x5eed_0251;

/// Dense univariate polynomial, coefficients from low to high degree.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<F: FieldElem> {
    coeffs: Vec<F>,
    zero: F,
}

impl<F: FieldElem> Poly<F> {
    pub fn new(coeffs: Vec<F>, zero: F) -> Self {
        let zero = zero.zero_like();
        let mut p = Self { coeffs, zero };
        p.trim();
        p
    }

    pub fn zero(ctx: &F) -> Self {
        Self::new(Vec::new(), ctx.zero_like())
    }

    pub fn constant(c: F) -> Self {
        let z = c.zero_like();
        Self::new(vec![c], z)
    }

    /// `x - r`.
    pub fn linear(r: F) -> Self {
        let one = r.one_like();
        Self::new(vec![-r.clone(), one], r.zero_like())
    }

    /// The monomial `x`.
    pub fn x(ctx: &F) -> Self {
        Self::new(vec![ctx.zero_like(), ctx.one_like()], ctx.zero_like())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn ctx(&self) -> &F {
        &self.zero
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(self.zero.clone(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), self.zero.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(), self.zero.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect(), self.zero.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.zero);
        }
        let mut out = vec![self.zero.clone(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out, self.zero.clone())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(&self.zero), self.clone());
        }
        let mut quot = vec![self.zero.clone(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * lead_inv.clone();
            if !c.is_zero() {
                for (i, di) in d.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].clone() - c.clone() * di.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot, self.zero.clone()), Self::new(rem, self.zero.clone()))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::constant(self.zero.one_like()).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::new();
        let mut k = self.zero.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + self.zero.one_like();
        }
        Self::new(out, self.zero.clone())
    }

    pub fn map<G: FieldElem>(&self, f: impl Fn(&F) -> G, zero: G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect(), zero)
    }
}

impl<F: FieldElem + fmt::Display> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<F: FieldElem> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

/// Split a monic squarefree polynomial whose roots all lie in the coefficient
/// field into its roots, by random `gcd(g, (x + a)^((Q-1)/2) - 1)` splits.
fn split_linear<F: FieldElem>(g: &Poly<F>, rng: &mut ChaCha8Rng, out: &mut Vec<F>) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let g = g.monic();
            out.push(-g.coeff(0));
        }
        Some(_) => {
            let ctx = g.ctx().clone();
            let order = ctx.order();
            loop {
                let a = ctx.random_like(rng);
                let shift = Poly::x(&ctx).add(&Poly::constant(a));
                let h = shift.pow_mod((order - 1) / 2, g).sub(&Poly::constant(ctx.one_like()));
                let d = g.gcd(&h);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < g.degree().unwrap() {
                    let (other, _) = g.div_rem(&d);
                    split_linear(&d, rng, out);
                    split_linear(&other.monic(), rng, out);
                    return;
                }
            }
        }
    }
}

/// All roots in `F_{q^2}` of a polynomial over `F_q`, with multiplicity.
pub fn poly_roots_in_fq2(f: &Poly<PrimeFieldElem>, seed: u64) -> Result<Vec<QuadExtElem>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let k = QuadExtField::new(f.ctx().modulus());
    let lifted = f.map(|c| k.from_base(*c), k.zero());
    roots_with_multiplicity(&lifted, seed)
}

/// Roots of a polynomial over any of our fields, lying in that field, with multiplicity.
pub fn roots_with_multiplicity<F: FieldElem>(f: &Poly<F>, seed: u64) -> Result<Vec<F>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let ctx = f.ctx().clone();
    let f = f.monic();
    let x = Poly::x(&ctx);
    // product of the distinct roots: gcd(f, x^Q - x)
    let xq = x.pow_mod(ctx.order(), &f);
    let g = f.gcd(&xq.sub(&x));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut distinct = Vec::new();
    split_linear(&g, &mut rng, &mut distinct);
    let mut out = Vec::new();
    for r in distinct {
        let lin = Poly::linear(r.clone());
        let mut rest = f.clone();
        loop {
            let (quot, rem) = rest.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            out.push(r.clone());
            rest = quot;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(coeffs: &[i64], q: u64) -> Poly<PrimeFieldElem> {
        let z = PrimeFieldElem::new(0, q);
        Poly::new(coeffs.iter().map(|&c| PrimeFieldElem::new(c, q)).collect(), z)
    }

    #[test]
    fn linear_root() {
        let f = fp(&[-64, 1], 251);
        let roots = poly_roots_in_fq2(&f, DEFAULT_ROOT_SEED).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].base_value().unwrap().value(), 64);
    }

    #[test]
    fn irreducible_quadratic_has_conjugate_roots() {
        let f = fp(&[-81, -60, 1], 251);
        let roots = poly_roots_in_fq2(&f, DEFAULT_ROOT_SEED).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(!roots[0].is_in_base_field());
        assert_eq!(roots[0].frobenius(), roots[1]);
        // independent check: evaluation at every element of F_{251^2}
        let k = QuadExtField::new(251);
        let lifted = f.map(|c| k.from_base(*c), k.zero());
        let brute: Vec<_> = k.elements().filter(|x| lifted.eval(x).is_zero()).collect();
        assert_eq!(brute.len(), 2);
        for r in &roots {
            assert!(brute.contains(r));
        }
    }

    #[test]
    fn multiplicities_are_counted() {
        // (x - 3)^2 (x + 1)
        let a = fp(&[-3, 1], 11);
        let b = fp(&[1, 1], 11);
        let f = a.mul(&a).mul(&b);
        let mut roots: Vec<_> = poly_roots_in_fq2(&f, 7).unwrap().iter().map(|r| r.a0.value()).collect();
        roots.sort();
        assert_eq!(roots, vec![3, 3, 10]);
    }

    #[test]
    fn zero_polynomial_rejected() {
        let z = fp(&[], 11);
        assert!(poly_roots_in_fq2(&z, 1).is_err());
    }

    #[test]
    fn div_rem_reconstructs() {
        let f = fp(&[5, 0, 3, 7, 1], 13);
        let d = fp(&[2, 1, 4], 13);
        let (qq, r) = f.div_rem(&d);
        assert_eq!(qq.mul(&d).add(&r), f);
        assert!(r.degree().unwrap_or(0) < 2);
    }
}
