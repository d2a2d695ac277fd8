//! Local conditions, congruence scans, genus and gonality bounds, special
//! points, and certificate assembly for `X^{pq} / w_q`.

mod certificate;

pub use certificate::{
    build_labelled_graph, certify, certify_graph, Certificate, Check, CheckStatus, ScreenConfig, Verdict,
    CERTIFICATE_VERSION, REQUIRED_CHECKS,
};

use crate::arith::{class_number_bounded, is_prime, kronecker, primes_in, QuadDiscriminant};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalCase {
    /// `p = 3 mod 4` (ramified).
    Ramified,
    /// `p = 1 mod 4` and `q = 3 mod 4` (non-ramified).
    NonRamified,
    Neither,
}

/// Necessary conditions for local points on `X^{pq} / w_q` at `p`, `q` and infinity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalPointConditions {
    pub p: u64,
    pub q: u64,
    /// `(q / p)`, required to be `-1`.
    pub legendre_q_p: i8,
    pub case: LocalCase,
    /// Both conditions hold.
    pub holds: bool,
    /// The non-ramified case, the one handled here.
    pub supported: bool,
    pub verdict: String,
}

pub fn local_point_conditions(p: u64, q: u64) -> Result<LocalPointConditions> {
    if p == q || p < 3 || q < 3 || !is_prime(p) || !is_prime(q) {
        return Err(Error::InvalidInput(format!("({p}, {q}) must be distinct odd primes")));
    }
    let legendre_q_p = kronecker(q as i64, p as i64)?;
    let case = if p % 4 == 3 {
        LocalCase::Ramified
    } else if q % 4 == 3 {
        LocalCase::NonRamified
    } else {
        LocalCase::Neither
    };
    let holds = legendre_q_p == -1 && case != LocalCase::Neither;
    let supported = holds && case == LocalCase::NonRamified;
    let verdict = if legendre_q_p != -1 {
        format!("local obstruction condition fails: ({q}/{p}) = {legendre_q_p}")
    } else {
        match case {
            LocalCase::Neither => format!("local obstruction condition fails: {p} = 1 mod 4 and {q} = 1 mod 4"),
            LocalCase::Ramified => "ramified case: local conditions hold, unsupported".into(),
            LocalCase::NonRamified => "non-ramified case: local conditions hold".into(),
        }
    };
    Ok(LocalPointConditions { p, q, legendre_q_p, case, holds, supported, verdict })
}

/// Whether `p` satisfies `p = 5 mod 12`, `(p / q) = -1` and `(-D / p) = 1`
/// for every `D` in `split`.
pub fn satisfies_congruences(p: u64, q: u64, split: &[u64]) -> Result<bool> {
    if p % 12 != 5 || p == q {
        return Ok(false);
    }
    if kronecker(p as i64, q as i64)? != -1 {
        return Ok(false);
    }
    for &d in split {
        if kronecker(-(d as i64), p as i64)? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Discriminants whose splitting at `p` the family needs, for `q = 251`.
pub const FAMILY_251_SPLIT: [u64; 2] = [7, 267];

/// Primes in `[lo, hi]` satisfying [`satisfies_congruences`].
pub fn congruence_scan(q: u64, split: &[u64], lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo > hi {
        return Err(Error::InvalidInput(format!("empty range [{lo}, {hi}]")));
    }
    let primes = primes_in(lo, hi);
    let keep: Vec<bool> = primes.par_iter().map(|&p| satisfies_congruences(p, q, split)).collect::<Result<_>>()?;
    Ok(primes.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect())
}

/// Genus of `X^{pq}`.
pub fn shimura_genus(p: u64, q: u64) -> Result<u64> {
    let r = |n: i64| BigRational::from_integer(BigInt::from(n));
    let leg = |a: i64, n: u64| -> Result<i64> { Ok(kronecker(a, n as i64)? as i64) };
    let g = r(1)
        - BigRational::new(BigInt::from((1 - leg(-1, p)?) * (1 - leg(-1, q)?)), BigInt::from(4))
        - BigRational::new(BigInt::from((1 - leg(-3, p)?) * (1 - leg(-3, q)?)), BigInt::from(3))
        + BigRational::new(BigInt::from((p as i64 - 1) * (q as i64 - 1)), BigInt::from(12));
    if !g.is_integer() || g < BigRational::zero() {
        return Err(Error::Internal(format!("genus formula gives {g} at ({p}, {q})")));
    }
    g.to_integer().to_u64().ok_or_else(|| Error::Internal("genus out of range".into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenusBounds {
    pub p: u64,
    pub q: u64,
    pub genus: u64,
    /// `(21/200)(g - 1)`.
    pub gonality_lower: BigRational,
    /// `(21/400)(g - 1)`: any `n` with nontrivial `phi(X) cap J[n]` is at least this.
    pub torsion_lower: BigRational,
    /// `pq / 245`.
    pub torsion_threshold: BigRational,
    /// `p >= 19` and `q >= 245`.
    pub applicable: bool,
    pub n: u64,
    /// `n < pq / 245`.
    pub n_below_threshold: bool,
    /// `pq / 245 - n`.
    pub margin: BigRational,
}

/// Bounds for `n = p + 1`.
pub fn genus_and_gonality(p: u64, q: u64) -> Result<GenusBounds> {
    let genus = shimura_genus(p, q)?;
    let gm1 = BigRational::from_integer(BigInt::from(genus as i64 - 1));
    let gonality_lower = &gm1 * BigRational::new(21.into(), 200.into());
    let torsion_lower = &gm1 * BigRational::new(21.into(), 400.into());
    let torsion_threshold = BigRational::new(BigInt::from(p) * BigInt::from(q), 245.into());
    let n = p + 1;
    let nr = BigRational::from_integer(BigInt::from(n));
    Ok(GenusBounds {
        p,
        q,
        genus,
        gonality_lower,
        torsion_lower,
        applicable: p >= 19 && q >= 245,
        n,
        n_below_threshold: nr < torsion_threshold,
        margin: &torsion_threshold - nr,
        torsion_threshold,
    })
}

/// `D` with `-D` the discriminant of `Q(sqrt(-m))`, `m` squarefree.
pub fn field_discriminant(m: u64) -> u64 {
    if m % 4 == 3 {
        m
    } else {
        4 * m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialPointVerdict {
    NoSpecialPoints,
    SpecialPointPossible,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecialPointCheck {
    /// `(D, h(-D))` for the fields of `-p`, `-q`, `-pq`; `None` beyond the bound.
    pub class_numbers: Vec<(u64, Option<u64>)>,
    pub verdict: SpecialPointVerdict,
}

/// Special rational points need `h(-p) = 1`, `h(-q) = 1` or `h(-pq) = 2`.
pub fn special_point_check(p: u64, q: u64, bound: u64) -> Result<SpecialPointCheck> {
    let ds = [field_discriminant(p), field_discriminant(q), field_discriminant(p * q)];
    let class_numbers: Vec<(u64, Option<u64>)> = ds
        .iter()
        .map(|&d| {
            let disc = QuadDiscriminant::new(d)?;
            Ok((d, class_number_bounded(disc, bound).ok()))
        })
        .collect::<Result<_>>()?;
    let targets = [1, 1, 2];
    let possible = class_numbers.iter().zip(targets).any(|((_, h), t)| *h == Some(t));
    let unknown = class_numbers.iter().any(|(_, h)| h.is_none());
    let verdict = if possible {
        SpecialPointVerdict::SpecialPointPossible
    } else if unknown {
        SpecialPointVerdict::Unknown
    } else {
        SpecialPointVerdict::NoSpecialPoints
    };
    Ok(SpecialPointCheck { class_numbers, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_cases() {
        let c = local_point_conditions(137, 251).unwrap();
        assert_eq!(c.legendre_q_p, -1);
        assert_eq!(c.case, LocalCase::NonRamified);
        assert!(c.supported);
        // (11/5) = 1
        let c = local_point_conditions(5, 11).unwrap();
        assert!(!c.holds);
        assert!(c.verdict.contains("fails"));
        // (11/3) = (2/3) = -1
        let c = local_point_conditions(3, 11).unwrap();
        assert_eq!(c.case, LocalCase::Ramified);
        assert!(!c.supported);
    }

    #[test]
    fn genus_values() {
        assert_eq!(shimura_genus(137, 251).unwrap(), 2833);
        assert_eq!(shimura_genus(3, 11).unwrap(), 1);
        let b = genus_and_gonality(137, 251).unwrap();
        assert!(b.applicable);
        // 138 < 34387 / 245 = 140.35...
        assert!(b.n_below_threshold);
        assert_eq!(b.margin, BigRational::new(34387.into(), 245.into()) - BigRational::from_integer(138.into()));
    }

    #[test]
    fn special_points() {
        let c = special_point_check(137, 251, 1_000_000).unwrap();
        assert_eq!(c.class_numbers[1], (251, Some(7)));
        assert_eq!(c.verdict, SpecialPointVerdict::NoSpecialPoints);
        let c = special_point_check(137, 163, 1_000_000).unwrap();
        assert_eq!(c.class_numbers[1], (163, Some(1)));
        assert_eq!(c.verdict, SpecialPointVerdict::SpecialPointPossible);
        let c = special_point_check(137, 251, 1000).unwrap();
        assert_eq!(c.verdict, SpecialPointVerdict::Unknown);
    }

    #[test]
    fn scan_contains_137() {
        let ps = congruence_scan(251, &FAMILY_251_SPLIT, 2, 500).unwrap();
        assert!(ps.contains(&137));
        assert!(ps.iter().all(|p| p % 12 == 5));
    }
}
