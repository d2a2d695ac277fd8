use super::{Copy, DualGraph, QVertexKind, QuotientGraph};
use crate::error::Result;
use crate::quaternion::brandt_matrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDeviation {
    pub source: usize,
    pub target: usize,
    pub count: u64,
    pub expected: f64,
    /// `(count - expected) / (2 sqrt p)`.
    pub normalized: f64,
}

/// Edge counts between vertex pairs against `(p + 1) / (w(Eis) w_i w_j)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquidistributionReport {
    pub p: u64,
    pub q: u64,
    /// `w(Eis) = sum_i 1/w_i`.
    pub eis_weight: BigRational,
    /// Indexed by `V1` class and `V2` class.
    pub pairs: Vec<PairDeviation>,
    pub max_normalized: f64,
    /// Indexed by quotient vertex. The expectation carries the factor
    /// `eps = 2 / (|C_1| |C_2|)` for orbits `C_1`, `C_2`.
    pub quotient_pairs: Vec<PairDeviation>,
    pub quotient_max_normalized: f64,
    /// `sum over edges a -> b of w_a / width = B(p)[a][b]` for all pairs.
    pub brandt_consistent: bool,
}

pub fn equidistribution_report(g: &DualGraph, quotient: Option<&QuotientGraph>) -> Result<EquidistributionReport> {
    let h = g.class_count();
    let p = g.p;
    let weights = g.classes.weights();
    let eis_weight =
        weights.iter().fold(BigRational::zero(), |acc, &w| acc + BigRational::new(BigInt::from(1), BigInt::from(w)));
    let eis = eis_weight.to_f64().unwrap_or(f64::NAN);
    let scale = 2.0 * (p as f64).sqrt();

    let mut counts = vec![vec![0u64; h]; h];
    let mut weighted = vec![vec![0u64; h]; h];
    for e in &g.edges {
        let (a, b) = (g.vertices[e.source].class, g.vertices[e.target].class);
        counts[a][b] += 1;
        weighted[a][b] += (weights[a] / e.width) as u64;
    }
    let bp = brandt_matrix(&g.classes, p)?;
    let brandt_consistent = (0..h).all(|a| (0..h).all(|b| bp.entries[(a, b)] == weighted[a][b] as i64));

    let mut pairs = Vec::with_capacity(h * h);
    for a in 0..h {
        for b in 0..h {
            let expected = (p + 1) as f64 / (eis * weights[a] as f64 * weights[b] as f64);
            let count = counts[a][b];
            pairs.push(PairDeviation {
                source: a,
                target: b,
                count,
                expected,
                normalized: (count as f64 - expected) / scale,
            });
        }
    }
    let max_normalized = pairs.iter().map(|d| d.normalized.abs()).fold(0.0, f64::max);

    let mut quotient_pairs = Vec::new();
    if let Some(qg) = quotient {
        let orbit = |v: usize| match &qg.vertices[v].kind {
            QVertexKind::Orbit { copy, classes } => Some((*copy, classes.len())),
            QVertexKind::Exceptional { .. } => None,
        };
        let n = qg.vertices.len();
        let mut qcounts = vec![vec![0u64; n]; n];
        for e in &qg.edges {
            qcounts[e.source][e.target] += 1;
        }
        for c1 in 0..n {
            let Some((Copy::V1, s1)) = orbit(c1) else { continue };
            for c2 in 0..n {
                let Some((Copy::V2, s2)) = orbit(c2) else { continue };
                let (w1, w2) = (qg.vertices[c1].weight as f64, qg.vertices[c2].weight as f64);
                let eps = 2.0 / (s1 * s2) as f64;
                let expected = (p + 1) as f64 / (eis * eps * w1 * w2);
                let count = qcounts[c1][c2];
                quotient_pairs.push(PairDeviation {
                    source: c1,
                    target: c2,
                    count,
                    expected,
                    normalized: (count as f64 - expected) / scale,
                });
            }
        }
    }
    let quotient_max_normalized = quotient_pairs.iter().map(|d| d.normalized.abs()).fold(0.0, f64::max);
    Ok(EquidistributionReport {
        p,
        q: g.q,
        eis_weight,
        pairs,
        max_normalized,
        quotient_pairs,
        quotient_max_normalized,
        brandt_consistent,
    })
}
