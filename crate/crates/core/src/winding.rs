//! Gross vectors on the edges of the dual graph, their boundaries, the
//! Eisenstein vector, and closed paths made of Gross vectors.

use crate::arith::{class_number_bounded, kronecker, QuadDiscriminant};
use crate::error::{Error, Result};
use crate::graph::{DesingularizedGraph, DualGraph, QuotientGraph};
use crate::linalg::{integer_kernel, Matrix};
use crate::quaternion::{optimal_embedding_count_in, ClassSet, ReducedForm};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `e_D = sum_E h_E(-D) / w_E [E]` over the edges of the dual graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrossVector {
    pub disc: QuadDiscriminant,
    pub p: u64,
    pub q: u64,
    /// `false` when `q` splits or `p` is inert in `O_{-D}`; the vector is then zero.
    pub applicable: bool,
    pub flag: Option<String>,
    /// Indexed by edges of the dual graph.
    pub coefficients: Vec<BigRational>,
    /// Pushforward to the `w_q` quotient, when computed.
    pub quotient: Option<Vec<BigRational>>,
}

impl GrossVector {
    pub fn support(&self) -> Vec<usize> {
        (0..self.coefficients.len()).filter(|&e| !self.coefficients[e].is_zero()).collect()
    }

    /// `6 e_D` on the quotient, which is integral.
    pub fn scaled_quotient(&self) -> Result<Vec<BigInt>> {
        let qv = self.quotient.as_ref().ok_or_else(|| Error::InvalidInput("pushforward not computed".into()))?;
        qv.iter()
            .map(|c| {
                let s = c * rat(6);
                if s.is_integer() {
                    Ok(s.to_integer())
                } else {
                    Err(Error::Internal(format!("6 e_{} is not integral", self.disc.d())))
                }
            })
            .collect()
    }
}

/// Whether some element of `order` has trace `t` and norm `n`.
fn has_element(cls_order: &crate::quaternion::QLattice, g: &DualGraph, t: i64, n: u64) -> Result<bool> {
    let rf = ReducedForm::of(cls_order, &g.algebra)?;
    let trace = rat(t);
    Ok(rf.vectors_of_value(2 * n as i128)?.iter().any(|c| rf.element(cls_order, c).trace() == trace))
}

pub fn gross_vector(g: &DualGraph, disc: QuadDiscriminant) -> Result<GrossVector> {
    let (p, q) = (g.p, g.q);
    let zero = || vec![BigRational::zero(); g.edges.len()];
    let chi_q = kronecker(disc.value(), q as i64)?;
    let chi_p = kronecker(disc.value(), p as i64)?;
    let flag = if chi_q == 1 {
        Some(format!("{q} splits in the order of discriminant -{}", disc.d()))
    } else if chi_p == -1 {
        Some(format!("{p} is inert in the order of discriminant -{}", disc.d()))
    } else {
        None
    };
    if flag.is_some() {
        return Ok(GrossVector { disc, p, q, applicable: false, flag, coefficients: zero(), quotient: None });
    }
    let d = disc.d();
    let t = (d % 2) as i64;
    let n = (d + d % 2) / 4;
    // an embedding into an edge order lands in both endpoint orders
    let admits: Vec<bool> =
        g.classes.classes.par_iter().map(|c| has_element(&c.left_order, g, t, n)).collect::<Result<_>>()?;
    let coefficients: Vec<BigRational> = g
        .edges
        .par_iter()
        .map(|e| {
            let (a, b) = (g.vertices[e.source].class, g.vertices[e.target].class);
            if !admits[a] || !admits[b] {
                return Ok(BigRational::zero());
            }
            let h = optimal_embedding_count_in(&g.algebra, &e.eichler, e.width, &disc)?;
            Ok(BigRational::new(BigInt::from(h), BigInt::from(e.width)))
        })
        .collect::<Result<_>>()?;
    Ok(GrossVector { disc, p, q, applicable: true, flag: None, coefficients, quotient: None })
}

/// [`gross_vector`] followed by the pushforward to `qg`.
pub fn gross_vector_on_quotient(g: &DualGraph, qg: &QuotientGraph, disc: QuadDiscriminant) -> Result<GrossVector> {
    let mut v = gross_vector(g, disc)?;
    v.quotient = Some(push_edges(qg, &v.coefficients));
    Ok(v)
}

/// Sum of coefficients over `w_q`-orbits of edges.
pub fn push_edges(qg: &QuotientGraph, coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); qg.edges.len()];
    for (e, c) in coeffs.iter().enumerate() {
        out[qg.edge_of[e]] += c;
    }
    out
}

/// Sum of coefficients over `w_q`-orbits of vertices.
pub fn push_vertices(qg: &QuotientGraph, divisor: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); qg.vertices.len()];
    for (v, c) in divisor.iter().enumerate() {
        out[qg.vertex_of[v]] += c;
    }
    out
}

/// Every unit edge of a chain carries the coefficient of its base edge.
pub fn to_desingularized<T: Clone + Zero>(d: &DesingularizedGraph, coeffs: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); d.edges.len()];
    for (e, chain) in d.segments.iter().enumerate() {
        for &f in chain {
            out[f] = coeffs[e].clone();
        }
    }
    out
}

/// `sum_e c_e (t(e) - s(e))`.
pub fn boundary<T>(n: usize, ends: &[(usize, usize)], coeffs: &[T]) -> Vec<T>
where
    T: Clone + Zero + std::ops::Sub<Output = T>,
{
    let mut out = vec![T::zero(); n];
    for (&(s, t), c) in ends.iter().zip(coeffs) {
        out[t] = out[t].clone() + c.clone();
        out[s] = out[s].clone() - c.clone();
    }
    out
}

pub fn dual_ends(g: &DualGraph) -> Vec<(usize, usize)> {
    g.edges.iter().map(|e| (e.source, e.target)).collect()
}

/// `(1 / w_i)_i` over the maximal classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EisensteinVector {
    pub q: u64,
    pub entries: Vec<BigRational>,
    pub weight: BigRational,
}

pub fn eisenstein_vector(classes: &ClassSet) -> Result<EisensteinVector> {
    let q = classes.order.algebra.q;
    if q <= 3 || classes.order.level != 1 {
        return Err(Error::InvalidInput("Eisenstein vector needs a maximal order with q > 3".into()));
    }
    let entries: Vec<BigRational> =
        classes.weights().iter().map(|&w| BigRational::new(BigInt::one(), BigInt::from(w))).collect();
    let weight = entries.iter().fold(BigRational::zero(), |a, x| a + x);
    let expected = BigRational::new(BigInt::from(q - 1), BigInt::from(12));
    if weight != expected {
        return Err(Error::MassMismatch { found: weight.to_string(), expected: expected.to_string() });
    }
    Ok(EisensteinVector { q, entries, weight })
}

/// An integer combination of Gross vectors on the quotient graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclePath {
    pub discs: Vec<u64>,
    pub lambda: Vec<BigInt>,
    /// `sum lambda_D e_D` on quotient edges.
    pub edge_vector: Vec<BigRational>,
    /// The same on the desingularized graph.
    pub desingularized: Vec<BigRational>,
    pub boundary: Vec<BigRational>,
    pub is_cycle: bool,
    pub exceptional_edge: usize,
    pub exceptional_coefficient: BigRational,
    /// `6 x` exceptional coefficient, reduced mod `p`.
    pub scaled_exceptional_mod_p: u64,
}

impl CyclePath {
    pub fn prime_to_p(&self) -> bool {
        self.scaled_exceptional_mod_p != 0
    }
}

/// Quotient edge whose chain carries the exceptional vertex.
pub fn exceptional_edge(d: &DesingularizedGraph, exceptional_vertex: usize) -> Result<usize> {
    match &d.vertices.get(exceptional_vertex).map(|v| &v.kind) {
        Some(crate::graph::QVertexKind::Exceptional { edge, .. }) => Ok(*edge),
        _ => Err(Error::InvalidInput(format!("vertex {exceptional_vertex} is not an exceptional vertex"))),
    }
}

/// Evaluate `sum lambda_D e_D` on the quotient.
pub fn combine(
    d: &DesingularizedGraph,
    vectors: &[GrossVector],
    lambda: &[BigInt],
    exceptional_edge: usize,
) -> Result<CyclePath> {
    if vectors.len() != lambda.len() {
        return Err(Error::InvalidInput("one coefficient per Gross vector".into()));
    }
    let qg = &d.base;
    let p = qg.p;
    let mut edge_vector = vec![BigRational::zero(); qg.edges.len()];
    for (v, l) in vectors.iter().zip(lambda) {
        let qv = v.quotient.as_ref().ok_or_else(|| Error::InvalidInput("pushforward not computed".into()))?;
        let l = BigRational::from_integer(l.clone());
        for (acc, c) in edge_vector.iter_mut().zip(qv) {
            *acc += c * &l;
        }
    }
    let boundary = boundary(qg.vertices.len(), &qg.ends(), &edge_vector);
    let is_cycle = boundary.iter().all(|x| x.is_zero());
    let exceptional_coefficient = edge_vector[exceptional_edge].clone();
    let scaled = (&exceptional_coefficient * rat(6)).to_integer();
    let scaled_exceptional_mod_p = scaled.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0);
    Ok(CyclePath {
        discs: vectors.iter().map(|v| v.disc.d()).collect(),
        lambda: lambda.to_vec(),
        desingularized: to_desingularized(d, &edge_vector),
        edge_vector,
        boundary,
        is_cycle,
        exceptional_edge,
        exceptional_coefficient,
        scaled_exceptional_mod_p,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleSearch {
    /// Basis of the integer relations `lambda` with `sum lambda_D d(6 e_D) = 0`.
    pub kernel: Vec<Vec<BigInt>>,
    pub found: Option<CyclePath>,
}

/// Search the integer span of the given Gross vectors for a cycle whose
/// coefficient at the exceptional edge is prime to `p`. If no kernel basis
/// vector works then no kernel element does.
pub fn find_cycle_combination(
    d: &DesingularizedGraph,
    vectors: &[GrossVector],
    exceptional_edge: usize,
) -> Result<CycleSearch> {
    let qg = &d.base;
    let p = BigInt::from(qg.p);
    if vectors.is_empty() {
        return Ok(CycleSearch { kernel: vec![], found: None });
    }
    let scaled: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.scaled_quotient()).collect::<Result<_>>()?;
    let ends = qg.ends();
    let boundaries: Vec<Vec<BigInt>> = scaled.iter().map(|s| boundary(qg.vertices.len(), &ends, s)).collect();
    let m = Matrix::from_fn(qg.vertices.len(), vectors.len(), |i, k| boundaries[k][i].clone());
    let kernel = integer_kernel(&m).to_rows();
    let found = kernel
        .iter()
        .find(|lambda| {
            let c = lambda.iter().zip(&scaled).fold(BigInt::zero(), |a, (l, s)| a + l * &s[exceptional_edge]);
            !c.mod_floor(&p).is_zero()
        })
        .map(|lambda| {
            // make the first nonzero coefficient positive
            let sign = lambda.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(BigInt::one);
            let lambda: Vec<BigInt> = lambda.iter().map(|x| x * &sign).collect();
            combine(d, vectors, &lambda, exceptional_edge)
        })
        .transpose()?;
    Ok(CycleSearch { kernel, found })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleShape {
    /// Connected components of the support, as desingularized edge lists.
    pub components: Vec<Vec<usize>>,
    /// `(D, (-D/p))`: `1` split, `0` ramified.
    pub splitting: Vec<(u64, i8)>,
}

pub fn cycle_shape_report(d: &DesingularizedGraph, c: &CyclePath) -> Result<CycleShape> {
    let support: Vec<usize> = (0..d.edges.len()).filter(|&e| !c.desingularized[e].is_zero()).collect();
    let n = d.vertices.len();
    let ends: Vec<(usize, usize)> = support.iter().map(|&e| (d.edges[e].source, d.edges[e].target)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<usize> = (0..n).collect();
    fn find(r: &mut [usize], mut x: usize) -> usize {
        while r[x] != x {
            r[x] = r[r[x]];
            x = r[x];
        }
        x
    }
    for &(s, t) in &ends {
        let (a, b) = (find(&mut root_of, s), find(&mut root_of, t));
        if a != b {
            root_of[a] = b;
        }
    }
    let mut index = std::collections::HashMap::new();
    for (k, &e) in support.iter().enumerate() {
        let r = find(&mut root_of, ends[k].0);
        let slot = *index.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(e);
    }
    let splitting =
        c.discs.iter().map(|&dd| Ok((dd, kronecker(-(dd as i64), d.base.p as i64)?))).collect::<Result<_>>()?;
    Ok(CycleShape { components: groups, splitting })
}

/// Discriminants `D <= bound` with `(-D/q) = -1`, `p` not inert and
/// `h(-D) <= max_class_number`.
pub fn suggest_discriminants(p: u64, q: u64, bound: u64, max_class_number: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for dd in 3..=bound {
        let Ok(disc) = QuadDiscriminant::new(dd) else { continue };
        if kronecker(disc.value(), q as i64)? != -1 || kronecker(disc.value(), p as i64)? == -1 {
            continue;
        }
        if class_number_bounded(disc, bound.max(1))? <= max_class_number {
            out.push(dd);
        }
    }
    Ok(out)
}

/// Integer vector helper for callers holding `i64` coefficients.
pub fn lambda_from(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
