//! Graph Laplacians `iota = -d_* d^*`, component groups as cokernels of
//! `iota`, torsion membership, and the potential/current law on graphs.

use crate::error::{Error, Result};
use crate::graph::{component_count, DesingularizedGraph};
use crate::linalg::{smith_normal_form, Matrix, SmithForm};
use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `d^* f (e) = f(t(e)) - f(s(e))` and `d_* e = t(e) - s(e)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryMaps<T> {
    /// `Z^{S1} -> Z^{S0}`, shape `|S0| x |S1|`.
    pub d_star: Matrix<T>,
    /// `Z^{S0} -> Z^{S1}`, shape `|S1| x |S0|`.
    pub d_upper_star: Matrix<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Laplacian<T> {
    pub maps: BoundaryMaps<T>,
    /// `-d_* d^*`: diagonal `-deg`, off-diagonal edge multiplicities.
    pub iota: Matrix<T>,
    pub components: usize,
}

/// `iota` of a multigraph with unit widths, given by `(source, target, width)`.
pub fn laplacian<T>(n: usize, edges: &[(usize, usize, u32)]) -> Result<Laplacian<T>>
where
    T: Integer + Signed + Clone + From<i64>,
{
    if let Some(&(s, t, w)) = edges.iter().find(|e| e.2 != 1) {
        return Err(Error::InvalidInput(format!("edge {s} -- {t} has width {w}; desingularize first")));
    }
    if edges.iter().any(|&(s, t, _)| s >= n || t >= n) {
        return Err(Error::InvalidInput("edge endpoint out of range".into()));
    }
    let mut d_star: Matrix<T> = Matrix::zeros(n, edges.len());
    for (e, &(s, t, _)) in edges.iter().enumerate() {
        d_star[(t, e)] = d_star[(t, e)].clone() + T::one();
        d_star[(s, e)] = d_star[(s, e)].clone() - T::one();
    }
    let d_upper_star = d_star.transpose();
    let iota = d_star.mul_mat(&d_upper_star).map(|x| -x.clone());
    let ends: Vec<(usize, usize)> = edges.iter().map(|&(s, t, _)| (s, t)).collect();
    Ok(Laplacian { maps: BoundaryMaps { d_star, d_upper_star }, iota, components: component_count(n, &ends) })
}

pub fn laplacian_of<T>(g: &DesingularizedGraph) -> Result<Laplacian<T>>
where
    T: Integer + Signed + Clone + From<i64>,
{
    let edges: Vec<(usize, usize, u32)> = g.edges.iter().map(|e| (e.source, e.target, e.width)).collect();
    laplacian(g.vertices.len(), &edges)
}

/// `Phi = coker(iota)` restricted to degree zero, with the Smith form kept
/// for membership queries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentGroup<T> {
    /// Invariant factors greater than one.
    pub invariant_factors: Vec<T>,
    /// Free rank of `Phi`: zero exactly for connected graphs.
    pub free_rank: usize,
    pub smith: SmithForm<T>,
}

impl<T: Integer + Signed + Clone> ComponentGroup<T> {
    pub fn order(&self) -> Option<T> {
        (self.free_rank == 0).then(|| self.smith.torsion_order())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

pub fn component_group<T>(lap: &Laplacian<T>) -> ComponentGroup<T>
where
    T: Integer + Signed + Clone,
{
    if lap.components != 1 {
        log::warn!("graph has {} components; the component group has a free part", lap.components);
    }
    let smith = smith_normal_form(&lap.iota);
    // coker(iota) on Z^{S0} has free rank = number of components; degree zero removes one
    let free_rank = smith.cokernel_free_rank().saturating_sub(1);
    ComponentGroup { invariant_factors: smith.torsion_factors(), free_rank, smith }
}

/// Whether `n (C1 - C2)` lies in the image of `iota`.
pub fn is_killed_by<T>(cg: &ComponentGroup<T>, n: u64, c1: usize, c2: usize) -> Result<bool>
where
    T: Integer + Signed + Clone + From<i64>,
{
    let size = cg.smith.u.rows();
    if c1 == c2 || c1 >= size || c2 >= size {
        return Err(Error::InvalidInput(format!("vertices {c1}, {c2} must be distinct and below {size}")));
    }
    let mut b = vec![T::zero(); size];
    b[c1] = T::from(n as i64);
    b[c2] = T::from(-(n as i64));
    Ok(cg.smith.in_image(&b))
}

/// `is_killed_by` for `(exceptional, c)` over every other vertex `c`.
pub fn killed_against_all<T>(cg: &ComponentGroup<T>, n: u64, exceptional: usize) -> Result<Vec<(usize, bool)>>
where
    T: Integer + Signed + Clone + From<i64> + Send + Sync,
{
    (0..cg.smith.u.rows())
        .into_par_iter()
        .filter(|&c| c != exceptional)
        .map(|c| Ok((c, is_killed_by(cg, n, exceptional, c)?)))
        .collect()
}

/// A current `i` and a candidate potential `v` on the vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowProblem<T> {
    pub current: Vec<T>,
    pub potential: Vec<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowVerdict<T> {
    /// Law (K): `sum over neighbors D of C of (v(C) - v(D)) = i(C)` everywhere.
    pub holds: bool,
    /// `d_* d^* v - i`.
    pub residuals: Vec<T>,
    /// Vertices with nonzero residual.
    pub violations: Vec<usize>,
    /// For a current entering at one vertex and leaving at one other, whether
    /// the potential is strictly between its values there at every other vertex.
    pub monotone: Option<bool>,
}

pub fn verify_flow<T>(fp: &FlowProblem<T>, lap: &Laplacian<T>) -> Result<FlowVerdict<T>>
where
    T: Integer + Signed + Clone,
{
    let n = lap.iota.rows();
    if fp.current.len() != n || fp.potential.len() != n {
        return Err(Error::InvalidInput(format!("flow vectors must have length {n}")));
    }
    if !fp.current.iter().fold(T::zero(), |a, x| a + x.clone()).is_zero() {
        return Err(Error::InvalidInput("current must have total weight zero".into()));
    }
    let iv = lap.iota.mul_vec(&fp.potential);
    let residuals: Vec<T> = iv.into_iter().zip(&fp.current).map(|(x, i)| -x - i.clone()).collect();
    let violations: Vec<usize> = (0..n).filter(|&c| !residuals[c].is_zero()).collect();
    let holds = violations.is_empty();
    let sources: Vec<usize> = (0..n).filter(|&c| fp.current[c].is_positive()).collect();
    let sinks: Vec<usize> = (0..n).filter(|&c| fp.current[c].is_negative()).collect();
    let monotone = match (holds, sources.as_slice(), sinks.as_slice()) {
        (true, [hi], [lo]) => {
            let v = &fp.potential;
            Some((0..n).filter(|&c| c != *hi && c != *lo).all(|c| v[*lo] < v[c] && v[c] < v[*hi]))
        }
        _ => None,
    };
    Ok(FlowVerdict { holds, residuals, violations, monotone })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisStatus {
    Verified,
    Failed,
    /// Taken as a modelling input.
    Assumed,
    /// Follows from an external bound whose applicability flags hold.
    Conditional,
}

/// The four hypotheses for a smooth model of `X_n` with base component `P0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothModelHypotheses {
    pub n: u64,
    pub base_component: usize,
    /// (1) the base point reduces to the designated component.
    pub base_point: HypothesisStatus,
    /// (2) exactly two singular points on the component, both non-disconnecting.
    pub two_non_disconnecting: HypothesisStatus,
    /// (3) `phi(X) cap J[n] = 0`, via `n < pq / 245` and the gonality bound.
    pub torsion_free_intersection: HypothesisStatus,
    pub torsion_threshold: f64,
    /// (4) `n (C - P0) not in image(iota)` for every other component `C`.
    pub no_n_torsion: HypothesisStatus,
    /// Components `C` with `n (C - P0)` in the image.
    pub killed: Vec<usize>,
}

impl SmoothModelHypotheses {
    pub fn computed_hold(&self) -> bool {
        self.two_non_disconnecting == HypothesisStatus::Verified && self.no_n_torsion == HypothesisStatus::Verified
    }
}

pub fn smooth_model_hypotheses<T>(
    g: &DesingularizedGraph,
    cg: &ComponentGroup<T>,
    p0: usize,
    n: u64,
) -> Result<SmoothModelHypotheses>
where
    T: Integer + Signed + Clone + From<i64> + Send + Sync,
{
    let (p, q) = (g.base.p, g.base.q);
    let incident = g.incident_edges(p0);
    let two = incident.len() == 2 && incident.iter().all(|&e| g.edge_is_non_disconnecting(e));
    let torsion_threshold = (p * q) as f64 / 245.0;
    let bound_applies = p >= 19 && q >= 245;
    let torsion_free_intersection = if !bound_applies {
        HypothesisStatus::Failed
    } else if (n as u128) * 245 < (p as u128) * (q as u128) {
        HypothesisStatus::Conditional
    } else {
        HypothesisStatus::Failed
    };
    let killed: Vec<usize> = killed_against_all(cg, n, p0)?.into_iter().filter(|&(_, k)| k).map(|(c, _)| c).collect();
    let status = |b: bool| if b { HypothesisStatus::Verified } else { HypothesisStatus::Failed };
    Ok(SmoothModelHypotheses {
        n,
        base_component: p0,
        base_point: HypothesisStatus::Assumed,
        two_non_disconnecting: status(two),
        torsion_free_intersection,
        torsion_threshold,
        no_n_torsion: status(killed.is_empty()),
        killed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(k: usize) -> Vec<(usize, usize, u32)> {
        (0..k).map(|i| (i, (i + 1) % k, 1)).collect()
    }

    #[test]
    fn two_cycle_laplacian() {
        let lap: Laplacian<i64> = laplacian(2, &[(0, 1, 1), (0, 1, 1)]).unwrap();
        assert_eq!(lap.iota.to_rows(), vec![vec![-2, 2], vec![2, -2]]);
        let cg = component_group(&lap);
        assert_eq!(cg.invariant_factors, vec![2]);
    }

    #[test]
    fn cycles_and_paths() {
        for k in 2..=12usize {
            let lap: Laplacian<i64> = laplacian(k, &cycle(k)).unwrap();
            let cg = component_group(&lap);
            assert_eq!(cg.invariant_factors, vec![k as i64]);
            assert!(is_killed_by(&cg, k as u64, 0, 1).unwrap());
            assert!(!is_killed_by(&cg, 1, 0, 1).unwrap());
        }
        let path: Vec<_> = (0..5).map(|i| (i, i + 1, 1)).collect();
        let cg = component_group(&laplacian::<i64>(6, &path).unwrap());
        assert!(cg.is_trivial());
        assert!(is_killed_by(&cg, 1, 0, 5).unwrap());
    }

    #[test]
    fn widths_rejected() {
        assert!(laplacian::<i64>(2, &[(0, 1, 2)]).is_err());
    }

    #[test]
    fn flow_law() {
        let lap: Laplacian<i64> = laplacian(2, &[(0, 1, 1), (0, 1, 1)]).unwrap();
        let ok = verify_flow(&FlowProblem { current: vec![2, -2], potential: vec![1, 0] }, &lap).unwrap();
        assert!(ok.holds);
        assert_eq!(ok.monotone, Some(true));
        let zero = verify_flow(&FlowProblem { current: vec![0, 0], potential: vec![5, 5] }, &lap).unwrap();
        assert!(zero.holds);
        let bad = verify_flow(&FlowProblem { current: vec![2, -2], potential: vec![0, 0] }, &lap).unwrap();
        assert!(!bad.holds);
        assert_eq!(bad.violations, vec![0, 1]);
        assert!(verify_flow(&FlowProblem { current: vec![1, 0], potential: vec![0, 0] }, &lap).is_err());
    }
}
