//! The dual graph of the special fiber at `p` of the Shimura curve of
//! discriminant `pq`, its Atkin-Lehner involutions and quotients.

mod equidistribution;
mod export;
mod jlabel;
mod quotient;

pub use equidistribution::{equidistribution_report, EquidistributionReport, PairDeviation};
pub use export::{to_dot, to_json, ExportEdge, ExportVertex, GraphExport};
pub use jlabel::{
    isogeny_adjacency, label_classes, label_classes_seeded, label_vertices_by_j, modular_polynomial, JLabelling,
    MAX_LABELLINGS,
};
pub use quotient::{
    degree_check, desingularize, exceptional_component, quotient_by, DegreeCase, DegreeCheck, DesingularizedGraph,
    QEdge, QVertex, QVertexKind, QuotientGraph,
};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::quaternion::{
    build_algebra, maximal_order, neighbors, right_ideal_classes, ClassSet, OrderLattice, QLattice, Quaternion,
    QuaternionAlgebra, RatQuaternion, RightIdeal,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Which copy of the maximal classes a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Copy {
    V1,
    V2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub copy: Copy,
    /// Index into the maximal class set.
    pub class: usize,
    pub weight: u32,
}

/// A level-`p` Eichler class `O_L(I_a) cap O_L(J)` for a `p`-neighbor `J` of `I_a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Edge {
    /// Vertex in `V1`.
    pub source: usize,
    /// Vertex in `V2`.
    pub target: usize,
    /// `|units of the Eichler order / +-1|`.
    pub width: u32,
    /// Position of `J` in the neighbor list of the source class.
    pub neighbor: usize,
    pub ideal: RightIdeal,
    pub eichler: QLattice,
}

/// An involution on vertices and edges. `edge_sign[e] = -1` when the image
/// of `e` is traversed with source and target exchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ALAction {
    pub prime: u64,
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub edge_sign: Vec<i8>,
}

impl ALAction {
    pub fn is_involution(&self) -> bool {
        self.vertex_perm.iter().enumerate().all(|(v, &w)| self.vertex_perm[w] == v)
            && self.edge_perm.iter().enumerate().all(|(e, &f)| self.edge_perm[f] == e)
    }

    pub fn fixed_vertices(&self) -> Vec<usize> {
        (0..self.vertex_perm.len()).filter(|&v| self.vertex_perm[v] == v).collect()
    }

    pub fn fixed_edges(&self) -> Vec<usize> {
        (0..self.edge_perm.len()).filter(|&e| self.edge_perm[e] == e).collect()
    }
}

/// `G(X^{pq}_{F_p})`: two copies of the maximal classes of `B_{q, inf}`,
/// joined by the level-`p` Eichler classes.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub p: u64,
    pub q: u64,
    pub algebra: QuaternionAlgebra,
    pub classes: ClassSet,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub wp: ALAction,
    pub wq: ALAction,
    pub labels: Option<JLabelling>,
}

impl DualGraph {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn vertex_index(&self, copy: Copy, class: usize) -> usize {
        match copy {
            Copy::V1 => class,
            Copy::V2 => self.class_count() + class,
        }
    }

    /// `E - V + 1` per connected component, summed.
    pub fn h1_rank(&self) -> usize {
        let ends: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.source, e.target)).collect();
        cycle_rank(self.vertices.len(), &ends)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.source == v || e.target == v).count()
    }

    /// Number of edges between `V1` class `a` and `V2` class `b`.
    pub fn edge_count_between(&self, a: usize, b: usize) -> usize {
        let (s, t) = (self.vertex_index(Copy::V1, a), self.vertex_index(Copy::V2, b));
        self.edges.iter().filter(|e| e.source == s && e.target == t).count()
    }

    /// The `j`-label of a vertex under the first labelling solution.
    pub fn j_label(&self, v: usize) -> Option<crate::arith::QuadExtElem> {
        self.labels.as_ref().map(|l| l.solutions[0][self.vertices[v].class])
    }
}

/// Rank of `H_1` for a multigraph given by edge endpoints.
pub fn cycle_rank(n: usize, ends: &[(usize, usize)]) -> usize {
    ends.len() + component_count(n, ends) - n
}

/// Number of connected components.
pub fn component_count(n: usize, ends: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut comps = n;
    for &(a, b) in ends {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps
}

fn int_quaternion(c: [i64; 4]) -> RatQuaternion {
    Quaternion::new(c.map(|x| BigRational::from_integer(BigInt::from(x))))
}

struct ClassNeighbors {
    ideals: Vec<RightIdeal>,
    /// Edge-orbit index (local) of each neighbor.
    orbit_of: Vec<usize>,
    /// `(representative neighbor, stabilizer size / 2)` per orbit.
    orbits: Vec<(usize, u32)>,
}

fn class_neighbors(
    alg: &QuaternionAlgebra,
    order: &OrderLattice,
    set: &ClassSet,
    a: usize,
    p: u64,
) -> Result<ClassNeighbors> {
    let cls = &set.classes[a];
    let ideals = neighbors(alg, &order.lattice, &cls.ideal, p)?;
    let index: HashMap<&QLattice, usize> = ideals.iter().enumerate().map(|(k, j)| (&j.lattice, k)).collect();
    let mut orbit_of = vec![usize::MAX; ideals.len()];
    let mut orbits = Vec::new();
    for k in 0..ideals.len() {
        if orbit_of[k] != usize::MAX {
            continue;
        }
        let mut stab = 0u32;
        for u in &cls.units {
            let image = ideals[k].lattice.left_mul(alg, u);
            let m = *index.get(&image).ok_or_else(|| Error::Internal("unit image is not a neighbor".into()))?;
            orbit_of[m] = orbits.len();
            if m == k {
                stab += 1;
            }
        }
        orbits.push((k, stab / 2));
    }
    Ok(ClassNeighbors { ideals, orbit_of, orbits })
}

/// Build `G(X^{pq}_{F_p})` together with `w_p` and `w_q`.
pub fn build_graph(p: u64, q: u64) -> Result<DualGraph> {
    if !is_prime(p) || p == 2 || p == q {
        return Err(Error::InvalidInput(format!("p = {p} must be an odd prime different from q = {q}")));
    }
    let alg = build_algebra(q)?;
    let order = maximal_order(&alg)?;
    let classes = right_ideal_classes(&order)?;
    build_graph_from_classes(p, classes)
}

/// As [`build_graph`], reusing a maximal class set.
pub fn build_graph_from_classes(p: u64, classes: ClassSet) -> Result<DualGraph> {
    let order = classes.order.clone();
    let alg = order.algebra;
    let q = alg.q;
    if order.level != 1 {
        return Err(Error::InvalidInput("graph vertices come from a maximal order".into()));
    }
    if !is_prime(p) || p == 2 || p == q {
        return Err(Error::InvalidInput(format!("p = {p} must be an odd prime different from q = {q}")));
    }
    let h = classes.len();
    let per_class: Vec<ClassNeighbors> =
        (0..h).into_par_iter().map(|a| class_neighbors(&alg, &order, &classes, a, p)).collect::<Result<_>>()?;

    // edge ids, class by class
    let mut first_edge = Vec::with_capacity(h);
    let mut count = 0;
    for cn in &per_class {
        first_edge.push(count);
        count += cn.orbits.len();
    }
    let edge_id = |a: usize, k: usize| first_edge[a] + per_class[a].orbit_of[k];
    let mut lookup: HashMap<&QLattice, (usize, usize)> = HashMap::new();
    for (a, cn) in per_class.iter().enumerate() {
        for (k, j) in cn.ideals.iter().enumerate() {
            lookup.insert(&j.lattice, (a, k));
        }
    }

    let reps: Vec<(usize, usize, u32)> =
        per_class.iter().enumerate().flat_map(|(a, cn)| cn.orbits.iter().map(move |&(k, w)| (a, k, w))).collect();
    let identified: Vec<(usize, RatQuaternion)> =
        reps.par_iter().map(|&(a, k, _)| classes.identify(&per_class[a].ideals[k])).collect::<Result<_>>()?;

    let edges: Vec<Edge> = reps
        .par_iter()
        .zip(identified.par_iter())
        .map(|(&(a, k, width), (b, _))| {
            let ideal = per_class[a].ideals[k].clone();
            let eichler = classes.classes[a].left_order.intersect(&ideal.left_order(&alg));
            Edge { source: a, target: h + b, width, neighbor: k, ideal, eichler }
        })
        .collect();

    let vertices: Vec<Vertex> = [Copy::V1, Copy::V2]
        .into_iter()
        .flat_map(|copy| {
            classes.classes.iter().enumerate().map(move |(c, cls)| Vertex { copy, class: c, weight: cls.weight })
        })
        .collect();

    // w_p: (I_a, J = alpha I_b) -> (I_b, p alpha^{-1} I_a)
    let p_rat = BigRational::from_integer(BigInt::from(p));
    let wp_edges: Vec<usize> = reps
        .par_iter()
        .zip(identified.par_iter())
        .map(|(&(a, _, _), (b, alpha))| {
            let inv = alg.inverse(alpha).ok_or_else(|| Error::Internal("zero isomorphism".into()))?;
            let image = classes.classes[a].ideal.lattice.left_mul(&alg, &inv.scale(&p_rat));
            let &(c, m) = lookup.get(&image).ok_or_else(|| Error::Internal("w_p image is not a neighbor".into()))?;
            if c != *b {
                return Err(Error::Internal("w_p image lies over the wrong class".into()));
            }
            Ok(edge_id(c, m))
        })
        .collect::<Result<_>>()?;
    let wp = ALAction {
        prime: p,
        vertex_perm: (0..2 * h).map(|v| if v < h { v + h } else { v - h }).collect(),
        edge_perm: wp_edges,
        edge_sign: vec![-1; edges.len()],
    };

    // w_q: right multiplication by j, which generates the two-sided ideal of norm q
    let jq = int_quaternion([0, 0, 1, 0]);
    let class_images: Vec<(usize, RatQuaternion)> =
        classes.classes.par_iter().map(|c| classes.identify(&c.ideal.right_mul(&alg, &jq))).collect::<Result<_>>()?;
    let wq_edges: Vec<usize> = reps
        .par_iter()
        .map(|&(a, k, _)| {
            let (c, gamma) = &class_images[a];
            let ginv = alg.inverse(gamma).ok_or_else(|| Error::Internal("zero isomorphism".into()))?;
            let image = per_class[a].ideals[k].lattice.right_mul(&alg, &jq).left_mul(&alg, &ginv);
            let &(d, m) = lookup.get(&image).ok_or_else(|| Error::Internal("w_q image is not a neighbor".into()))?;
            if d != *c {
                return Err(Error::Internal("w_q image lies over the wrong class".into()));
            }
            Ok(edge_id(d, m))
        })
        .collect::<Result<_>>()?;
    let wq = ALAction {
        prime: q,
        vertex_perm: (0..2 * h).map(|v| if v < h { class_images[v].0 } else { h + class_images[v - h].0 }).collect(),
        edge_perm: wq_edges,
        edge_sign: vec![1; edges.len()],
    };

    let g = DualGraph { p, q, algebra: alg, classes, vertices, edges, wp, wq, labels: None };
    check_action(&g, &g.wp)?;
    check_action(&g, &g.wq)?;
    Ok(g)
}

/// Involution, compatibility with endpoints, and the bipartition behavior.
fn check_action(g: &DualGraph, a: &ALAction) -> Result<()> {
    if !a.is_involution() {
        return Err(Error::Internal(format!("w_{} is not an involution", a.prime)));
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let img = &g.edges[a.edge_perm[e]];
        let (s, t) = if a.edge_sign[e] < 0 { (img.target, img.source) } else { (img.source, img.target) };
        if a.vertex_perm[edge.source] != s || a.vertex_perm[edge.target] != t {
            return Err(Error::Internal(format!("w_{} does not respect the endpoints of edge {e}", a.prime)));
        }
        if img.width != edge.width {
            return Err(Error::Internal(format!("w_{} changes a width", a.prime)));
        }
    }
    Ok(())
}

/// The involution `w_l` for `l` in `{p, q}`.
pub fn atkin_lehner(g: &DualGraph, l: u64) -> Result<ALAction> {
    if l == g.p {
        Ok(g.wp.clone())
    } else if l == g.q {
        Ok(g.wq.clone())
    } else {
        Err(Error::InvalidInput(format!("{l} does not divide {}", g.p * g.q)))
    }
}
