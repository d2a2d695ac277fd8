use super::{component_count, cycle_rank, ALAction, Copy, DualGraph, JLabelling};
use crate::arith::kronecker;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QVertexKind {
    /// An orbit of vertices of the covering graph, given by class indices.
    Orbit { copy: Copy, classes: Vec<usize> },
    /// Interior vertex `position` (from the source) of the chain replacing `edge`.
    Exceptional { edge: usize, position: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QVertex {
    pub kind: QVertexKind,
    /// Class weight; `0` on exceptional vertices.
    pub weight: u32,
    /// Covering-graph vertices in the orbit.
    pub members: Vec<usize>,
}

impl QVertex {
    pub fn is_exceptional(&self) -> bool {
        matches!(self.kind, QVertexKind::Exceptional { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QEdge {
    pub source: usize,
    pub target: usize,
    pub width: u32,
    /// Covering-graph edges in the orbit.
    pub members: Vec<usize>,
}

/// `G / w` for an orientation-preserving involution `w`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub p: u64,
    pub q: u64,
    pub vertices: Vec<QVertex>,
    pub edges: Vec<QEdge>,
    /// Covering vertex to quotient vertex.
    pub vertex_of: Vec<usize>,
    /// Covering edge to quotient edge.
    pub edge_of: Vec<usize>,
    /// The other Atkin-Lehner involution, descended.
    pub residual: ALAction,
    pub labels: Option<JLabelling>,
}

impl QuotientGraph {
    pub fn ends(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.source, e.target)).collect()
    }

    pub fn h1_rank(&self) -> usize {
        cycle_rank(self.vertices.len(), &self.ends())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.source == v || e.target == v).count()
    }

    /// Quotient vertex of the given copy and class.
    pub fn vertex_for(&self, copy: Copy, class: usize) -> Option<usize> {
        self.vertices.iter().position(
            |v| matches!(&v.kind, QVertexKind::Orbit { copy: c, classes } if *c == copy && classes.contains(&class)),
        )
    }
}

/// Quotient of `g` by `a`, which must preserve orientation and fix no edge.
/// The other involution of `g` descends to [`QuotientGraph::residual`].
pub fn quotient_by(g: &DualGraph, a: &ALAction) -> Result<QuotientGraph> {
    if a.edge_sign.iter().any(|&s| s < 0) {
        return Err(Error::UnsupportedRegime(format!("quotient by w_{} would fold edges", a.prime)));
    }
    let fixed = a.fixed_edges();
    if !fixed.is_empty() {
        return Err(Error::UnsupportedCase(format!(
            "w_{} fixes {} edges together with their endpoints (ramified case)",
            a.prime,
            fixed.len()
        )));
    }
    let other = if a.prime == g.q {
        &g.wp
    } else if a.prime == g.p {
        &g.wq
    } else {
        return Err(Error::InvalidInput(format!("w_{} is not an involution of this graph", a.prime)));
    };
    for v in 0..g.vertices.len() {
        if a.vertex_perm[other.vertex_perm[v]] != other.vertex_perm[a.vertex_perm[v]] {
            return Err(Error::Internal("Atkin-Lehner involutions do not commute on vertices".into()));
        }
    }
    for e in 0..g.edges.len() {
        if a.edge_perm[other.edge_perm[e]] != other.edge_perm[a.edge_perm[e]] {
            return Err(Error::Internal("Atkin-Lehner involutions do not commute on edges".into()));
        }
    }

    let mut vertex_of = vec![usize::MAX; g.vertices.len()];
    let mut vertices = Vec::new();
    for v in 0..g.vertices.len() {
        if vertex_of[v] != usize::MAX {
            continue;
        }
        let w = a.vertex_perm[v];
        let members = if w == v { vec![v] } else { vec![v, w] };
        let base = &g.vertices[v];
        let classes = members.iter().map(|&m| g.vertices[m].class).collect();
        for &m in &members {
            vertex_of[m] = vertices.len();
        }
        vertices.push(QVertex { kind: QVertexKind::Orbit { copy: base.copy, classes }, weight: base.weight, members });
    }
    let mut edge_of = vec![usize::MAX; g.edges.len()];
    let mut edges = Vec::new();
    for e in 0..g.edges.len() {
        if edge_of[e] != usize::MAX {
            continue;
        }
        let f = a.edge_perm[e];
        edge_of[e] = edges.len();
        edge_of[f] = edges.len();
        let base = &g.edges[e];
        edges.push(QEdge {
            source: vertex_of[base.source],
            target: vertex_of[base.target],
            width: base.width,
            members: vec![e, f],
        });
    }
    let residual = ALAction {
        prime: other.prime,
        vertex_perm: vertices.iter().map(|v| vertex_of[other.vertex_perm[v.members[0]]]).collect(),
        edge_perm: edges.iter().map(|e| edge_of[other.edge_perm[e.members[0]]]).collect(),
        edge_sign: edges.iter().map(|e| other.edge_sign[e.members[0]]).collect(),
    };
    Ok(QuotientGraph { p: g.p, q: g.q, vertices, edges, vertex_of, edge_of, residual, labels: g.labels.clone() })
}

/// A quotient graph with every width-`e` edge replaced by a chain of `e`
/// unit edges through `e - 1` exceptional vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesingularizedGraph {
    pub base: QuotientGraph,
    /// Base vertices keep their indices; exceptional vertices follow.
    pub vertices: Vec<QVertex>,
    pub edges: Vec<QEdge>,
    /// Chain of each base edge, from its source to its target.
    pub segments: Vec<Vec<usize>>,
}

impl DesingularizedGraph {
    pub fn ends(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.source, e.target)).collect()
    }

    pub fn h1_rank(&self) -> usize {
        cycle_rank(self.vertices.len(), &self.ends())
    }

    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].source == v || self.edges[e].target == v).collect()
    }

    pub fn is_connected(&self) -> bool {
        component_count(self.vertices.len(), &self.ends()) == 1
    }

    /// Whether deleting edge `e` keeps the graph connected.
    pub fn edge_is_non_disconnecting(&self, e: usize) -> bool {
        let ends: Vec<(usize, usize)> =
            self.edges.iter().enumerate().filter(|&(f, _)| f != e).map(|(_, x)| (x.source, x.target)).collect();
        component_count(self.vertices.len(), &ends) == component_count(self.vertices.len(), &self.ends())
    }

    /// Whether deleting vertex `v` and its edges keeps the rest connected.
    pub fn vertex_is_non_disconnecting(&self, v: usize) -> bool {
        let n = self.vertices.len();
        let relabel = |x: usize| if x > v { x - 1 } else { x };
        let ends: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|x| x.source != v && x.target != v)
            .map(|x| (relabel(x.source), relabel(x.target)))
            .collect();
        component_count(n - 1, &ends) == 1
    }
}

pub fn desingularize(g: &QuotientGraph) -> DesingularizedGraph {
    let mut vertices = g.vertices.clone();
    let mut edges = Vec::with_capacity(g.edges.len());
    let mut segments = Vec::with_capacity(g.edges.len());
    for (k, e) in g.edges.iter().enumerate() {
        let mut chain = Vec::with_capacity(e.width as usize);
        let mut prev = e.source;
        for position in 1..e.width {
            let x = vertices.len();
            vertices.push(QVertex { kind: QVertexKind::Exceptional { edge: k, position }, weight: 0, members: vec![] });
            chain.push(edges.len());
            edges.push(QEdge { source: prev, target: x, width: 1, members: e.members.clone() });
            prev = x;
        }
        chain.push(edges.len());
        edges.push(QEdge { source: prev, target: e.target, width: 1, members: e.members.clone() });
        segments.push(chain);
    }
    DesingularizedGraph { base: g.clone(), vertices, edges, segments }
}

/// The unique `F_p`-rational component: the middle vertex of the chain of an
/// even-width edge reversed by `w_p`.
pub fn exceptional_component(d: &DesingularizedGraph) -> Result<usize> {
    let (p, q) = (d.base.p, d.base.q);
    if p % 4 != 1 || q % 4 != 3 || kronecker(q as i64, p as i64)? != -1 {
        return Err(Error::HypothesisViolation(format!("({p}, {q}) needs p = 1 mod 4, q = 3 mod 4 and (q/p) = -1")));
    }
    let wp = &d.base.residual;
    if wp.prime != p {
        return Err(Error::InvalidInput("quotient must be taken by w_q".into()));
    }
    let candidates: Vec<usize> = (0..d.base.edges.len())
        .filter(|&e| wp.edge_perm[e] == e && wp.edge_sign[e] < 0 && d.base.edges[e].width % 2 == 0)
        .map(|e| {
            let chain = &d.segments[e];
            d.edges[chain[chain.len() / 2 - 1]].target
        })
        .collect();
    match candidates.as_slice() {
        [v] => {
            let deg = d.incident_edges(*v).len();
            if deg != 2 {
                return Err(Error::Internal(format!("exceptional vertex has degree {deg}")));
            }
            Ok(*v)
        }
        _ => Err(Error::HypothesisViolation(format!("{} candidate F_p-rational components", candidates.len()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeCase {
    /// `j` in `F_{q^2} \ F_q`.
    Conjugate,
    /// `j` in `F_q`, `j != 0, 1728`.
    Rational,
    J1728,
    J0,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub vertex: usize,
    pub case: DegreeCase,
    pub degree: u64,
    /// Admissible degrees for the case.
    pub expected: Vec<u64>,
    /// For `j = 0`: `+1` if the degree is `(p + 5)/6`, `-1` if `(p + 1)/6`.
    pub sign: Option<i8>,
    /// Whether the case read off the `j`-label agrees with the orbit and weight.
    pub label_consistent: bool,
    pub holds: bool,
}

/// Edge counts at every non-exceptional quotient vertex against the four
/// cases `p + 1`, `(p + 1)/2`, `(p + 3)/4`, `(p + 3 +- 2)/6`.
pub fn degree_check(g: &QuotientGraph) -> Vec<DegreeCheck> {
    let p = g.p;
    let q = g.q;
    let j1728 = 1728 % q;
    (0..g.vertices.len())
        .filter(|&v| !g.vertices[v].is_exceptional())
        .map(|v| {
            let vert = &g.vertices[v];
            let case = if vert.members.len() == 2 {
                DegreeCase::Conjugate
            } else {
                match vert.weight {
                    2 => DegreeCase::J1728,
                    3 => DegreeCase::J0,
                    _ => DegreeCase::Rational,
                }
            };
            let label_consistent = match (&g.labels, &vert.kind) {
                (Some(l), QVertexKind::Orbit { classes, .. }) => {
                    let j = l.solutions[0][classes[0]];
                    let from_label = match j.base_value() {
                        None => DegreeCase::Conjugate,
                        Some(x) if x.value() == 0 => DegreeCase::J0,
                        Some(x) if x.value() == j1728 => DegreeCase::J1728,
                        Some(_) => DegreeCase::Rational,
                    };
                    from_label == case
                }
                _ => true,
            };
            let degree = g.degree(v) as u64;
            let expected = match case {
                DegreeCase::Conjugate => vec![p + 1],
                DegreeCase::Rational => vec![(p + 1) / 2],
                DegreeCase::J1728 => vec![(p + 3) / 4],
                DegreeCase::J0 => vec![(p + 1) / 6, (p + 5) / 6],
            };
            let sign = match case {
                DegreeCase::J0 if degree == (p + 5) / 6 && (p + 5) % 6 == 0 => Some(1),
                DegreeCase::J0 if degree == (p + 1) / 6 && (p + 1) % 6 == 0 => Some(-1),
                _ => None,
            };
            let divisible = match case {
                DegreeCase::Conjugate => true,
                DegreeCase::Rational => (p + 1) % 2 == 0,
                DegreeCase::J1728 => (p + 3) % 4 == 0,
                DegreeCase::J0 => sign.is_some(),
            };
            let holds = divisible && expected.contains(&degree) && label_consistent;
            DegreeCheck { vertex: v, case, degree, expected, sign, label_consistent, holds }
        })
        .collect()
}
