use super::{DesingularizedGraph, DualGraph, QVertex, QVertexKind, QuotientGraph};
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportVertex {
    pub index: usize,
    /// `V1`, `V2` or `exceptional`.
    pub copy: String,
    pub classes: Vec<usize>,
    pub weight: u32,
    pub j: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportEdge {
    pub index: usize,
    pub source: usize,
    pub target: usize,
    pub width: u32,
}

/// Serializable view of any of the graphs, with stable indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphExport {
    pub p: u64,
    pub q: u64,
    pub kind: String,
    pub vertices: Vec<ExportVertex>,
    pub edges: Vec<ExportEdge>,
    /// Edge permutation and sign of `w_p`, when it acts on this graph.
    pub wp: Option<(Vec<usize>, Vec<i8>)>,
    pub wq: Option<(Vec<usize>, Vec<i8>)>,
}

fn copy_name(v: &QVertex) -> (String, Vec<usize>) {
    match &v.kind {
        QVertexKind::Orbit { copy, classes } => (format!("{copy:?}"), classes.clone()),
        QVertexKind::Exceptional { .. } => ("exceptional".into(), vec![]),
    }
}

impl GraphExport {
    pub fn from_dual(g: &DualGraph) -> Self {
        let vertices = g
            .vertices
            .iter()
            .enumerate()
            .map(|(index, v)| ExportVertex {
                index,
                copy: format!("{:?}", v.copy),
                classes: vec![v.class],
                weight: v.weight,
                j: g.j_label(index).map(|j| j.to_string()),
            })
            .collect();
        let edges = g
            .edges
            .iter()
            .enumerate()
            .map(|(index, e)| ExportEdge { index, source: e.source, target: e.target, width: e.width })
            .collect();
        Self {
            p: g.p,
            q: g.q,
            kind: "dual".into(),
            vertices,
            edges,
            wp: Some((g.wp.edge_perm.clone(), g.wp.edge_sign.clone())),
            wq: Some((g.wq.edge_perm.clone(), g.wq.edge_sign.clone())),
        }
    }

    fn vertices_of(labels: Option<&super::JLabelling>, vs: &[QVertex]) -> Vec<ExportVertex> {
        vs.iter()
            .enumerate()
            .map(|(index, v)| {
                let (copy, classes) = copy_name(v);
                let j = labels
                    .filter(|_| !classes.is_empty())
                    .map(|l| classes.iter().map(|&k| l.solutions[0][k].to_string()).collect::<Vec<_>>().join(","));
                ExportVertex { index, copy, classes, weight: v.weight, j }
            })
            .collect()
    }

    pub fn from_quotient(g: &QuotientGraph) -> Self {
        let edges = g
            .edges
            .iter()
            .enumerate()
            .map(|(index, e)| ExportEdge { index, source: e.source, target: e.target, width: e.width })
            .collect();
        Self {
            p: g.p,
            q: g.q,
            kind: "quotient".into(),
            vertices: Self::vertices_of(g.labels.as_ref(), &g.vertices),
            edges,
            wp: Some((g.residual.edge_perm.clone(), g.residual.edge_sign.clone())),
            wq: None,
        }
    }

    pub fn from_desingularized(g: &DesingularizedGraph) -> Self {
        let edges = g
            .edges
            .iter()
            .enumerate()
            .map(|(index, e)| ExportEdge { index, source: e.source, target: e.target, width: e.width })
            .collect();
        Self {
            p: g.base.p,
            q: g.base.q,
            kind: "desingularized".into(),
            vertices: Self::vertices_of(g.base.labels.as_ref(), &g.vertices),
            edges,
            wp: None,
            wq: None,
        }
    }
}

/// Graphviz, vertex attributes `copy`, `j`, `w` and edge attribute `width`.
pub fn to_dot(g: &GraphExport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}_p{}_q{}\" {{", g.kind, g.p, g.q);
    for v in &g.vertices {
        let _ = writeln!(
            out,
            "  v{} [copy=\"{}\", j=\"{}\", w={}];",
            v.index,
            v.copy,
            v.j.as_deref().unwrap_or(""),
            v.weight
        );
    }
    for e in &g.edges {
        let _ = writeln!(out, "  v{} -- v{} [width={}];", e.source, e.target, e.width);
    }
    out.push_str("}\n");
    out
}

pub fn to_json(g: &GraphExport) -> Result<String> {
    Ok(serde_json::to_string_pretty(g)?)
}
