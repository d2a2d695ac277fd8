use super::DualGraph;
use crate::arith::{supersingular_polynomial_seeded, FieldElem, Poly, QuadExtElem, QuadExtField, DEFAULT_ROOT_SEED};
use crate::error::{Error, Result};
use crate::quaternion::{brandt_matrix, ClassSet};
use serde::{Deserialize, Serialize};

/// Cap on the number of labellings kept.
pub const MAX_LABELLINGS: usize = 64;

/// Supersingular `j`-invariants attached to the maximal classes, found by
/// matching Brandt matrices against modular-polynomial adjacency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JLabelling {
    pub q: u64,
    /// Every labelling compatible with `B(2)` and `B(3)`; `solutions[s][class]`.
    /// Labellings come at least in Frobenius-conjugate pairs.
    pub solutions: Vec<Vec<QuadExtElem>>,
    /// Whether the match used the transposed Brandt matrices.
    pub transposed: bool,
    /// Whether the search stopped at [`MAX_LABELLINGS`].
    pub truncated: bool,
}

/// `Phi_l(X, Y)` as `(a, b, c)` for the term `c X^a Y^b`, for `l` in `{2, 3}`.
pub fn modular_polynomial(l: u64) -> Result<Vec<(u32, u32, i128)>> {
    let sym = |a: u32, b: u32, c: i128| -> Vec<(u32, u32, i128)> {
        if a == b {
            vec![(a, b, c)]
        } else {
            vec![(a, b, c), (b, a, c)]
        }
    };
    let parts: Vec<Vec<(u32, u32, i128)>> = match l {
        2 => vec![
            sym(3, 0, 1),
            sym(2, 2, -1),
            sym(2, 1, 1488),
            sym(2, 0, -162000),
            sym(1, 1, 40773375),
            sym(1, 0, 8748000000),
            sym(0, 0, -157464000000000),
        ],
        3 => vec![
            sym(4, 0, 1),
            sym(3, 3, -1),
            sym(3, 2, 2232),
            sym(3, 1, -1069956),
            sym(3, 0, 36864000),
            sym(2, 2, 2587918086),
            sym(2, 1, 8900222976000),
            sym(2, 0, 452984832000000),
            sym(1, 1, -770845966336000000),
            sym(1, 0, 1855425871872000000000),
        ],
        _ => return Err(Error::UnsupportedRegime(format!("modular polynomial of level {l}"))),
    };
    Ok(parts.into_iter().flatten().collect())
}

/// `Phi_l(x, Y)` over `F_{q^2}`.
fn specialize(terms: &[(u32, u32, i128)], x: QuadExtElem) -> Poly<QuadExtElem> {
    let k = x.field();
    let q = k.q() as i128;
    let deg = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
    let mut coeffs = vec![k.zero(); deg + 1];
    for &(a, b, c) in terms {
        let c = k.elem(c.rem_euclid(q) as i64, 0);
        coeffs[b as usize] = coeffs[b as usize] + c * x.pow(a as u128);
    }
    Poly::new(coeffs, k.zero())
}

/// `A[r][s]` = multiplicity of `roots[s]` as a root of `Phi_l(roots[r], Y)`.
pub fn isogeny_adjacency(l: u64, roots: &[QuadExtElem]) -> Result<Vec<Vec<u32>>> {
    let terms = modular_polynomial(l)?;
    roots
        .iter()
        .map(|&r| {
            let f = specialize(&terms, r);
            let mut row = Vec::with_capacity(roots.len());
            for &s in roots {
                let lin = Poly::linear(s);
                let mut rest = f.clone();
                let mut m = 0;
                loop {
                    let (quot, rem) = rest.div_rem(&lin);
                    if !rem.is_zero() {
                        break;
                    }
                    m += 1;
                    rest = quot;
                }
                row.push(m);
            }
            if row.iter().sum::<u32>() as u64 != l + 1 {
                return Err(Error::Internal(format!("Phi_{l}({r}, Y) has a non-supersingular root")));
            }
            Ok(row)
        })
        .collect()
}

struct Search<'a> {
    weights: &'a [u32],
    candidates: Vec<Vec<usize>>,
    brandt: [&'a [Vec<i64>]; 2],
    adjacency: [&'a [Vec<u32>]; 2],
    assigned: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
    truncated: bool,
}

impl Search<'_> {
    fn compatible(&self, class: usize, root: usize) -> bool {
        (0..=class).all(|c| {
            let r = if c == class { root } else { self.assigned[c] };
            (0..2).all(|k| {
                self.brandt[k][class][c] == self.adjacency[k][root][r] as i64
                    && self.brandt[k][c][class] == self.adjacency[k][r][root] as i64
            })
        })
    }

    fn run(&mut self, class: usize) {
        if self.found.len() >= MAX_LABELLINGS {
            self.truncated = true;
            return;
        }
        if class == self.weights.len() {
            self.found.push(self.assigned.clone());
            return;
        }
        for idx in 0..self.candidates[class].len() {
            let root = self.candidates[class][idx];
            if self.used[root] || !self.compatible(class, root) {
                continue;
            }
            self.used[root] = true;
            self.assigned.push(root);
            self.run(class + 1);
            self.assigned.pop();
            self.used[root] = false;
        }
    }
}

fn as_rows(b: &crate::linalg::Matrix<i64>, transpose: bool) -> Vec<Vec<i64>> {
    if transpose {
        b.transpose().to_rows()
    } else {
        b.to_rows()
    }
}

/// Labellings of the maximal classes by supersingular `j`-invariants. Weight 2
/// forces `j = 1728` and weight 3 forces `j = 0`.
pub fn label_classes(classes: &ClassSet) -> Result<JLabelling> {
    label_classes_seeded(classes, DEFAULT_ROOT_SEED)
}

/// [`label_classes`] with an explicit seed for splitting the supersingular polynomial.
pub fn label_classes_seeded(classes: &ClassSet, seed: u64) -> Result<JLabelling> {
    let q = classes.order.algebra.q;
    if classes.order.level != 1 {
        return Err(Error::InvalidInput("j-labels need the maximal class set".into()));
    }
    let ss = supersingular_polynomial_seeded(q, seed)?;
    let roots = ss.roots.clone();
    if roots.len() != classes.len() {
        return Err(Error::Internal(format!("{} supersingular j against {} classes", roots.len(), classes.len())));
    }
    let k = QuadExtField::new(q);
    let (j0, j1728) = (k.elem(0, 0), k.elem(1728, 0));
    let weights = classes.weights();
    let candidates: Vec<Vec<usize>> = weights
        .iter()
        .map(|&w| {
            (0..roots.len())
                .filter(|&r| match w {
                    2 => roots[r] == j1728,
                    3 => roots[r] == j0,
                    _ => roots[r] != j1728 && roots[r] != j0,
                })
                .collect()
        })
        .collect();
    let a2 = isogeny_adjacency(2, &roots)?;
    let a3 = isogeny_adjacency(3, &roots)?;
    let b2 = brandt_matrix(classes, 2)?;
    let b3 = brandt_matrix(classes, 3)?;
    for transposed in [false, true] {
        let (r2, r3) = (as_rows(&b2.entries, transposed), as_rows(&b3.entries, transposed));
        let mut search = Search {
            weights: &weights,
            candidates: candidates.clone(),
            brandt: [&r2, &r3],
            adjacency: [&a2, &a3],
            assigned: Vec::new(),
            used: vec![false; roots.len()],
            found: Vec::new(),
            truncated: false,
        };
        search.run(0);
        if !search.found.is_empty() {
            let solutions = search.found.iter().map(|s| s.iter().map(|&r| roots[r]).collect()).collect();
            return Ok(JLabelling { q, solutions, transposed, truncated: search.truncated });
        }
    }
    Err(Error::Internal("no j-labelling matches B(2) and B(3)".into()))
}

/// Attach [`JLabelling`] to the graph.
pub fn label_vertices_by_j(mut g: DualGraph) -> Result<DualGraph> {
    g.labels = Some(label_classes(&g.classes)?);
    Ok(g)
}

impl JLabelling {
    /// Whether every labelling sends `w_q` on classes to Frobenius on `j`.
    pub fn frobenius_matches(&self, wq_classes: &[usize]) -> bool {
        self.solutions.iter().all(|s| (0..s.len()).all(|c| s[wq_classes[c]] == s[c].frobenius()))
    }

    /// Position of the class labelled `j` in the first labelling.
    pub fn class_of(&self, j: &QuadExtElem) -> Option<usize> {
        self.solutions.first()?.iter().position(|x| x == j)
    }
}
