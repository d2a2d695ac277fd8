use proptest::prelude::*;
use shimura_core::component_group::{component_group, is_killed_by, laplacian, verify_flow, FlowProblem};
use shimura_core::linalg::{smith_normal_form, Matrix};

/// Connected multigraph: a random spanning tree plus extra edges, no loops.
fn connected_multigraph() -> impl Strategy<Value = (usize, Vec<(usize, usize, u32)>)> {
    (2usize..=7).prop_flat_map(|n| {
        let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
        let extra = prop::collection::vec((0..n, 0..n), 0..=4);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize, u32)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1, 1)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a, b, 1)));
            (n, edges)
        })
    })
}

fn is_spanning_tree(n: usize, edges: &[(usize, usize, u32)], chosen: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &e in chosen {
        let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Spanning trees by enumerating every `(n - 1)`-subset of edges.
fn spanning_trees(n: usize, edges: &[(usize, usize, u32)]) -> u64 {
    let m = edges.len();
    let mut count = 0;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
        if is_spanning_tree(n, edges, &chosen) {
            count += 1;
        }
    }
    count
}

proptest! {
    #[test]
    fn component_group_order_counts_spanning_trees((n, edges) in connected_multigraph()) {
        let lap = laplacian::<i64>(n, &edges).unwrap();
        let cg = component_group(&lap);
        prop_assert_eq!(cg.free_rank, 0);
        prop_assert_eq!(cg.smith.torsion_order() as u64, spanning_trees(n, &edges));
    }

    #[test]
    fn smith_form_reconstructs((n, edges) in connected_multigraph()) {
        let lap = laplacian::<i64>(n, &edges).unwrap();
        let s = smith_normal_form(&lap.iota);
        let d = s.u.mul_mat(&lap.iota).mul_mat(&s.v);
        let expected = Matrix::from_fn(n, n, |i, j| if i == j { s.diagonal[i] } else { 0 });
        prop_assert_eq!(d, expected);
        for w in s.diagonal[..s.rank].windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn killing_is_monotone_in_n((n, edges) in connected_multigraph(), k in 1u64..8, m in 1u64..5) {
        let lap = laplacian::<i64>(n, &edges).unwrap();
        let cg = component_group(&lap);
        for c in 1..n {
            if is_killed_by(&cg, k, 0, c).unwrap() {
                prop_assert!(is_killed_by(&cg, k * m, 0, c).unwrap());
            }
        }
        // |Phi| kills everything
        let order = cg.smith.torsion_order() as u64;
        for c in 1..n {
            prop_assert!(is_killed_by(&cg, order, 0, c).unwrap());
        }
    }

    #[test]
    fn potentials_solve_the_flow_law((n, edges) in connected_multigraph(), v in prop::collection::vec(-20i64..20, 7)) {
        let lap = laplacian::<i64>(n, &edges).unwrap();
        let potential = v[..n].to_vec();
        let current: Vec<i64> = lap.iota.mul_vec(&potential).into_iter().map(|x| -x).collect();
        let ok = verify_flow(&FlowProblem { current: current.clone(), potential: potential.clone() }, &lap).unwrap();
        prop_assert!(ok.holds);
        let mut shifted = potential.clone();
        shifted[0] += 1;
        let bad = verify_flow(&FlowProblem { current, potential: shifted }, &lap).unwrap();
        prop_assert!(!bad.holds);
    }
}

#[test]
fn path_flow_is_monotone() {
    // path 0 - 1 - 2 - 3, unit current from 3 to 0
    let lap = laplacian::<i64>(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
    let fp = FlowProblem { current: vec![-1, 0, 0, 1], potential: vec![0, 1, 2, 3] };
    let verdict = verify_flow(&fp, &lap).unwrap();
    assert!(verdict.holds);
    assert_eq!(verdict.monotone, Some(true));
}
