//! One PASS/FAIL line per acceptance criterion. Tolerances are exact unless a
//! runtime bound is stated next to the criterion.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use shimura_core::arith::{
    class_number, kronecker, supersingular_polynomial, PrimeFieldElem, QuadDiscriminant, QuadExtField,
};
use shimura_core::component_group::{
    component_group, is_killed_by, laplacian, laplacian_of, smooth_model_hypotheses, verify_flow, FlowProblem,
};
use shimura_core::graph::{
    build_graph, degree_check, desingularize, exceptional_component, label_vertices_by_j, quotient_by, DegreeCase,
    DesingularizedGraph, DualGraph, QuotientGraph,
};
use shimura_core::quaternion::{build_algebra, maximal_order, right_ideal_classes, BrandtContext, ClassSet};
use shimura_core::screen::shimura_genus;
use shimura_core::winding::{
    boundary, combine, dual_ends, exceptional_edge, find_cycle_combination, gross_vector, gross_vector_on_quotient,
    lambda_from, GrossVector,
};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

/// Criteria whose literal statement does not hold; each still prints FAIL and
/// the test checks that it keeps failing. The README records the analysis.
const KNOWN_UNATTAINABLE: &[u32] = &[8];

const SEED: u64 = 0x5eed_0251;

struct Fixture {
    g: DualGraph,
    qg: QuotientGraph,
    d: DesingularizedGraph,
    build_time: Duration,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let start = Instant::now();
        let g = label_vertices_by_j(build_graph(137, 251).unwrap()).unwrap();
        let build_time = start.elapsed();
        let qg = quotient_by(&g, &g.wq).unwrap();
        let d = desingularize(&qg);
        Fixture { g, qg, d, build_time }
    })
}

fn classes(q: u64) -> ClassSet {
    right_ideal_classes(&maximal_order(&build_algebra(q).unwrap()).unwrap()).unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

type Outcome = (bool, String);

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ss = supersingular_polynomial(251).unwrap();
    let elapsed = start.elapsed();
    let mut linear: Vec<i64> = ss.linear_roots.iter().map(|r| r.signed()).collect();
    let mut expected_linear = vec![0, -29, -19, 64, 4, 24, 30, 35, 101, -112, -66, -52, -44, -38];
    linear.sort();
    expected_linear.sort();
    // x^2 + c1 x + c0 as (c1, c0), reduced to the signed range
    let f = |v: i64| PrimeFieldElem::new(v, 251).signed();
    let mut quadratics: Vec<(i64, i64)> =
        ss.quadratic_factors.iter().map(|[c0, c1]| (c1.signed(), c0.signed())).collect();
    let mut expected_quadratics: Vec<(i64, i64)> =
        [(-60, -81), (-81, -68), (-105, 116), (93, 91)].iter().map(|&(a, b)| (f(a), f(b))).collect();
    quadratics.sort();
    expected_quadratics.sort();
    let pass = linear == expected_linear && quadratics == expected_quadratics && elapsed < Duration::from_secs(1);
    (
        pass,
        format!(
            "{} linear, {} quadratic factors, {:.3}s (bound 1s)",
            linear.len(),
            quadratics.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let set = classes(251);
    let mut w = set.weights();
    w.sort();
    let mut expected = vec![1u32; 20];
    expected.extend([2, 3]);
    let mass = set.mass();
    let pass = set.len() == 22 && w == expected && mass == BigRational::new(250.into(), 24.into());
    (pass, format!("{} classes, mass {mass}", set.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut checked = 0;
    for q in [11u64, 23, 251] {
        let set = classes(q);
        let ctx = BrandtContext::new(&set).unwrap();
        let ns: Vec<u64> = primes.iter().copied().filter(|&n| n != q).collect();
        let mats: Vec<_> = ns.iter().map(|&n| ctx.matrix(n).unwrap()).collect();
        let eis: Vec<BigRational> = set.weights().iter().map(|&w| BigRational::new(1.into(), w.into())).collect();
        for (b, &n) in mats.iter().zip(&ns) {
            if !b.row_sums().iter().all(|&s| s as u64 == n + 1) {
                return (false, format!("row sums of B({n}) for q = {q}"));
            }
            for j in 0..set.len() {
                let s: BigRational = (0..set.len()).map(|i| &eis[i] * BigInt::from(b.entries[(i, j)])).sum();
                if s != &eis[j] * BigInt::from(n + 1) {
                    return (false, format!("Eis not a left eigenvector of B({n}) for q = {q}"));
                }
            }
            checked += 1;
        }
        for (a, &m) in mats.iter().zip(&ns) {
            for (b, &n) in mats.iter().zip(&ns) {
                if m < n && a.entries.mul_mat(&b.entries) != ctx.matrix(m * n).unwrap().entries {
                    return (false, format!("B({m})B({n}) != B({}) for q = {q}", m * n));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    (
        elapsed < Duration::from_secs(60),
        format!("{checked} matrices and all coprime products, {:.1}s (bound 60s)", elapsed.as_secs_f64()),
    )
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (p, q) in [(3u64, 11u64), (13, 11)] {
        let g = build_graph(p, q).unwrap();
        let genus = shimura_genus(p, q).unwrap();
        pass &= g.h1_rank() as u64 == genus;
        parts.push(format!("({p},{q}): rank {} genus {genus}", g.h1_rank()));
    }
    let f = fixture();
    let genus = shimura_genus(137, 251).unwrap();
    pass &= f.g.h1_rank() as u64 == genus && genus == 2833;
    pass &= f.build_time < Duration::from_secs(600);
    parts.push(format!(
        "(137,251): rank {} genus {genus}, built in {:.1}s (bound 600s)",
        f.g.h1_rank(),
        f.build_time.as_secs_f64()
    ));
    (pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let checks = degree_check(&fixture().qg);
    let all = checks.iter().all(|c| c.holds);
    let j1728 = checks.iter().filter(|c| c.case == DegreeCase::J1728).all(|c| c.degree == 35);
    let j0: Vec<String> = checks
        .iter()
        .filter(|c| c.case == DegreeCase::J0)
        .map(|c| format!("degree {} sign {:?}", c.degree, c.sign))
        .collect();
    let mut degrees: Vec<u64> = checks.iter().map(|c| c.degree).collect();
    degrees.sort();
    degrees.dedup();
    (
        all && j1728 && !j0.is_empty(),
        format!("{} vertices, degrees {degrees:?}, j = 0: {}", checks.len(), j0.join(", ")),
    )
}

fn criterion_6() -> Outcome {
    let d = &fixture().d;
    match exceptional_component(d) {
        Ok(v) => {
            let inc = d.incident_edges(v);
            let ok = inc.len() == 2 && inc.iter().all(|&e| d.edge_is_non_disconnecting(e));
            (ok, format!("vertex {v}, incident edges {inc:?}"))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn j_support(g: &DualGraph, v: &GrossVector) -> Vec<i64> {
    let b = boundary(g.vertices.len(), &dual_ends(g), &v.coefficients);
    let mut js: Vec<i64> = (0..b.len())
        .filter(|&i| b[i] != rat(0))
        .map(|i| g.j_label(i).and_then(|j| j.base_value()).map(|x| x.signed()).unwrap_or(i64::MIN))
        .collect();
    js.sort();
    js.dedup();
    js
}

fn criterion_7() -> Outcome {
    let g = &fixture().g;
    let k = QuadExtField::new(251);
    let f = |v: i64| k.elem(v, 0).base_value().unwrap().signed();
    let expected: [(u64, Vec<i64>); 4] =
        [(4, vec![f(1728)]), (28, vec![f(64)]), (36, vec![f(64), f(-19)]), (267, vec![f(-19), f(-29)])];
    let mut pass = true;
    let mut parts = Vec::new();
    for (disc, mut js) in expected {
        js.sort();
        let v = gross_vector(g, QuadDiscriminant::new(disc).unwrap()).unwrap();
        let found = j_support(g, &v);
        pass &= found == js;
        parts.push(format!("e_{disc}: {found:?}"));
    }
    (pass, parts.join("; "))
}

fn quotient_vectors(discs: &[u64]) -> Vec<GrossVector> {
    let f = fixture();
    discs.iter().map(|&d| gross_vector_on_quotient(&f.g, &f.qg, QuadDiscriminant::new(d).unwrap()).unwrap()).collect()
}

fn criterion_8() -> Outcome {
    let d = &fixture().d;
    let exc = exceptional_edge(d, exceptional_component(d).unwrap()).unwrap();
    let vs = quotient_vectors(&[4, 267, 36, 28]);
    let c = combine(d, &vs, &lambda_from(&[1, -1, 1, -1]), exc).unwrap();
    let support: Vec<String> =
        c.boundary.iter().enumerate().filter(|(_, x)| **x != rat(0)).map(|(v, x)| format!("{v}:{x}")).collect();
    let pass = c.is_cycle && c.prime_to_p();
    (
        pass,
        format!(
            "e_4 - e_267 + e_36 - e_28 has boundary {{{}}}, exceptional coefficient {}",
            support.join(", "),
            c.exceptional_coefficient
        ),
    )
}

fn criterion_8_kernel() -> String {
    let d = &fixture().d;
    let exc = exceptional_edge(d, exceptional_component(d).unwrap()).unwrap();
    let vs = quotient_vectors(&[4, 267, 36, 28]);
    let search = find_cycle_combination(d, &vs, exc).unwrap();
    match search.found {
        Some(c) => format!(
            "kernel cycle lambda = {:?} over (4, 267, 36, 28): boundary zero = {}, exceptional coefficient {}, 6x = {} mod 137",
            c.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            c.is_cycle,
            c.exceptional_coefficient,
            c.scaled_exceptional_mod_p
        ),
        None => "no cycle in the span".into(),
    }
}

fn criterion_9() -> Outcome {
    let d = &fixture().d;
    let lap = laplacian_of::<BigInt>(d).unwrap();
    let cg = component_group(&lap);
    let exc = exceptional_component(d).unwrap();
    let hyp = smooth_model_hypotheses(d, &cg, exc, 138).unwrap();
    (
        hyp.killed.is_empty(),
        format!(
            "{} components, {} invariant factors, killed {:?}",
            d.vertices.len(),
            cg.invariant_factors.len(),
            hyp.killed
        ),
    )
}

fn spanning_trees(n: usize, edges: &[(usize, usize, u32)]) -> u64 {
    let m = edges.len();
    (0u32..(1 << m))
        .filter(|mask| mask.count_ones() as usize == n - 1)
        .filter(|mask| {
            let mut parent: Vec<usize> = (0..n).collect();
            let find = |parent: &mut Vec<usize>, mut x: usize| {
                while parent[x] != x {
                    x = parent[x];
                }
                x
            };
            (0..m).filter(|e| mask & (1 << e) != 0).all(|e| {
                let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
                parent[a] = b;
                a != b
            })
        })
        .count() as u64
}

/// Analytic class number formula for the fundamental part, then
/// `h(f^2 d) = h(d) f / [O* : O_f*] prod (1 - chi(l) / l)`.
fn analytic_class_number(d: u64) -> u64 {
    let disc = QuadDiscriminant::new(d).unwrap();
    let fd = disc.fundamental();
    let chi = |n: u64| kronecker(-(fd as i64), n as i64).unwrap() as i64;
    let w: i64 = match fd {
        3 => 6,
        4 => 4,
        _ => 2,
    };
    let h0 = -(1..fd).map(|a| chi(a) * a as i64).sum::<i64>() * w / (2 * fd as i64);
    let f = disc.conductor();
    if f == 1 {
        return h0 as u64;
    }
    let (mut num, mut den) = (h0 * f as i64, w / 2);
    let (mut m, mut l) = (f, 2);
    while m > 1 {
        if m % l == 0 {
            num *= l as i64 - chi(l);
            den *= l as i64;
            while m % l == 0 {
                m /= l;
            }
        }
        l += 1;
    }
    (num / den) as u64
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut parts = Vec::new();
    // matrix-tree
    for _ in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let mut edges: Vec<(usize, usize, u32)> = (1..n).map(|i| (rng.gen_range(0..i), i, 1)).collect();
        for _ in 0..rng.gen_range(0..=5) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                edges.push((a, b, 1));
            }
        }
        let cg = component_group(&laplacian::<i64>(n, &edges).unwrap());
        if cg.smith.torsion_order() as u64 != spanning_trees(n, &edges) {
            return (false, format!("matrix-tree fails on {edges:?}"));
        }
        // membership monotonicity
        for c in 1..n {
            for k in 1..6u64 {
                if is_killed_by(&cg, k, 0, c).unwrap() && !is_killed_by(&cg, 2 * k, 0, c).unwrap() {
                    return (false, format!("monotonicity fails on {edges:?}"));
                }
            }
        }
    }
    parts.push("matrix-tree and monotonicity on 200 graphs".to_string());
    for _ in 0..2000 {
        let (a, b, n) = (rng.gen_range(-999i64..1000), rng.gen_range(-999i64..1000), rng.gen_range(1i64..1000));
        if kronecker(a * b, n).unwrap() != kronecker(a, n).unwrap() * kronecker(b, n).unwrap() {
            return (false, format!("Kronecker not multiplicative at ({a}, {b}, {n})"));
        }
    }
    parts.push("Kronecker on 2000 triples".to_string());
    let mut count = 0;
    for d in (3..=10000u64).filter(|d| d % 4 == 0 || d % 4 == 3) {
        let h = class_number(QuadDiscriminant::new(d).unwrap());
        if h != analytic_class_number(d) {
            return (false, format!("h(-{d}) = {h} disagrees with the analytic formula"));
        }
        count += 1;
    }
    parts.push(format!("class numbers for all {count} D <= 10000"));
    // flow law on a 4-cycle with a chord
    let lap = laplacian::<i64>(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (0, 2, 1)]).unwrap();
    let potential = vec![0, 1, 3, 2];
    let current: Vec<i64> = lap.iota.mul_vec(&potential).into_iter().map(|x| -x).collect();
    let good = verify_flow(&FlowProblem { current: current.clone(), potential }, &lap).unwrap().holds;
    let bad = verify_flow(&FlowProblem { current, potential: vec![0, 1, 3, 3] }, &lap).unwrap().holds;
    let path = laplacian::<i64>(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
    let mono = verify_flow(&FlowProblem { current: vec![-1, 0, 1], potential: vec![0, 1, 2] }, &path).unwrap();
    parts.push("flow law on hand-built instances".to_string());
    (good && !bad && mono.holds && mono.monotone == Some(true), parts.join("; "))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_shimura-cert")).args(args).output().expect("run shimura-cert");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn criterion_11() -> Outcome {
    let (code, text) = run_cli(&["cert", "--q", "251", "--p", "137", "--discs", "4,28,36,267"]);
    let cert: Value = serde_json::from_str(&text).unwrap();
    let conditional = ["gonality_bound", "smooth_model.torsion_intersection", "large_p_regime"];
    let mut bad = Vec::new();
    for c in cert["checks"].as_array().unwrap() {
        let (name, status) = (c["name"].as_str().unwrap(), c["status"].as_str().unwrap());
        let ok = match name {
            n if conditional.contains(&n) => status == "conditional",
            "smooth_model.base_point" => status == "assumed",
            "local_points_good_primes" => status == "not-computed",
            _ => status == "verified",
        };
        if !ok {
            bad.push(format!("{name}={status}"));
        }
    }
    // numeric fields re-verified independently
    let genus_check = cert["checks"].as_array().unwrap().iter().find(|c| c["name"] == "graph_genus").unwrap();
    let recomputed = genus_check["data"]["genus"] == 2833 && genus_check["data"]["h1_rank"] == 2833;
    let cycle = cert["checks"].as_array().unwrap().iter().find(|c| c["name"] == "gross_cycle").unwrap();
    let exc: i64 = cycle["data"]["exceptional_coefficient"].as_str().unwrap().parse().unwrap();
    let cycle_ok = (6 * exc).rem_euclid(137) == cycle["data"]["scaled_exceptional_mod_p"].as_i64().unwrap();
    let verdict = cert["verdict"].as_str().unwrap().to_string();

    let (scan_code, scan) = run_cli(&["scan", "--q", "251", "--p-max", "100000"]);
    let scan: Value = serde_json::from_str(&scan).unwrap();
    let primes: Vec<i64> = scan["primes"].as_array().unwrap().iter().map(|p| p.as_i64().unwrap()).collect();
    let scan_ok = primes.contains(&137)
        && primes.iter().all(|&p| {
            p % 12 == 5
                && kronecker(-7, p).unwrap() == 1
                && kronecker(-267, p).unwrap() == 1
                && kronecker(p, 251).unwrap() == -1
        });
    let pass = code == 0
        && scan_code == 0
        && bad.is_empty()
        && recomputed
        && cycle_ok
        && scan_ok
        && verdict.starts_with("certified");
    (pass, format!("verdict {verdict}, unexpected statuses {bad:?}, scan found {} primes up to 1e5", primes.len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "supersingular factorization mod 251", criterion_1),
        (2, "class set of the maximal order, q = 251", criterion_2),
        (3, "Brandt matrices", criterion_3),
        (4, "rank H_1 equals genus", criterion_4),
        (5, "degrees at quotient vertices", criterion_5),
        (6, "exceptional component", criterion_6),
        (7, "Gross vector boundary supports", criterion_7),
        (8, "cycle e_4 - e_267 + e_36 - e_28", criterion_8),
        (9, "(p+1)-torsion test in the component group", criterion_9),
        (10, "property suites", criterion_10),
        (11, "end-to-end certificate and scan", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let (pass, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        // written to stdout directly so the lines survive output capture
        let mut out = std::io::stdout().lock();
        writeln!(out, "{} [{id:>2}] {name}: {detail}", if pass { "PASS" } else { "FAIL" }).unwrap();
        if id == 8 {
            writeln!(out, "INFO [ 8] {}", criterion_8_kernel()).unwrap();
        }
        if pass == KNOWN_UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
