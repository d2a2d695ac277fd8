use super::{
    genus_and_gonality, local_point_conditions, satisfies_congruences, special_point_check, LocalCase,
    SpecialPointVerdict, FAMILY_251_SPLIT,
};
use crate::arith::{QuadDiscriminant, DEFAULT_ROOT_SEED};
use crate::component_group::{component_group, laplacian_of, smooth_model_hypotheses, HypothesisStatus};
use crate::error::{Error, Result};
use crate::graph::{
    build_graph_from_classes, degree_check, desingularize, exceptional_component, label_classes_seeded, quotient_by,
    DualGraph,
};
use crate::quaternion::{build_algebra, maximal_order, right_ideal_classes, ClassCache};
use crate::winding::{
    combine, cycle_shape_report, exceptional_edge, find_cycle_combination, gross_vector_on_quotient, lambda_from,
    suggest_discriminants,
};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScreenConfig {
    pub q: u64,
    pub p: Option<u64>,
    pub p_min: u64,
    pub p_max: u64,
    /// Discriminants `D` of the Gross vectors; suggested automatically when absent.
    pub discs: Option<Vec<u64>>,
    /// Search bound on `D` for suggested discriminants.
    pub disc_bound: u64,
    /// Largest `h(-D)` for suggested discriminants.
    pub max_class_number: u64,
    /// Brute-force bound on `D` for class numbers in the special-point check.
    pub class_number_bound: u64,
    /// A fixed combination of the Gross vectors to evaluate alongside the search.
    pub combination: Option<Vec<i64>>,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Worker threads; `0` lets rayon decide.
    pub threads: usize,
    pub seed: u64,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        Self {
            q: 251,
            p: None,
            p_min: 2,
            p_max: 1000,
            discs: None,
            disc_bound: 300,
            max_class_number: 2,
            class_number_bound: crate::arith::DEFAULT_CLASS_NUMBER_BOUND,
            combination: None,
            cache_dir: None,
            out: None,
            threads: 0,
            seed: DEFAULT_ROOT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedNoNontrivialPoints,
    CertifiedEmpty,
    HypothesesNotMet,
    UnsupportedCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Verified,
    Failed,
    Assumed,
    /// Holds given an external bound or an asymptotic statement.
    Conditional,
    NotComputed,
}

impl CheckStatus {
    fn acceptable(self) -> bool {
        matches!(self, CheckStatus::Verified | CheckStatus::Assumed | CheckStatus::Conditional)
    }
}

impl From<HypothesisStatus> for CheckStatus {
    fn from(h: HypothesisStatus) -> Self {
        match h {
            HypothesisStatus::Verified => CheckStatus::Verified,
            HypothesisStatus::Failed => CheckStatus::Failed,
            HypothesisStatus::Assumed => CheckStatus::Assumed,
            HypothesisStatus::Conditional => CheckStatus::Conditional,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub paper_anchor: String,
    pub status: CheckStatus,
    pub data: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub p: u64,
    pub q: u64,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks that must all be acceptable for a certified verdict.
pub const REQUIRED_CHECKS: [&str; 10] = [
    "local_conditions",
    "graph_genus",
    "quotient_degrees",
    "exceptional_component",
    "smooth_model.base_point",
    "smooth_model.two_singular_points",
    "smooth_model.torsion_intersection",
    "smooth_model.no_torsion",
    "gross_cycle",
    "large_p_regime",
];

fn check(name: &str, anchor: &str, status: CheckStatus, data: Value) -> Check {
    Check { name: name.into(), paper_anchor: anchor.into(), status, data }
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Verified
    } else {
        CheckStatus::Failed
    }
}

fn verdict_of(checks: &[Check]) -> Verdict {
    let required_ok = REQUIRED_CHECKS
        .iter()
        .all(|name| checks.iter().find(|c| c.name == *name).is_some_and(|c| c.status.acceptable()));
    if !required_ok {
        return Verdict::HypothesesNotMet;
    }
    match checks.iter().find(|c| c.name == "special_points") {
        Some(c) if c.status == CheckStatus::Verified => Verdict::CertifiedEmpty,
        _ => Verdict::CertifiedNoNontrivialPoints,
    }
}

fn preliminary_checks(p: u64, q: u64, config: &ScreenConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let bounds = genus_and_gonality(p, q)?;
    checks.push(check(
        "gonality_bound",
        "a nontrivial point of phi(X) in J[n] forces n >= pq/245 (Abramovich gonality bound, p >= 19, q >= 245)",
        if bounds.applicable && bounds.n_below_threshold { CheckStatus::Conditional } else { CheckStatus::Failed },
        json!({
            "genus": bounds.genus,
            "gonality_lower": bounds.gonality_lower.to_string(),
            "torsion_lower": bounds.torsion_lower.to_string(),
            "torsion_threshold": bounds.torsion_threshold.to_string(),
            "applicable": bounds.applicable,
            "n": bounds.n,
            "n_below_threshold": bounds.n_below_threshold,
            "margin": bounds.margin.to_string(),
        }),
    ));
    let special = special_point_check(p, q, config.class_number_bound)?;
    checks.push(check(
        "special_points",
        "a special rational point needs h(-p) = 1, h(-q) = 1 or h(-pq) = 2",
        match special.verdict {
            SpecialPointVerdict::NoSpecialPoints => CheckStatus::Verified,
            SpecialPointVerdict::SpecialPointPossible => CheckStatus::Failed,
            SpecialPointVerdict::Unknown => CheckStatus::NotComputed,
        },
        serde_json::to_value(&special)?,
    ));
    checks.push(check(
        "local_points_good_primes",
        "local points at primes of good reduction via the Sigma_l quantities",
        CheckStatus::NotComputed,
        json!({ "reason": "not computed (external definition)" }),
    ));
    Ok(checks)
}

/// Run the whole pipeline for `X^{pq} / w_q`. Hypothesis failures become
/// verdict fields; only internal errors abort.
pub fn certify(p: u64, q: u64, config: &ScreenConfig) -> Result<Certificate> {
    let local = local_point_conditions(p, q)?;
    let mut checks = vec![check(
        "local_conditions",
        "local points at p, q and infinity need (q/p) = -1 and p = 3 mod 4, or p = 1 mod 4 and q = 3 mod 4",
        status(local.supported),
        serde_json::to_value(&local)?,
    )];
    if q == 251 {
        checks.push(check(
            "family_congruences",
            "p = 5 mod 12, (-7/p) = 1, (-267/p) = 1 and (p/251) = -1",
            status(satisfies_congruences(p, q, &FAMILY_251_SPLIT)?),
            json!({ "p_mod_12": p % 12, "split": FAMILY_251_SPLIT }),
        ));
    }
    checks.extend(preliminary_checks(p, q, config)?);
    if !local.holds {
        return Ok(Certificate { version: CERTIFICATE_VERSION, p, q, verdict: Verdict::HypothesesNotMet, checks });
    }
    if local.case == LocalCase::Ramified {
        return Ok(Certificate { version: CERTIFICATE_VERSION, p, q, verdict: Verdict::UnsupportedCase, checks });
    }
    let g = build_labelled_graph(p, q, config)?;
    certify_graph(&g, config, checks)
}

/// Dual graph at `p` with `j`-labels, reading the class set from
/// `config.cache_dir` when set.
pub fn build_labelled_graph(p: u64, q: u64, config: &ScreenConfig) -> Result<DualGraph> {
    let alg = build_algebra(q)?;
    let order = maximal_order(&alg)?;
    let classes = match &config.cache_dir {
        Some(dir) => ClassCache::new(dir)?.classes(&order)?,
        None => right_ideal_classes(&order)?,
    };
    log::info!("root-splitting seed {:#x}", config.seed);
    let mut g = build_graph_from_classes(p, classes)?;
    g.labels = Some(label_classes_seeded(&g.classes, config.seed)?);
    Ok(g)
}

/// The graph-dependent part of [`certify`], appended to `checks`.
pub fn certify_graph(g: &DualGraph, config: &ScreenConfig, mut checks: Vec<Check>) -> Result<Certificate> {
    let (p, q) = (g.p, g.q);
    let done = |checks: Vec<Check>, verdict: Option<Verdict>| Certificate {
        version: CERTIFICATE_VERSION,
        p,
        q,
        verdict: verdict.unwrap_or_else(|| verdict_of(&checks)),
        checks,
    };
    let genus = super::shimura_genus(p, q)?;
    let rank = g.h1_rank();
    checks.push(check(
        "graph_genus",
        "rank of H_1 of the dual graph of the special fiber at p equals the genus of X^{pq}",
        status(rank as u64 == genus),
        json!({ "vertices": g.vertices.len(), "edges": g.edges.len(), "h1_rank": rank, "genus": genus,
                "root_seed": config.seed }),
    ));

    let qg = match quotient_by(g, &g.wq) {
        Ok(qg) => qg,
        Err(Error::UnsupportedCase(msg)) => {
            checks.push(check(
                "quotient",
                "quotient of the dual graph by w_q",
                CheckStatus::Failed,
                json!({ "error": msg }),
            ));
            return Ok(done(checks, Some(Verdict::UnsupportedCase)));
        }
        Err(e) => return Err(e),
    };
    let degrees = degree_check(&qg);
    checks.push(check(
        "quotient_degrees",
        "edge counts p+1, (p+1)/2, (p+3)/4, (p+3 +- 2)/6 at quotient vertices",
        status(degrees.iter().all(|d| d.holds)),
        json!({ "quotient_vertices": qg.vertices.len(), "quotient_edges": qg.edges.len(), "vertices": degrees }),
    ));

    let d = desingularize(&qg);
    let exceptional = match exceptional_component(&d) {
        Ok(v) => v,
        Err(Error::HypothesisViolation(msg)) => {
            checks.push(check(
                "exceptional_component",
                "unique F_p-rational component, meeting the rest in two points",
                CheckStatus::Failed,
                json!({ "error": msg }),
            ));
            return Ok(done(checks, None));
        }
        Err(e) => return Err(e),
    };
    let exc_edge = exceptional_edge(&d, exceptional)?;
    checks.push(check(
        "exceptional_component",
        "unique F_p-rational component, meeting the rest in two points",
        CheckStatus::Verified,
        json!({ "vertex": exceptional, "quotient_edge": exc_edge, "incident_edges": d.incident_edges(exceptional) }),
    ));

    let lap = laplacian_of::<BigInt>(&d)?;
    let cg = component_group(&lap);
    let n = p + 1;
    let hyp = smooth_model_hypotheses(&d, &cg, exceptional, n)?;
    let anchor = "hypotheses for a smooth model of X_n around the exceptional component";
    checks.push(check("smooth_model.base_point", anchor, hyp.base_point.into(), json!({ "component": exceptional })));
    checks.push(check(
        "smooth_model.two_singular_points",
        anchor,
        hyp.two_non_disconnecting.into(),
        json!({ "incident_edges": d.incident_edges(exceptional) }),
    ));
    checks.push(check(
        "smooth_model.torsion_intersection",
        anchor,
        hyp.torsion_free_intersection.into(),
        json!({ "n": n, "threshold": hyp.torsion_threshold, "conditional_on": "gonality lower bound (21/200)(g-1)" }),
    ));
    checks.push(check(
        "smooth_model.no_torsion",
        "(p+1)(J_exc - J) is not in the image of iota for every other component J",
        hyp.no_n_torsion.into(),
        json!({
            "n": n,
            "killed": hyp.killed,
            "components": d.vertices.len(),
            "invariant_factors": cg.invariant_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        }),
    ));

    let discs: Vec<u64> = match &config.discs {
        Some(ds) => ds.clone(),
        None => suggest_discriminants(p, q, config.disc_bound, config.max_class_number)?,
    };
    let vectors = discs
        .iter()
        .map(|&dd| gross_vector_on_quotient(g, &qg, QuadDiscriminant::new(dd)?))
        .collect::<Result<Vec<_>>>()?;
    let inapplicable: Vec<Value> =
        vectors.iter().filter(|v| !v.applicable).map(|v| json!({ "disc": v.disc.d(), "flag": v.flag })).collect();
    let search = find_cycle_combination(&d, &vectors, exc_edge)?;
    let anchor = "closed path made of Gross vectors through the exceptional edge with prime-to-p multiplicity";
    match &search.found {
        Some(c) => {
            let shape = cycle_shape_report(&d, c)?;
            checks.push(check(
                "gross_cycle",
                anchor,
                status(c.is_cycle && c.prime_to_p()),
                json!({
                    "discs": c.discs,
                    "lambda": c.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "exceptional_coefficient": c.exceptional_coefficient.to_string(),
                    "scaled_exceptional_mod_p": c.scaled_exceptional_mod_p,
                    "boundary_is_zero": c.is_cycle,
                    "support_components": shape.components.len(),
                    "splitting_at_p": shape.splitting,
                    "inapplicable": inapplicable,
                }),
            ));
        }
        None => checks.push(check(
            "gross_cycle",
            anchor,
            CheckStatus::Failed,
            json!({
                "discs": discs,
                "kernel": search.kernel.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "reason": "no cycle found",
                "inapplicable": inapplicable,
            }),
        )),
    }
    if let Some(lambda) = &config.combination {
        let c = combine(&d, &vectors, &lambda_from(lambda), exc_edge)?;
        let nonzero: Vec<Value> = c
            .boundary
            .iter()
            .enumerate()
            .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
            .map(|(v, x)| json!({ "vertex": v, "value": x.to_string() }))
            .collect();
        checks.push(check(
            "given_combination",
            "the listed signed sum of Gross vectors as a closed path",
            status(c.is_cycle && c.prime_to_p()),
            json!({
                "discs": c.discs,
                "lambda": lambda,
                "boundary_is_zero": c.is_cycle,
                "boundary_support": nonzero,
                "exceptional_coefficient": c.exceptional_coefficient.to_string(),
            }),
        ));
    }
    checks.push(check(
        "large_p_regime",
        "the smooth-model and no-rational-point statements are asymptotic in p",
        CheckStatus::Conditional,
        json!({
            "computed_at_this_p": ["component-group torsion test for n = p + 1", "closed Gross-vector path", "degrees"],
            "not_certified": "the ineffective threshold on p; the per-instance component-group test replaces it",
        }),
    ));
    Ok(done(checks, None))
}
