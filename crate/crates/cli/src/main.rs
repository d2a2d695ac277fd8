use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::json;
use shimura_core::arith::QuadDiscriminant;
use shimura_core::component_group::{component_group, laplacian_of, smooth_model_hypotheses};
use shimura_core::graph::{
    degree_check, desingularize, exceptional_component, quotient_by, to_dot, to_json, DualGraph, GraphExport,
};
use shimura_core::linalg::{smith_normal_form, Matrix};
use shimura_core::screen::{
    build_labelled_graph, certify, congruence_scan, shimura_genus, ScreenConfig, Verdict, FAMILY_251_SPLIT,
};
use shimura_core::winding::{
    combine, exceptional_edge, find_cycle_combination, gross_vector_on_quotient, lambda_from, suggest_discriminants,
};
use shimura_core::{Error, Int};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_HARD_ERROR: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

#[derive(Parser)]
#[command(name = "shimura-cert", version, about = "Dual graphs and rational-point certificates for X^{pq} / w_q")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML or JSON file with `ScreenConfig` fields; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    q: Option<u64>,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Comma-separated discriminants D (the discriminant is -D).
    #[arg(long, global = true, value_delimiter = ',')]
    discs: Option<Vec<u64>>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Primes p satisfying the family congruences for q.
    Scan {
        #[arg(long)]
        p_min: Option<u64>,
        #[arg(long)]
        p_max: Option<u64>,
        /// Discriminants that must split at p; defaults to the q = 251 family.
        #[arg(long, value_delimiter = ',')]
        split: Option<Vec<u64>>,
    },
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Full certificate for X^{pq} / w_q.
    Cert {
        /// Also evaluate this signed combination of the discriminants.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        combination: Option<Vec<i64>>,
    },
    /// Gross vectors on the quotient graph and the cycle search.
    Gross {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        combination: Option<Vec<i64>>,
    },
    /// Smith form of a JSON integer matrix, or the component group of the
    /// desingularized quotient graph at (p, q).
    Snf {
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Build the dual graph and its w_q quotient and print statistics.
    Build,
    /// Export a graph as DOT or JSON.
    Export {
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Kind::Dual)]
        kind: Kind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Dual,
    Quotient,
    Desingularized,
}

fn load_config(common: &Common) -> anyhow::Result<ScreenConfig> {
    let mut cfg = match &common.config {
        None => ScreenConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            match path.extension().and_then(|e| e.to_str()) {
                Some("json") => serde_json::from_str(&text)?,
                _ => toml::from_str(&text)?,
            }
        }
    };
    if let Some(q) = common.q {
        cfg.q = q;
    }
    if common.p.is_some() {
        cfg.p = common.p;
    }
    if common.discs.is_some() {
        cfg.discs = common.discs.clone();
    }
    if common.cache_dir.is_some() {
        cfg.cache_dir = common.cache_dir.clone();
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if cfg.q % 4 != 3 || !shimura_core::arith::is_prime(cfg.q) {
        bail!("q = {} must be a prime = 3 mod 4", cfg.q);
    }
    Ok(cfg)
}

fn require_p(cfg: &ScreenConfig) -> anyhow::Result<u64> {
    cfg.p.ok_or_else(|| anyhow!("--p is required"))
}

fn emit(cfg: &ScreenConfig, text: &str) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => write_file(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn graph(cfg: &ScreenConfig) -> anyhow::Result<DualGraph> {
    Ok(build_labelled_graph(require_p(cfg)?, cfg.q, cfg)?)
}

fn discs_for(cfg: &ScreenConfig, p: u64) -> anyhow::Result<Vec<u64>> {
    Ok(match &cfg.discs {
        Some(d) => d.clone(),
        None => suggest_discriminants(p, cfg.q, cfg.disc_bound, cfg.max_class_number)?,
    })
}

/// Returns `true` when the run hit the unsupported case.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = load_config(&cli.common)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global()?;
    }
    log::info!("q = {}, p = {:?}, seed = {:#x}", cfg.q, cfg.p, cfg.seed);
    match cli.command {
        Command::Scan { p_min, p_max, split } => {
            let lo = p_min.unwrap_or(cfg.p_min);
            let hi = p_max.unwrap_or(cfg.p_max);
            let split = split.unwrap_or_else(|| FAMILY_251_SPLIT.to_vec());
            let primes = congruence_scan(cfg.q, &split, lo, hi)?;
            emit(
                &cfg,
                &serde_json::to_string(&json!({ "q": cfg.q, "split": split, "range": [lo, hi], "primes": primes }))?,
            )?;
        }
        Command::Graph(GraphCommand::Build) => {
            let g = graph(&cfg)?;
            let qg = quotient_by(&g, &g.wq)?;
            let d = desingularize(&qg);
            let stats = json!({
                "p": g.p,
                "q": g.q,
                "vertices": g.vertices.len(),
                "edges": g.edges.len(),
                "h1_rank": g.h1_rank(),
                "genus": shimura_genus(g.p, g.q)?,
                "quotient_vertices": qg.vertices.len(),
                "quotient_edges": qg.edges.len(),
                "desingularized_vertices": d.vertices.len(),
                "desingularized_edges": d.edges.len(),
                "degrees": degree_check(&qg),
            });
            emit(&cfg, &serde_json::to_string_pretty(&stats)?)?;
        }
        Command::Graph(GraphCommand::Export { format, kind }) => {
            let g = graph(&cfg)?;
            let export = match kind {
                Kind::Dual => GraphExport::from_dual(&g),
                Kind::Quotient => GraphExport::from_quotient(&quotient_by(&g, &g.wq)?),
                Kind::Desingularized => GraphExport::from_desingularized(&desingularize(&quotient_by(&g, &g.wq)?)),
            };
            let text = match format {
                Format::Dot => to_dot(&export),
                Format::Json => to_json(&export)?,
            };
            emit(&cfg, &text)?;
        }
        Command::Cert { combination } => {
            let p = require_p(&cfg)?;
            let cfg = ScreenConfig { combination: combination.or(cfg.combination.clone()), ..cfg };
            let cert = certify(p, cfg.q, &cfg)?;
            emit(&cfg, &serde_json::to_string_pretty(&cert)?)?;
            eprintln!("verdict: {}", serde_json::to_value(cert.verdict)?.as_str().unwrap_or("?"));
            return Ok(cert.verdict == Verdict::UnsupportedCase);
        }
        Command::Gross { combination } => {
            let g = graph(&cfg)?;
            let qg = quotient_by(&g, &g.wq)?;
            let d = desingularize(&qg);
            let exc = exceptional_edge(&d, exceptional_component(&d)?)?;
            let discs = discs_for(&cfg, g.p)?;
            let vectors = discs
                .iter()
                .map(|&dd| gross_vector_on_quotient(&g, &qg, QuadDiscriminant::new(dd)?))
                .collect::<Result<Vec<_>, Error>>()?;
            let search = find_cycle_combination(&d, &vectors, exc)?;
            let given = combination
                .or(cfg.combination.clone())
                .map(|l| combine(&d, &vectors, &lambda_from(&l), exc))
                .transpose()?;
            let report = json!({
                "exceptional_edge": exc,
                "vectors": vectors.iter().map(|v| json!({
                    "disc": v.disc.d(),
                    "applicable": v.applicable,
                    "flag": v.flag,
                    "support": v.support(),
                    "quotient": v.quotient.as_ref().map(|c| c.iter().enumerate().filter(|(_, x)| !x.is_zero())
                        .map(|(e, x)| (e, x.to_string())).collect::<Vec<_>>()),
                })).collect::<Vec<_>>(),
                "search": search,
                "combination": given,
            });
            emit(&cfg, &serde_json::to_string_pretty(&report)?)?;
        }
        Command::Snf { matrix } => {
            let report = match matrix {
                Some(path) => {
                    let rows: Vec<Vec<i64>> = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
                    let rows: Vec<Vec<Int>> =
                        rows.into_iter().map(|r| r.into_iter().map(Int::from).collect()).collect();
                    let s = smith_normal_form(&Matrix::from_rows(rows));
                    json!({ "diagonal": s.diagonal.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "rank": s.rank })
                }
                None => {
                    let g = graph(&cfg)?;
                    let d = desingularize(&quotient_by(&g, &g.wq)?);
                    let lap = laplacian_of::<Int>(&d)?;
                    let cg = component_group(&lap);
                    let exc = exceptional_component(&d)?;
                    let hyp = smooth_model_hypotheses(&d, &cg, exc, g.p + 1)?;
                    json!({
                        "components": d.vertices.len(),
                        "invariant_factors": cg.invariant_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "free_rank": cg.free_rank,
                        "order": cg.order().map(|x| x.to_string()),
                        "exceptional": exc,
                        "n": g.p + 1,
                        "killed": hyp.killed,
                    })
                }
            };
            emit(&cfg, &serde_json::to_string_pretty(&report)?)?;
        }
    }
    Ok(false)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_UNSUPPORTED),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::UnsupportedCase(_)) | Some(Error::UnsupportedRegime(_)) => ExitCode::from(EXIT_UNSUPPORTED),
                _ => ExitCode::from(EXIT_HARD_ERROR),
            }
        }
    }
}
