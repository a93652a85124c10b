//! `dpt`: discrete potential theory on weighted planar graphs.
//!
//! Subcommands generate domains, solve harmonic problems, compute the
//! conformal invariants of quadrilaterals, run separator and annulus
//! surgery, sample random walks, and verify the comparability brackets over
//! the built-in corpus. Exit codes: 0 success, 1 bracket failures, 2 usage
//! or input errors.

mod formats;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use dpt_core::harness::{self, assemble_report, default_corpus, CorpusSpec};
use dpt_core::invariants::quad_invariants;
use dpt_core::montecarlo::{
    estimate_hm, intersection_ball_probability, intersection_probability,
    intersection_probability_loop_erased,
};
use dpt_core::network::Endpoint;
use dpt_core::potential::DirichletSolver;
use dpt_core::surgery::{annulus, log_hm_vs_el, separator_split, separator_verify, SplitStatus};

use formats::GeneratorSpec;

#[derive(Parser)]
#[command(name = "dpt", version, about = "Discrete potential theory on weighted planar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph or domain file and report its structural constants.
    Validate(ValidateArgs),
    /// Generate a domain from a family and write it to a file.
    Gen(GenArgs),
    /// Solve a harmonic problem on a domain.
    Solve(SolveArgs),
    /// Compute the invariants of a quadrilateral.
    Invariants(InvariantsArgs),
    /// Split a domain by the ratio of partition functions to two arcs.
    Separator(SeparatorArgs),
    /// Harmonic measure against extremal length through the annulus.
    AnnulusEl(AnnulusArgs),
    /// Monte Carlo estimates.
    Mc(McArgs),
    /// Run the verification corpus and report bracket failures.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Also run the quadratic pairwise edge-crossing check.
    #[arg(long)]
    planarity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Family name: plus, rect, square_sym, fjord, bottleneck,
    /// perturbed_grid, spiral.
    #[arg(long)]
    family: String,
    /// Comma-separated key=value parameters, e.g. m=3,n=2.
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Operation: hm, green, z, r.
    #[arg(long)]
    op: String,
    /// Interior vertex id (hm, green).
    #[arg(long)]
    u: Option<usize>,
    /// Boundary edge indices, comma separated (hm: target set; r: arcs).
    #[arg(long)]
    edges: Option<String>,
    /// Endpoint for z: v:<vertex-id> or e:<boundary-index>.
    #[arg(long)]
    x: Option<String>,
    /// Endpoint for z: v:<vertex-id> or e:<boundary-index>.
    #[arg(long)]
    y: Option<String>,
    /// Boundary edge index (r).
    #[arg(long)]
    at: Option<usize>,
    /// First arc for r, comma separated boundary indices.
    #[arg(long)]
    a: Option<String>,
    /// Second arc for r.
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantsArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Four boundary-edge indices, counterclockwise: a,b,c,d.
    #[arg(long)]
    quad: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeparatorArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Arc A as start,end boundary indices (counterclockwise inclusive).
    #[arg(long = "A", value_name = "I,J")]
    a: String,
    /// Arc B as start,end boundary indices.
    #[arg(long = "B", value_name = "P,Q")]
    b: String,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnnulusArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Interior vertex id at the annulus center.
    #[arg(long)]
    u: usize,
    /// Arc as start,end boundary indices.
    #[arg(long, value_name = "I,J")]
    arc: String,
    #[arg(long, default_value_t = 0.25)]
    rho0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Operation: hm, xsq, xsq-le, ball.
    #[arg(long)]
    op: String,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Interior vertex id (hm, ball).
    #[arg(long)]
    u: Option<usize>,
    /// Boundary edge indices, comma separated (hm target).
    #[arg(long)]
    edges: Option<String>,
    /// Four boundary-edge indices a,b,c,d (xsq).
    #[arg(long)]
    quad: Option<String>,
    /// Boundary edge index (ball).
    #[arg(long)]
    a: Option<usize>,
    /// Boundary edge index (ball).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Corpus spec JSON; the built-in corpus when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the one-row-per-configuration CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print only failures.
    #[arg(long)]
    quiet: bool,
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<usize>().context("expected a comma-separated list of indices"))
        .collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let v = parse_list(s)?;
    if v.len() != 2 {
        bail!("expected two comma-separated indices");
    }
    Ok((v[0], v[1]))
}

fn parse_params(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for part in s.split(',').filter(|t| !t.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("parameters must be key=value pairs"))?;
        map.insert(k.trim().to_string(), v.trim().parse::<f64>()?);
    }
    Ok(map)
}

fn parse_endpoint(dom: &dpt_core::domain::DiscreteDomain, s: &str) -> Result<Endpoint> {
    if let Some(id) = s.strip_prefix("v:") {
        let v: usize = id.parse()?;
        Ok(Endpoint::Interior(
            dom.interior_index(v).map_err(|e| anyhow!("{e}"))?,
        ))
    } else if let Some(idx) = s.strip_prefix("e:") {
        let b: usize = idx.parse()?;
        if b >= dom.boundary().len() {
            bail!("boundary index {b} out of range");
        }
        Ok(Endpoint::Boundary(b))
    } else {
        bail!("endpoints are v:<vertex-id> or e:<boundary-index>");
    }
}

fn emit(value: &serde_json::Value, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate(args) => {
            let dom = formats::load_domain(&args.domain)?;
            if args.planarity {
                dom.graph()
                    .check_planarity()
                    .map_err(|e| anyhow!("planarity check failed: {e}"))?;
            }
            let report = dom.graph().validate();
            emit(
                &json!({
                    "varpi0": report.varpi0,
                    "eta0": report.eta0,
                    "kappa0": report.kappa0,
                    "nu0": report.nu0,
                    "nu0_samples": report.nu0_samples,
                    "satisfied": {
                        "a": report.satisfied_a,
                        "b": report.satisfied_b,
                        "c": report.satisfied_c,
                    },
                    "interior": dom.interior().len(),
                    "boundary": dom.boundary().len(),
                    "simply_connected": dom.is_simply_connected(),
                }),
                &args.out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(args) => {
            let spec = GeneratorSpec {
                family: args.family,
                params: parse_params(&args.params)?,
                seed: args.seed,
            };
            let dom = formats::generate_domain(&spec)?;
            formats::save_domain(&dom, Some(&spec), &args.out)?;
            eprintln!(
                "wrote {} ({} interior vertices, {} boundary edges)",
                args.out.display(),
                dom.interior().len(),
                dom.boundary().len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(args) => {
            let dom = formats::load_domain(&args.domain)?;
            let solver = DirichletSolver::new(dom.network()).map_err(|e| anyhow!("{e}"))?;
            let value = match args.op.to_lowercase().as_str() {
                "hm" => {
                    let u = args.u.ok_or_else(|| anyhow!("--u is required for hm"))?;
                    let edges = parse_list(&args.edges.ok_or_else(|| anyhow!("--edges required"))?)?;
                    let field = solver.harmonic_measure_field(&edges).map_err(|e| anyhow!("{e}"))?;
                    let ui = dom.interior_index(u).map_err(|e| anyhow!("{e}"))?;
                    json!({"value": field.interior[ui], "residual": field.residual})
                }
                "green" => {
                    let u = args.u.ok_or_else(|| anyhow!("--u is required for green"))?;
                    let ui = dom.interior_index(u).map_err(|e| anyhow!("{e}"))?;
                    let g = solver.green(ui).map_err(|e| anyhow!("{e}"))?;
                    let values: BTreeMap<String, f64> = dom
                        .interior()
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| (v.to_string(), g.interior[i]))
                        .collect();
                    json!({"values": values, "residual": g.residual})
                }
                "z" => {
                    let x = parse_endpoint(&dom, &args.x.ok_or_else(|| anyhow!("--x required"))?)?;
                    let y = parse_endpoint(&dom, &args.y.ok_or_else(|| anyhow!("--y required"))?)?;
                    let z = solver.partition_z(x, y).map_err(|e| anyhow!("{e}"))?;
                    json!({"value": z.value, "loop_convention": z.loop_convention})
                }
                "r" => {
                    let at = args.at.ok_or_else(|| anyhow!("--at required for r"))?;
                    let a = parse_list(&args.a.ok_or_else(|| anyhow!("--a required"))?)?;
                    let b = parse_list(&args.b.ok_or_else(|| anyhow!("--b required"))?)?;
                    let r = solver.ratio_r(at, &a, &b).map_err(|e| anyhow!("{e}"))?;
                    json!({"value": r})
                }
                other => bail!("unknown solve op {other:?} (expected hm, green, z, r)"),
            };
            emit(&value, &args.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants(args) => {
            let dom = formats::load_domain(&args.domain)?;
            let marks = parse_list(&args.quad)?;
            if marks.len() != 4 {
                bail!("--quad needs four boundary indices");
            }
            let quad = dom
                .quadrilateral([marks[0], marks[1], marks[2], marks[3]])
                .map_err(|e| anyhow!("invalid quadrilateral: {e}"))?;
            let inv = quad_invariants(&dom, &quad).map_err(|e| anyhow!("{e}"))?;
            emit(&serde_json::to_value(&inv)?, &args.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Separator(args) => {
            let dom = formats::load_domain(&args.domain)?;
            let (a0, a1) = parse_pair(&args.a)?;
            let (b0, b1) = parse_pair(&args.b)?;
            let arc_a = dom.arc(a0, a1).map_err(|e| anyhow!("{e}"))?;
            let arc_b = dom.arc(b0, b1).map_err(|e| anyhow!("{e}"))?;
            let split = separator_split(&dom, &arc_a, &arc_b, args.k).map_err(|e| anyhow!("{e}"))?;
            let ratios = if split.status == SplitStatus::Usable {
                let (fact, ratio) =
                    separator_verify(&dom, &arc_a, &arc_b, &split).map_err(|e| anyhow!("{e}"))?;
                Some((fact, ratio))
            } else {
                None
            };
            emit(
                &json!({
                    "k": split.k,
                    "status": format!("{:?}", split.status),
                    "side_a": split.interior_a.len(),
                    "side_b": split.interior_b.len(),
                    "slit_edges": split.slit,
                    "factorization_ratio": ratios.map(|r| r.0),
                    "threshold_ratio": ratios.map(|r| r.1),
                }),
                &args.out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::AnnulusEl(args) => {
            let dom = formats::load_domain(&args.domain)?;
            let (i, j) = parse_pair(&args.arc)?;
            let arc = dom.arc(i, j).map_err(|e| anyhow!("{e}"))?;
            let ann = annulus(&dom, args.u, args.rho0).map_err(|e| anyhow!("{e}"))?;
            let (lhs, el) = log_hm_vs_el(&dom, args.u, &arc, args.rho0).map_err(|e| anyhow!("{e}"))?;
            emit(
                &json!({
                    "log1p_inv_hm": lhs,
                    "el": el,
                    "ratio": lhs / el,
                    "doubly_connected": ann.doubly_connected,
                    "green_bracket": [ann.green_bracket.0, ann.green_bracket.1],
                }),
                &args.out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc(args) => {
            let dom = formats::load_domain(&args.domain)?;
            let est = match args.op.as_str() {
                "hm" => {
                    let u = args.u.ok_or_else(|| anyhow!("--u required"))?;
                    let edges = parse_list(&args.edges.ok_or_else(|| anyhow!("--edges required"))?)?;
                    estimate_hm(&dom, u, &edges, args.n, args.seed).map_err(|e| anyhow!("{e}"))?
                }
                "xsq" | "xsq-le" => {
                    let marks = parse_list(&args.quad.ok_or_else(|| anyhow!("--quad required"))?)?;
                    if marks.len() != 4 {
                        bail!("--quad needs four boundary indices");
                    }
                    let quad = dom
                        .quadrilateral([marks[0], marks[1], marks[2], marks[3]])
                        .map_err(|e| anyhow!("{e}"))?;
                    if args.op == "xsq" {
                        intersection_probability(&dom, &quad, args.n, args.seed)
                            .map_err(|e| anyhow!("{e}"))?
                    } else {
                        intersection_probability_loop_erased(&dom, &quad, args.n, args.seed)
                            .map_err(|e| anyhow!("{e}"))?
                    }
                }
                "ball" => {
                    let u = args.u.ok_or_else(|| anyhow!("--u required"))?;
                    let a = args.a.ok_or_else(|| anyhow!("--a required"))?;
                    let b = args.b.ok_or_else(|| anyhow!("--b required"))?;
                    intersection_ball_probability(&dom, a, b, u, args.n, args.seed)
                        .map_err(|e| anyhow!("{e}"))?
                }
                other => bail!("unknown mc op {other:?} (expected hm, xsq, xsq-le, ball)"),
            };
            emit(&serde_json::to_value(est)?, &args.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let spec: CorpusSpec = match &args.spec {
                Some(path) => serde_json::from_str(
                    &std::fs::read_to_string(path)
                        .with_context(|| format!("cannot read {}", path.display()))?,
                )
                .with_context(|| format!("cannot parse corpus spec {}", path.display()))?,
                None => default_corpus(),
            };
            let t0 = std::time::Instant::now();
            let reports: Vec<_> = spec
                .configs
                .par_iter()
                .map(|c| harness::run_config(c, &spec.brackets, spec.seed))
                .collect();
            let report = assemble_report(&spec, reports);
            eprintln!(
                "evaluated {} configurations in {:?}",
                report.configs.len(),
                t0.elapsed()
            );
            for cfg in &report.configs {
                if let Some(e) = &cfg.error {
                    println!("ERROR  {}: {e}", cfg.id);
                }
                for row in &cfg.rows {
                    if !row.pass {
                        println!(
                            "FAIL   {} / {}: {} not in [{}, {}]",
                            cfg.id, row.check, row.value, row.lo, row.hi
                        );
                    }
                }
            }
            if !args.quiet {
                for (name, s) in &report.summary {
                    println!(
                        "check {name}: n={} failures={} range=[{:.6}, {:.6}] geomean={:.6}",
                        s.count, s.failures, s.min, s.max, s.geomean
                    );
                }
                for (fam, fit) in &report.fits {
                    println!(
                        "fit {fam}: slope={:.4} intercept={:.4} residual={:.5} over {} points",
                        fit.slope, fit.intercept, fit.rel_residual, fit.points
                    );
                }
            }
            if !report.coverage_missing.is_empty() {
                println!("missing coverage: {:?}", report.coverage_missing);
            }
            if let Some(path) = &args.out {
                std::fs::write(path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            if let Some(path) = &args.csv {
                std::fs::write(path, formats::report_csv(&report))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            if report.failures > 0 {
                println!("verification FAILED: {} failures", report.failures);
                Ok(ExitCode::from(1))
            } else {
                println!(
                    "verification passed: {} configurations, {} checks",
                    report.configs.len(),
                    report.configs.iter().map(|c| c.rows.len()).sum::<usize>()
                );
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}
