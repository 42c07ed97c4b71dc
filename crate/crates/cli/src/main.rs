//! `stablesg`: generate configurations, certify them and run the self-test.
//!
//! Exit codes: 0 every check holds, 1 I/O or validation error, 2 a
//! hypothesis is not met, 3 a certificate check failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stablesg::checks::Check;
use stablesg::collinearity::{TubeKind, TubeQuery};
use stablesg::designs::{collect_witnessed, design_parameters, sg_hypothesis_check};
use stablesg::generators::{generate, GeneratorSpec};
use stablesg::geometry::dim_eps_bracket;
use stablesg::io::{read_config, read_json, to_json, CertificateReport, ConfigFile};
use stablesg::lcc::{find_decoding_families, lcc_dimension_pipeline};
use stablesg::reductions::{analyze_affine_with, analyze_projective_with, subset_variant, Analysis, AnalysisOptions};
use stablesg::selftest::{self, Scale};
use stablesg::Error;

#[derive(Parser)]
#[command(name = "stablesg", version, about = "Certified low-dimensional subspaces for approximate Sylvester-Gallai configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a configuration from a JSON generator spec.
    Generate {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Certify a configuration.
    Analyze {
        #[command(subcommand)]
        setting: Setting,
    },
    /// Bracket the smallest dimension of a subspace within eps of every point.
    DimEps {
        config: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Collect eps-collinear triples and report the design parameters.
    VerifyDesign {
        config: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Also check that every point has delta (n - 1) partners.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the seeded invariant suite.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Affine,
    Arc,
}

#[derive(Args)]
struct Common {
    config: PathBuf,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    eps: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Setting {
    /// B-balanced points with eps-collinear triples.
    Affine {
        #[command(flatten)]
        common: Common,
        #[arg(long = "B", alias = "b")]
        b: f64,
        /// Run past failed hypotheses; failures stay in the report.
        #[arg(long)]
        force: bool,
    },
    /// Unit vectors, phase-separated by mu, with triples in eps-arcs.
    Projective {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        force: bool,
    },
    /// Stable locally correctable configuration with a decoding family.
    Lcc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q: usize,
        #[arg(long = "B", alias = "b")]
        b: f64,
        /// Search for this many tuples per point when the file has no family.
        #[arg(long)]
        search_k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run even when the family is too small for the erasure argument.
        #[arg(long)]
        allow_unknown: bool,
    },
}

enum Outcome {
    Passed,
    FlagsFailed(Vec<String>),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::FlagsFailed(names)) => {
            eprintln!("failing checks: {}", names.join("; "));
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::HypothesisNotMet(_) => 2,
                Error::TheoremViolation(_) => 3,
                _ => 1,
            })
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> stablesg::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn finish_report(mut report: CertificateReport, started: Instant, output: Option<&Path>) -> stablesg::Result<Outcome> {
    report
        .timings_ms
        .insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    emit(output, &to_json(&report)?)?;
    Ok(if report.passed {
        Outcome::Passed
    } else {
        Outcome::FlagsFailed(report.failing)
    })
}

fn analysis_report(command: &str, digest: String, params: serde_json::Value, a: &Analysis) -> stablesg::Result<CertificateReport> {
    let subset = subset_variant(a);
    let checks: Vec<Check> = a
        .checks
        .iter()
        .chain(&a.certificate.checks)
        .chain(&a.headline_checks)
        .chain(&subset.checks)
        .cloned()
        .collect();
    let result = json!({ "analysis": a, "subset_variant": subset });
    Ok(CertificateReport::new(command, digest, params, a.hypotheses.clone(), checks, result))
}

fn run(command: Command) -> stablesg::Result<Outcome> {
    let started = Instant::now();
    match command {
        Command::Generate { spec, output } => {
            let (spec, _): (GeneratorSpec, _) = read_json(&spec)?;
            let g = generate(&spec)?;
            emit(output.as_deref(), &to_json(&ConfigFile::from_generated(&g))?)?;
            Ok(Outcome::Passed)
        }
        Command::Analyze { setting } => analyze(setting, started),
        Command::DimEps { config, eps, output } => {
            let (_, v, digest) = read_config(&config)?;
            let b = dim_eps_bracket(&v, eps)?;
            let checks = vec![
                Check::le("lower <= upper", b.lower as f64, b.upper as f64),
                Check::le("upper subspace within eps", b.upper_max_distance, eps),
            ];
            let report = CertificateReport::new("dim-eps", digest, json!({ "eps": eps }), vec![], checks, serde_json::to_value(&b)?);
            finish_report(report, started, output.as_deref())
        }
        Command::VerifyDesign { config, eps, kind, delta, output } => {
            let (_, v, digest) = read_config(&config)?;
            let kind = match kind {
                Kind::Affine => TubeKind::AffineLine,
                Kind::Arc => TubeKind::SphericalArc,
            };
            let collected = collect_witnessed(&v, TubeQuery::new(kind, eps)?)?;
            let params = design_parameters(&collected.family);
            let mut hypotheses = Vec::new();
            let mut partners = serde_json::Value::Null;
            if let Some(delta) = delta {
                let h = sg_hypothesis_check(&v, eps, delta, kind)?;
                let least = h.counts.iter().copied().min().unwrap_or(0);
                hypotheses.push(Check::ge("partners per point >= delta (n - 1)", least as f64, h.required));
                partners = serde_json::to_value(&h)?;
            }
            let result = json!({ "p": params.p, "g": params.g, "triples": collected.family.len(), "partners": partners });
            let report = CertificateReport::new(
                "verify-design",
                digest,
                json!({ "eps": eps, "kind": kind, "delta": delta }),
                hypotheses,
                vec![],
                result,
            );
            finish_report(report, started, output.as_deref())
        }
        Command::Selftest { quick, seed } => {
            let r = selftest::run(if quick { Scale::QUICK } else { Scale::FULL }, seed);
            for o in &r.outcomes {
                println!("{} {:<40} {:>7.2} s  {}", if o.passed { "ok  " } else { "FAIL" }, o.name, o.seconds, o.detail);
            }
            println!("total {:.2} s", r.seconds);
            Ok(if r.passed {
                Outcome::Passed
            } else {
                Outcome::FlagsFailed(r.outcomes.iter().filter(|o| !o.passed).map(|o| o.name.clone()).collect())
            })
        }
    }
}

fn analyze(setting: Setting, started: Instant) -> stablesg::Result<Outcome> {
    match setting {
        Setting::Affine { common, b, force } => {
            let (_, v, digest) = read_config(&common.config)?;
            let opts = AnalysisOptions { force, ..Default::default() };
            let a = analyze_affine_with(&v, b, common.delta, common.eps, &opts)?;
            let params = json!({ "B": b, "delta": common.delta, "eps": common.eps, "force": force });
            let report = analysis_report("analyze affine", digest, params, &a)?;
            finish_report(report, started, common.output.as_deref())
        }
        Setting::Projective { common, mu, force } => {
            let (_, v, digest) = read_config(&common.config)?;
            let opts = AnalysisOptions { force, ..Default::default() };
            let a = analyze_projective_with(&v, mu, common.delta, common.eps, &opts)?;
            let params = json!({ "mu": mu, "delta": common.delta, "eps": common.eps, "force": force });
            let report = analysis_report("analyze projective", digest, params, &a)?;
            finish_report(report, started, common.output.as_deref())
        }
        Setting::Lcc { common, q, b, search_k, seed, allow_unknown } => {
            let (file, v, digest) = read_config(&common.config)?;
            let family = match (file.decoding_family, search_k) {
                (Some(f), None) => f,
                (_, Some(k)) => find_decoding_families(&v, q, b, common.eps, k, seed)?,
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "configuration has no decoding_family; pass --search-k to search for one".into(),
                    ))
                }
            };
            let cert = lcc_dimension_pipeline(&v, &family, q, common.delta, b, common.eps, allow_unknown)?;
            let params = json!({ "q": q, "B": b, "delta": common.delta, "eps": common.eps });
            let report = CertificateReport::new("analyze lcc", digest, params, vec![], cert.checks.clone(), serde_json::to_value(&cert)?);
            finish_report(report, started, common.output.as_deref())
        }
    }
}
