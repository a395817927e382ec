//! `oodlab`: batch front end for the oodlab-core library.
//!
//! Exit codes: 0 success, 1 a verification reported a failure, 2 invalid
//! input, 3 size cap exceeded, 4 experiment precondition rejected.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value as Json};

use oodlab_core::alpha::{alpha_exact_capped, DEFAULT_SIZE_CAP};
use oodlab_core::bounds::{evaluate, BoundInputs, BoundKind};
use oodlab_core::hypothesis::ClassDoc;
use oodlab_core::junta::dyadic::{dot_products, parse_labels, shattering_weight, verify_all, verify_shatter};
use oodlab_core::junta::{transfer_identity_check, PointMassMeasure, SubspaceJunta};
use oodlab_core::lab::config::{run_experiment, sample_complexity_sweep, ExperimentConfig};
use oodlab_core::rational::{format_rational, parse_decimal, to_f64};
use oodlab_core::shatter::{sauer_check, shatters, vc_dimension_exact, DEFAULT_POINT_CAP};
use oodlab_core::{
    alpha_bounds, alpha_uniform_exponential, AlphaQuery, Error, FiniteDistribution, HypothesisClass,
    ShiftDirection, StructuredPoint, VcDimension, Q, VERSION,
};

const EXAMPLES: &str = "\
Examples:
  oodlab alpha exact --train d.json --test dprime.json --epsilon 0.3
  oodlab vc exact --class class.json
  oodlab bounds union --params d=3,M=100
  oodlab experiment --config grue.json --format csv --output grue.csv
  oodlab shatter --m 12 --all
  oodlab junta transfer --config transfer.json";

#[derive(Parser)]
#[command(name = "oodlab", version, about = "Exact out-of-distribution PAC toolkit", after_help = EXAMPLES)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Report format; JSON carries every field, CSV a fixed column subset.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Root seed; overrides the seed of an experiment config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// The amplification functional alpha_{D,D'}(eps).
    #[command(subcommand)]
    Alpha(AlphaCmd),
    /// Shattering, exact VC-dimension and Sauer counts of a class file.
    #[command(subcommand)]
    Vc(VcCmd),
    /// Evaluates a closed-form bound; `bounds list` names them all.
    #[command(after_help = "Examples:\n  oodlab bounds union --params d=3,M=100\n  oodlab bounds subspace-junta --params n=2,ell=1,k=1,t=1\n  oodlab bounds sparse-ood --params d_k=1,k=1,n=e,rate=1/e,delta=1/e")]
    Bounds(BoundsArgs),
    /// Runs an experiment config (scenario sweep or randomized engine).
    #[command(after_help = "Example:\n  oodlab experiment --config grue.json --seed 7 --format csv")]
    Experiment(ConfigArgs),
    /// Sample-complexity sweep of the config's chosen class.
    #[command(after_help = "Example:\n  oodlab sweep --config grue.json --output sweep.csv --format csv")]
    Sweep(ConfigArgs),
    /// Square-wave shattering of m points in exact dyadic arithmetic.
    #[command(after_help = "Examples:\n  oodlab shatter --labels 101\n  oodlab shatter --m 12 --all")]
    Shatter(ShatterArgs),
    /// Subspace-junta tools.
    #[command(subcommand)]
    Junta(JuntaCmd),
}

#[derive(Args)]
struct PairArgs {
    /// Training distribution D (JSON).
    #[arg(long)]
    train: PathBuf,
    /// Test distribution D' (JSON).
    #[arg(long)]
    test: PathBuf,
    /// Test mass threshold, decimal or num/den.
    #[arg(long)]
    epsilon: String,
}

#[derive(Subcommand)]
enum AlphaCmd {
    /// Exact value with a minimizing event.
    #[command(after_help = "Example:\n  oodlab alpha exact --train d.json --test d.json --epsilon 3/10")]
    Exact {
        #[command(flatten)]
        pair: PairArgs,
        /// Size cap in binary atoms.
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: u32,
    },
    /// Fractional lower bound and greedy upper bound.
    #[command(after_help = "Example:\n  oodlab alpha bounds --train d.json --test dprime.json --epsilon 0.5")]
    Bounds {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Closed form for D = U[0,K], D' = Exp(1).
    #[command(after_help = "Example:\n  oodlab alpha closed-form --k 1 --epsilon 0.5 --direction d-to-d-prime")]
    ClosedForm {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Direction::DToDPrime)]
        direction: Direction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    DToDPrime,
    DPrimeToD,
}

#[derive(Subcommand)]
enum VcCmd {
    /// Exact VC-dimension with a shattered witness.
    #[command(after_help = "Example:\n  oodlab vc exact --class dictators.json --cap 8")]
    Exact {
        #[arg(long)]
        class: PathBuf,
        /// Largest set size searched before giving up.
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        cap: usize,
    },
    /// Decides whether the class shatters the given points.
    #[command(after_help = "Example:\n  oodlab vc shatters --class dictators.json --point 0,0,0 --point 1,1,1")]
    Shatters {
        #[arg(long)]
        class: PathBuf,
        /// A point as comma-separated feature values; repeat per point.
        #[arg(long = "point", required = true)]
        points: Vec<String>,
    },
    /// Checks |H| against the Sauer bound over the full domain.
    #[command(after_help = "Example:\n  oodlab vc sauer --class dictators.json")]
    Sauer {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
struct BoundsArgs {
    /// Calculator name, or `list`.
    name: String,
    /// Comma-separated key=value inputs; `base=2` or `base=e` picks the log.
    #[arg(long, default_value = "")]
    params: String,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct ShatterArgs {
    /// Number of points; defaults to the length of --labels.
    #[arg(long)]
    m: Option<usize>,
    /// Verify every labeling of m points.
    #[arg(long, conflicts_with = "labels", requires = "m")]
    all: bool,
    /// One labeling as a 0/1 string, first point first.
    #[arg(long)]
    labels: Option<String>,
}

#[derive(Subcommand)]
enum JuntaCmd {
    /// Same as the top-level `shatter`.
    #[command(after_help = "Example:\n  oodlab junta shatter --m 12 --all")]
    Shatter(ShatterArgs),
    /// Exact transfer identity for two juntas and two point-mass measures.
    #[command(after_help = "Example:\n  oodlab junta transfer --config transfer.json\n\nThe config holds {\"f\": junta, \"h\": junta, \"train\": measure, \"test\": measure}.")]
    Transfer(ConfigArgs),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransferConfig {
    f: SubspaceJunta,
    h: SubspaceJunta,
    train: PointMassMeasure,
    test: PointMassMeasure,
}

/// A finished report and the exit code it warrants.
struct Report {
    json: Json,
    csv: String,
    code: u8,
}

impl Report {
    fn ok(json: Json, csv: String) -> Self {
        Self { json, csv, code: 0 }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_distribution(path: &Path) -> anyhow::Result<FiniteDistribution> {
    FiniteDistribution::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_class(path: &Path) -> anyhow::Result<HypothesisClass> {
    ClassDoc::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn exact_json(v: &Q) -> Json {
    json!({ "exact": format_rational(v), "decimal": to_f64(v) })
}

fn points_json(points: &[StructuredPoint]) -> Json {
    json!(points)
}

fn points_text(points: &[StructuredPoint]) -> String {
    points.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn with_version(mut v: Json) -> Json {
    if let Json::Object(map) = &mut v {
        map.insert("version".into(), json!(VERSION));
    }
    v
}

fn cmd_alpha(cmd: AlphaCmd) -> anyhow::Result<Report> {
    let load = |p: &PairArgs| -> anyhow::Result<(FiniteDistribution, FiniteDistribution, Q)> {
        Ok((load_distribution(&p.train)?, load_distribution(&p.test)?, parse_decimal(&p.epsilon)?))
    };
    match cmd {
        AlphaCmd::Exact { pair, cap } => {
            let (train, test, eps) = load(&pair)?;
            let r = alpha_exact_capped(&AlphaQuery::new(&train, &test, eps.clone())?, cap)?;
            let json = json!({
                "command": "alpha exact",
                "epsilon": exact_json(&eps),
                "alpha": exact_json(&r.value),
                "method": r.method,
                "witness": points_json(&r.witness),
            });
            let csv = csv_table(
                &["epsilon", "alpha", "alpha_decimal", "witness"],
                &[vec![format_rational(&eps), format_rational(&r.value), to_f64(&r.value).to_string(), points_text(&r.witness)]],
            )?;
            Ok(Report::ok(json, csv))
        }
        AlphaCmd::Bounds { pair } => {
            let (train, test, eps) = load(&pair)?;
            let b = alpha_bounds(&AlphaQuery::new(&train, &test, eps.clone())?);
            let json = json!({
                "command": "alpha bounds",
                "epsilon": exact_json(&eps),
                "lower": exact_json(&b.lower),
                "upper": exact_json(&b.upper),
                "greedy_event": points_json(&b.greedy_event),
            });
            let csv = csv_table(
                &["epsilon", "lower", "lower_decimal", "upper", "upper_decimal"],
                &[vec![
                    format_rational(&eps),
                    format_rational(&b.lower),
                    to_f64(&b.lower).to_string(),
                    format_rational(&b.upper),
                    to_f64(&b.upper).to_string(),
                ]],
            )?;
            Ok(Report::ok(json, csv))
        }
        AlphaCmd::ClosedForm { k, epsilon, direction } => {
            let dir = match direction {
                Direction::DToDPrime => ShiftDirection::DToDPrime,
                Direction::DPrimeToD => ShiftDirection::DPrimeToD,
            };
            let v = alpha_uniform_exponential(k, epsilon, dir)?;
            let json = json!({
                "command": "alpha closed-form",
                "k": k,
                "epsilon": epsilon,
                "direction": dir,
                "alpha": v,
            });
            let name = serde_json::to_value(dir)?.as_str().unwrap_or_default().to_string();
            let csv = csv_table(
                &["k", "epsilon", "direction", "alpha"],
                &[vec![k.to_string(), epsilon.to_string(), name, v.to_string()]],
            )?;
            Ok(Report::ok(json, csv))
        }
    }
}

fn parse_point(s: &str) -> anyhow::Result<StructuredPoint> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<i64>().with_context(|| format!("bad coordinate in point '{s}'")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(StructuredPoint::new(coords))
}

fn cmd_vc(cmd: VcCmd) -> anyhow::Result<Report> {
    match cmd {
        VcCmd::Exact { class, cap } => {
            let c = load_class(&class)?;
            let vc = vc_dimension_exact(&c, cap)?;
            let capped = matches!(vc, VcDimension::Capped { .. });
            let (status, dim) = match &vc {
                VcDimension::Exact { dim, .. } => ("exact", *dim),
                VcDimension::Capped { at_least, .. } => ("capped", *at_least),
            };
            let mut json = serde_json::to_value(&vc)?;
            json["command"] = json!("vc exact");
            json["class_size"] = json!(c.len());
            let csv = csv_table(
                &["status", "dim", "class_size", "witness"],
                &[vec![status.into(), dim.to_string(), c.len().to_string(), points_text(&vc.witness().points)]],
            )?;
            Ok(Report { json, csv, code: if capped { 3 } else { 0 } })
        }
        VcCmd::Shatters { class, points } => {
            let c = load_class(&class)?;
            let pts = points.iter().map(|p| parse_point(p)).collect::<anyhow::Result<Vec<_>>>()?;
            let outcome = shatters(&c, &pts)?;
            let mut json = serde_json::to_value(&outcome)?;
            json["command"] = json!("vc shatters");
            json["points"] = points_json(&pts);
            let refuting = match &outcome {
                oodlab_core::ShatterOutcome::Refuted { labeling } => {
                    labeling.iter().map(|&b| if b { '1' } else { '0' }).collect()
                }
                oodlab_core::ShatterOutcome::Shattered(_) => String::new(),
            };
            let csv = csv_table(
                &["shattered", "points", "refuting_labeling"],
                &[vec![outcome.is_shattered().to_string(), points_text(&pts), refuting]],
            )?;
            Ok(Report::ok(json, csv))
        }
        VcCmd::Sauer { class, cap } => {
            let c = load_class(&class)?;
            let r = sauer_check(&c, cap)?;
            let mut json = serde_json::to_value(&r)?;
            json["command"] = json!("vc sauer");
            let csv = csv_table(
                &["domain_size", "distinct_restrictions", "vc_dimension", "sauer_bound", "holds"],
                &[vec![
                    r.domain_size.to_string(),
                    r.distinct_restrictions.to_string(),
                    r.vc_dimension.to_string(),
                    r.sauer_bound.to_string(),
                    r.holds.to_string(),
                ]],
            )?;
            Ok(Report::ok(json, csv))
        }
    }
}

fn cmd_bounds(args: BoundsArgs) -> anyhow::Result<Report> {
    if args.name == "list" {
        let rows: Vec<Vec<String>> = BoundKind::ALL
            .iter()
            .map(|k| vec![k.name().to_string(), k.params().join(" ")])
            .collect();
        let json = json!({
            "command": "bounds list",
            "bounds": BoundKind::ALL.iter().map(|k| json!({"name": k.name(), "params": k.params()})).collect::<Vec<_>>(),
        });
        return Ok(Report::ok(json, csv_table(&["name", "params"], &rows)?));
    }
    let kind = BoundKind::parse(&args.name)?;
    let v = evaluate(kind, &BoundInputs::parse(&args.params)?)?;
    let mut json = serde_json::to_value(&v)?;
    json["command"] = json!("bounds");
    let base = serde_json::to_value(v.log_base)?.as_str().unwrap_or_default().to_string();
    let csv = csv_table(
        &["bound", "value", "exact", "log_base", "formula"],
        &[vec![v.bound.into(), v.value.to_string(), v.exact.clone().unwrap_or_default(), base, v.formula.clone()]],
    )?;
    Ok(Report::ok(json, csv))
}

fn load_config(args: &ConfigArgs, seed: Option<u64>) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_json(&read(&args.config)?)
        .with_context(|| format!("in {}", args.config.display()))?;
    if let Some(s) = seed {
        cfg.set_seed(s);
    }
    Ok(cfg)
}

fn cmd_experiment(args: ConfigArgs, seed: Option<u64>) -> anyhow::Result<Report> {
    let report = run_experiment(&load_config(&args, seed)?)?;
    Ok(Report::ok(serde_json::to_value(&report)?, report.to_csv()))
}

fn cmd_sweep(args: ConfigArgs, seed: Option<u64>) -> anyhow::Result<Report> {
    let report = sample_complexity_sweep(&load_config(&args, seed)?)?;
    Ok(Report::ok(serde_json::to_value(&report)?, report.to_csv()))
}

fn cmd_shatter(args: ShatterArgs) -> anyhow::Result<Report> {
    if args.all {
        let m = args.m.expect("clap requires --m with --all");
        let s = verify_all(m)?;
        let mut json = serde_json::to_value(&s)?;
        json["command"] = json!("shatter");
        let csv = csv_table(
            &["m", "labelings", "verified", "first_failure"],
            &[vec![s.m.to_string(), s.labelings.to_string(), s.verified.to_string(), s.first_failure.clone().unwrap_or_default()]],
        )?;
        let code = if s.verified == s.labelings { 0 } else { 1 };
        return Ok(Report { json, csv, code });
    }
    let Some(text) = args.labels else {
        bail!(Error::Parameter("give --labels or --m with --all".into()));
    };
    let labels = parse_labels(&text)?;
    if let Some(m) = args.m {
        if m != labels.len() {
            bail!(Error::Parameter(format!("--m {m} but {} labels given", labels.len())));
        }
    }
    let weight = shattering_weight(&labels)?;
    let dots = dot_products(&labels)?;
    let verified = verify_shatter(&labels)?;
    let json = json!({
        "command": "shatter",
        "labels": text,
        "cos_theta": weight.to_string(),
        "dot_products": dots.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "outputs": dots.iter().map(|&u| oodlab_core::junta::square_wave(u)).collect::<Vec<_>>(),
        "verified": verified,
    });
    let csv = csv_table(
        &["labels", "cos_theta", "verified"],
        &[vec![text.clone(), weight.to_string(), verified.to_string()]],
    )?;
    Ok(Report { json, csv, code: if verified { 0 } else { 1 } })
}

fn cmd_transfer(args: ConfigArgs) -> anyhow::Result<Report> {
    let cfg: TransferConfig = serde_json::from_str(&read(&args.config)?)
        .map_err(Error::from)
        .with_context(|| format!("in {}", args.config.display()))?;
    let r = transfer_identity_check(&cfg.f, &cfg.h, &cfg.train, &cfg.test)?;
    let mut json = serde_json::to_value(&r)?;
    json["command"] = json!("junta transfer");
    let csv = csv_table(
        &["span_dim", "precondition_ok", "train_agreement", "test_agreement", "equal"],
        &[vec![
            r.span_dim.to_string(),
            r.precondition_ok.to_string(),
            format_rational(&r.train_agreement),
            format_rational(&r.test_agreement),
            r.equal.to_string(),
        ]],
    )?;
    let code = if !r.precondition_ok {
        4
    } else if r.equal {
        0
    } else {
        1
    };
    Ok(Report { json, csv, code })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::SizeCap { .. }) => 3,
        Some(Error::Precondition(_)) => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let Common { format, output, seed } = cli.common;
    let report = match cli.command {
        Command::Alpha(c) => cmd_alpha(c)?,
        Command::Vc(c) => cmd_vc(c)?,
        Command::Bounds(a) => cmd_bounds(a)?,
        Command::Experiment(a) => cmd_experiment(a, seed)?,
        Command::Sweep(a) => cmd_sweep(a, seed)?,
        Command::Shatter(a) | Command::Junta(JuntaCmd::Shatter(a)) => cmd_shatter(a)?,
        Command::Junta(JuntaCmd::Transfer(a)) => cmd_transfer(a)?,
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&with_version(report.json))? + "\n",
        Format::Csv => format!("# {VERSION}\n{}", report.csv),
    };
    match output {
        Some(path) => fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
