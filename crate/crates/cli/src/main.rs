//! Command-line front end: fixture listing, pointwise evaluation, property
//! checks, theorem verification, and the regression matrix, each emitting a
//! structured report.
//!
//! Exit codes follow the report: 0 when the run lands positive (NotRefuted,
//! Confirmed, consistent, matrix-as-expected), 1 when it lands negative, and
//! 2 for usage problems such as unknown identifiers or off-domain points.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coneorder::checks::{ArgSel, CheckRequest, Polarity, PropertyKind};
use coneorder::cone::Cone;
use coneorder::config::Config;
use coneorder::fixture::{builtin_fixture, builtin_fixtures, Fixture};
use coneorder::fixture_file::load_fixture_file;
use coneorder::minimax::TheoremId;
use coneorder::report::{self, Overall, RunReport};
use coneorder::value::SetDesc;

#[derive(Parser)]
#[command(name = "coneorder", version, about = "Verification toolkit for cone-ordered set-valued maps", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in fixtures with domain and codomain metadata.
    ListFixtures,
    /// Print the exact value descriptor of a fixture at one point.
    Eval(EvalArgs),
    /// Run one property checker against a fixture.
    Check(CheckArgs),
    /// Run a theorem bundle: hypothesis checks plus the conclusion search.
    Verify(VerifyArgs),
    /// Run the full built-in regression matrix.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct TargetArgs {
    /// Built-in fixture name (see list-fixtures).
    #[arg(long)]
    fixture: Option<String>,
    /// JSON fixture file; --fixture selects by name within it.
    #[arg(long, value_name = "PATH")]
    fixture_file: Option<PathBuf>,
    /// Cone: a built-in name (Rplus, R2plus, minusR2plus) or a JSON list of
    /// outward normals such as "[[1.0,0.0],[0.0,1.0]]".  Defaults to the
    /// fixture's usual cone.
    #[arg(long)]
    cone: Option<String>,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file; omitted keys keep their defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Domain grid resolution (subdivisions per interval).
    #[arg(long)]
    resolution: Option<usize>,
    /// Largest tuple length swept by the n-ary checkers.
    #[arg(long)]
    n_max: Option<usize>,
    /// Points per simplex coordinate in weight grids.
    #[arg(long)]
    lambda_steps: Option<usize>,
    /// Cone membership tolerance (also sets the interior margin).
    #[arg(long)]
    eps: Option<f64>,
    /// Seed for randomized subsampling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report to this path instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, value_name = "PATH")]
    fixture_file: Option<PathBuf>,
    #[arg(long)]
    x: f64,
    /// Second argument; one-argument maps ignore it.
    #[arg(long, default_value_t = 0.0)]
    y: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Property id, e.g. alpha, pair_properly_v, transfer_mu_v, weakly_z.
    #[arg(long)]
    property: String,
    /// Which argument the property constrains.
    #[arg(long, value_enum, default_value_t = ArgFlag::First)]
    arg: ArgFlag,
    /// Direction of the condition.
    #[arg(long, value_enum, default_value_t = PolarityFlag::Convex)]
    polarity: PolarityFlag,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Theorem id, e.g. thm41_i, cor41_i, thm45.
    #[arg(long)]
    theorem: String,
}

#[derive(Args)]
struct SuiteArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArgFlag {
    First,
    Second,
}

impl From<ArgFlag> for ArgSel {
    fn from(a: ArgFlag) -> ArgSel {
        match a {
            ArgFlag::First => ArgSel::First,
            ArgFlag::Second => ArgSel::Second,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityFlag {
    Convex,
    Concave,
}

impl From<PolarityFlag> for Polarity {
    fn from(p: PolarityFlag) -> Polarity {
        match p {
            PolarityFlag::Convex => Polarity::Convex,
            PolarityFlag::Concave => Polarity::Concave,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::ListFixtures => list_fixtures(),
        Command::Eval(args) => eval(args),
        Command::Check(args) => check(args),
        Command::Verify(args) => verify(args),
        Command::Suite(args) => suite(args),
    }
}

fn exit_for(overall: Overall) -> ExitCode {
    match overall {
        Overall::Pass => ExitCode::SUCCESS,
        Overall::Fail => ExitCode::from(1),
    }
}

fn build_config(args: &ConfigArgs) -> Result<Config, String> {
    let mut cfg: Config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => Config::default(),
    };
    if let Some(res) = args.resolution {
        cfg.grid_resolution = res;
    }
    if let Some(n) = args.n_max {
        cfg.n_max = n;
    }
    if let Some(steps) = args.lambda_steps {
        cfg.lambda_steps = steps;
    }
    if let Some(eps) = args.eps {
        cfg.eps_cone = eps;
        cfg.eps_interior = eps;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn resolve_fixture(name: &Option<String>, file: &Option<PathBuf>) -> Result<Fixture, String> {
    match (name, file) {
        (Some(n), None) => builtin_fixture(n).map_err(|e| e.to_string()),
        (None, Some(path)) => {
            let loaded = load_fixture_file(path).map_err(|e| e.to_string())?;
            loaded
                .fixtures
                .into_iter()
                .next()
                .ok_or_else(|| format!("{} declares no fixtures", path.display()))
        }
        (Some(n), Some(path)) => {
            let loaded = load_fixture_file(path).map_err(|e| e.to_string())?;
            loaded
                .fixtures
                .into_iter()
                .find(|f| &f.name == n)
                .ok_or_else(|| format!("fixture `{n}` not found in {}", path.display()))
        }
        (None, None) => Err("one of --fixture or --fixture-file is required".to_string()),
    }
}

fn resolve_cone(spec: &Option<String>, fx: &Fixture, cfg: &Config) -> Result<Cone, String> {
    let spec = spec.clone().unwrap_or_else(|| fx.default_cone.clone());
    if Cone::builtin_names().contains(&spec.as_str()) {
        return Cone::builtin(&spec, cfg.eps_cone, cfg.eps_interior).map_err(|e| e.to_string());
    }
    let normals: Vec<Vec<f64>> = serde_json::from_str(&spec).map_err(|_| {
        format!(
            "cone `{spec}` is neither a built-in ({}) nor a JSON normal list",
            Cone::builtin_names().join(", ")
        )
    })?;
    Cone::from_normals("custom", &normals, cfg.eps_cone, cfg.eps_interior)
        .map_err(|e| e.to_string())
}

fn emit(report: &RunReport, output: &OutputArgs) -> Result<(), String> {
    let text = match output.format {
        Format::Json => report::to_json(report),
        Format::Markdown => report::to_markdown(report),
    };
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn list_fixtures() -> Result<ExitCode, String> {
    let all = builtin_fixtures();
    for fx in all.iter().filter(|f| !f.auxiliary) {
        println!("{}", fixture_line(fx));
    }
    println!();
    println!("auxiliary:");
    for fx in all.iter().filter(|f| f.auxiliary) {
        println!("{}", fixture_line(fx));
    }
    Ok(ExitCode::SUCCESS)
}

fn fixture_line(fx: &Fixture) -> String {
    let domain = if fx.single_arg {
        format!("[{}, {}]", fx.domain_x.0, fx.domain_x.1)
    } else {
        format!(
            "[{}, {}] x [{}, {}]",
            fx.domain_x.0, fx.domain_x.1, fx.domain_y.0, fx.domain_y.1
        )
    };
    format!(
        "{:<10} {:<24} -> R^{}  {:<13} cone={:<12} {}",
        fx.name,
        domain,
        fx.codomain_dim,
        if fx.single_valued { "single-valued" } else { "set-valued" },
        fx.default_cone,
        fx.summary
    )
}

fn eval(args: EvalArgs) -> Result<ExitCode, String> {
    let fx = resolve_fixture(&args.fixture, &args.fixture_file)?;
    let desc = fx.eval(args.x, args.y).map_err(|e| e.to_string())?;
    println!("{}", format_desc(&desc));
    Ok(ExitCode::SUCCESS)
}

fn format_num(v: f64) -> String {
    format!("{v}")
}

fn format_pt(p: &[f64]) -> String {
    if p.len() == 1 {
        format_num(p[0])
    } else {
        let coords: Vec<String> = p.iter().map(|&v| format_num(v)).collect();
        format!("({})", coords.join(", "))
    }
}

fn format_desc(desc: &SetDesc) -> String {
    match desc {
        SetDesc::Point { at } => format!("{{{}}}", format_pt(at)),
        SetDesc::Interval { lo, hi, open_lo, open_hi } => format!(
            "interval {}{}, {}{}",
            if *open_lo { "(" } else { "[" },
            format_num(*lo),
            format_num(*hi),
            if *open_hi { ")" } else { "]" }
        ),
        SetDesc::Disc { center, radius, part } => format!(
            "disc center ({}, {}) radius {} part {:?}",
            format_num(center[0]),
            format_num(center[1]),
            format_num(*radius),
            part
        ),
        SetDesc::Union { parts } => {
            let rendered: Vec<String> = parts.iter().map(format_desc).collect();
            rendered.join(" union ")
        }
    }
}

fn check(args: CheckArgs) -> Result<ExitCode, String> {
    let cfg = build_config(&args.config)?;
    let fx = resolve_fixture(&args.target.fixture, &args.target.fixture_file)?;
    let cone = resolve_cone(&args.target.cone, &fx, &cfg)?;
    let kind: PropertyKind = args.property.parse()?;
    let req = CheckRequest::new(kind)
        .with_arg(args.arg.into())
        .with_polarity(args.polarity.into());
    let rep = report::report_check(&fx, &cone, &cfg, &req).map_err(|e| e.to_string())?;
    emit(&rep, &args.output)?;
    Ok(exit_for(rep.overall))
}

fn verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let cfg = build_config(&args.config)?;
    let fx = resolve_fixture(&args.target.fixture, &args.target.fixture_file)?;
    let cone = resolve_cone(&args.target.cone, &fx, &cfg)?;
    let theorem: TheoremId = args.theorem.parse().map_err(|e: coneorder::checks::CheckError| e.to_string())?;
    let rep = report::report_verify(&fx, &cone, &cfg, theorem).map_err(|e| e.to_string())?;
    emit(&rep, &args.output)?;
    Ok(exit_for(rep.overall))
}

fn suite(args: SuiteArgs) -> Result<ExitCode, String> {
    let cfg = build_config(&args.config)?;
    let rep = report::report_suite(&cfg).map_err(|e| e.to_string())?;
    emit(&rep, &args.output)?;
    Ok(exit_for(rep.overall))
}
