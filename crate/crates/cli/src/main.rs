//! `concord`: exact concordance computations on copulas from the command
//! line. Results print as exact rationals unless `--decimal` asks for a
//! fixed-point rendering; `--json` switches to machine output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use concord_core::concordance::Measure;
use concord_core::identities::gamma_sequence;
use concord_core::rational::{parse_rational, to_decimal_string, Rational};
use concord_core::subsets::enumerate;
use concord_core::suite::{run_suite, SuiteConfig, SuiteKind};
use concord_core::symmetry::{apply, Symmetry};
use concord_core::{Copula, IndexSet, MassGrid};

#[derive(Parser)]
#[command(
    name = "concord",
    version,
    about = "Exact concordance calculus for copulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a concordance measure on a copula.
    Compute(ComputeArgs),
    /// Tabulate kappa over every marginal pinned up to a given depth.
    Table(TableArgs),
    /// Apply a symmetry expression to a copula and write the image copula.
    Apply(ApplyArgs),
    /// Build an empirical checkerboard copula from CSV samples.
    Fit(FitArgs),
    /// Run the identity verification suites.
    Verify(VerifyArgs),
    /// Print the gamma constants of the odd-dimension identities.
    Gamma(GammaArgs),
}

#[derive(Args)]
struct CopulaSelector {
    /// Copula: `M`, `Pi`, `grid:<file>`, or `mix:<w>*<part>,<w>*<part>,..`
    #[arg(long)]
    copula: String,
    /// Dimension, required for `M` and `Pi`.
    #[arg(long)]
    n: Option<usize>,
    /// Per-axis cell count for `Pi` (default 1; exact at any resolution).
    #[arg(short, long)]
    m: Option<usize>,
}

#[derive(Args)]
struct TransformFlags {
    /// Flip these axes (1-based, comma separated) before evaluating.
    #[arg(long)]
    flip: Option<String>,
    /// Permute axes by this 1-based image list before evaluating.
    #[arg(long)]
    perm: Option<String>,
}

impl TransformFlags {
    fn applied(&self, copula: Copula) -> CliResult<Copula> {
        let xi = symmetry_from_flags(copula.dim(), &self.flip, &self.perm)?;
        if xi.is_identity() {
            Ok(copula)
        } else {
            Ok(apply(&xi, &copula)?)
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// rho | tau | ext-spearman | ext-kendall
    #[arg(long)]
    measure: String,
    #[command(flatten)]
    copula: CopulaSelector,
    #[command(flatten)]
    transform: TransformFlags,
    /// Pin these axes to 1 and evaluate the proper marginal.
    #[arg(long)]
    pin: Option<String>,
    #[arg(long)]
    json: bool,
    /// Render rationals with this many decimal digits.
    #[arg(long)]
    decimal: Option<usize>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    measure: String,
    #[command(flatten)]
    copula: CopulaSelector,
    #[command(flatten)]
    transform: TransformFlags,
    /// Largest pinning depth to tabulate (default: n - 2).
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    decimal: Option<usize>,
}

#[derive(Args)]
struct ApplyArgs {
    /// Symmetry expression, e.g. `flip{1,3}`, `perm(2,3,1)`, or products
    /// applied left to right: `flip{1}*perm(2,1)`.
    expression: String,
    #[command(flatten)]
    copula: CopulaSelector,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with one observation per line, n numeric columns, optional header.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// axioms | refreduce | complement | ubeda | mformula | mmoc | counting | frak | all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only instances of dimension at most this.
    #[arg(long)]
    n: Option<usize>,
    /// Keep only grid instances of per-axis resolution at most this.
    #[arg(long, short)]
    m: Option<usize>,
    /// Emit reports as JSON lines (the default).
    #[arg(long)]
    json: bool,
    /// Emit reports as CSV rows instead of JSON lines.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct GammaArgs {
    /// How many gamma constants to print.
    count: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    decimal: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Compute(args) => compute(args),
        Command::Table(args) => table(args),
        Command::Apply(args) => apply_cmd(args),
        Command::Fit(args) => fit(args),
        Command::Verify(args) => verify(args),
        Command::Gamma(args) => gamma_cmd(args),
    }
}

fn parse_axis_list(raw: &str) -> CliResult<Vec<usize>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad axis index `{tok}`").into())
        })
        .collect()
}

/// Accepts `pin{1,4}`, `{1,4}`, or a bare `1,4`.
fn parse_pin_selector(raw: &str) -> CliResult<Vec<usize>> {
    let raw = raw.trim();
    let body = raw
        .strip_prefix("pin")
        .unwrap_or(raw)
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .unwrap_or(raw);
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    parse_axis_list(body)
}

fn build_copula(sel: &CopulaSelector) -> CliResult<Copula> {
    build_copula_spec(&sel.copula, sel.n, sel.m)
}

fn build_copula_spec(spec: &str, n: Option<usize>, m: Option<usize>) -> CliResult<Copula> {
    let spec = spec.trim();
    if spec == "M" {
        let n = n.ok_or("--n is required for the comonotone copula")?;
        return Ok(Copula::ReflectedM(concord_core::ReflectedM::comonotone(n)?));
    }
    if spec == "Pi" {
        let n = n.ok_or("--n is required for the independence copula")?;
        let m = m.unwrap_or(1);
        return Ok(Copula::Grid(MassGrid::independence(&vec![m; n])?));
    }
    if let Some(path) = spec.strip_prefix("grid:") {
        let text = std::fs::read_to_string(path)?;
        return Ok(Copula::from_json_str(&text)?);
    }
    if let Some(body) = spec.strip_prefix("mix:") {
        let mut weights = Vec::new();
        let mut parts = Vec::new();
        for term in body.split(',') {
            let (w, part) = term
                .split_once('*')
                .ok_or_else(|| format!("mix term `{term}` needs the form <weight>*<copula>"))?;
            weights.push(parse_rational(w)?);
            parts.push(build_copula_spec(part, n, m)?);
        }
        return Ok(Copula::mixture(weights, parts)?);
    }
    Err(format!("unknown copula spec `{spec}`").into())
}

/// The symmetry given by the compute flags, flips applied after the
/// permutation (canonical order).
fn symmetry_from_flags(
    n: usize,
    flip: &Option<String>,
    perm: &Option<String>,
) -> CliResult<Symmetry> {
    let flips = match flip {
        Some(raw) => IndexSet::from_one_based(n, parse_axis_list(raw)?)?,
        None => IndexSet::empty(n),
    };
    let images = match perm {
        Some(raw) => {
            let one_based = parse_axis_list(raw)?;
            if one_based.contains(&0) {
                return Err("permutation images are 1-based".into());
            }
            one_based.iter().map(|&i| i - 1).collect()
        }
        None => (0..n).collect(),
    };
    Ok(Symmetry::canonical(flips, images)?)
}

fn render(value: &Rational, decimal: Option<usize>) -> String {
    match decimal {
        Some(digits) => to_decimal_string(value, digits),
        None => value.to_string(),
    }
}

fn compute(args: ComputeArgs) -> CliResult<ExitCode> {
    let measure = Measure::parse(&args.measure)?;
    let copula = args.transform.applied(build_copula(&args.copula)?)?;
    let n = copula.dim();
    let pin_set = match &args.pin {
        Some(raw) => Some(IndexSet::from_one_based(n, parse_pin_selector(raw)?)?),
        None => None,
    };
    let (kappa, dim) = match &pin_set {
        Some(s) => (measure.kappa_of_marginal(&copula, s)?, n - s.card()),
        None => (measure.kappa(&copula)?, n),
    };
    if args.json {
        let doc = serde_json::json!({
            "measure": measure.name(),
            "n": dim,
            "pin": pin_set.as_ref().map(|s| s.one_based()),
            "kappa": render(&kappa, args.decimal),
        });
        println!("{doc}");
    } else {
        println!("{}", render(&kappa, args.decimal));
    }
    Ok(ExitCode::SUCCESS)
}

fn table(args: TableArgs) -> CliResult<ExitCode> {
    let measure = Measure::parse(&args.measure)?;
    let copula = args.transform.applied(build_copula(&args.copula)?)?;
    let n = copula.dim();
    let depth = args.depth.unwrap_or(n.saturating_sub(2)).min(n);
    let mut rows = Vec::new();
    for d in 0..=depth {
        for s in enumerate(&IndexSet::full(n), d) {
            let kappa = measure.kappa_of_marginal(&copula, &s)?;
            rows.push((s, n - d, kappa));
        }
    }
    if args.json {
        let docs: Vec<serde_json::Value> = rows
            .iter()
            .map(|(s, dim, kappa)| {
                serde_json::json!({
                    "pin": s.one_based(),
                    "dim": dim,
                    "kappa": render(kappa, args.decimal),
                })
            })
            .collect();
        println!("{}", serde_json::Value::Array(docs));
    } else {
        println!("pin       dim  kappa_{}", measure.name());
        for (s, dim, kappa) in rows {
            println!(
                "{:<9} {:<4} {}",
                s.to_string(),
                dim,
                render(&kappa, args.decimal)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn apply_cmd(args: ApplyArgs) -> CliResult<ExitCode> {
    let copula = build_copula(&args.copula)?;
    let xi = Symmetry::parse(&args.expression, copula.dim())?;
    let image = apply(&xi, &copula)?;
    let text = image.to_json_string()?;
    match args.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn fit(args: FitArgs) -> CliResult<ExitCode> {
    let text = std::fs::read_to_string(&args.input)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(row) => rows.push(row),
            // A single unparsable leading line is a header.
            Err(_) if lineno == 0 => continue,
            Err(_) => return Err(format!("line {} is not numeric", lineno + 1).into()),
        }
    }
    let grid = MassGrid::from_ranks(&rows)?;
    let text = grid.to_json_string();
    match args.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> CliResult<ExitCode> {
    if args.json && args.csv {
        return Err("--json and --csv are mutually exclusive".into());
    }
    let suite = SuiteKind::parse(&args.suite)?;
    let mut cfg = SuiteConfig::new(suite, args.seed);
    cfg.n_max = args.n;
    cfg.m_max = args.m;
    let reports = run_suite(&cfg)?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if args.csv {
        writeln!(out, "{}", concord_core::IdentityReport::csv_header())?;
        for r in &reports {
            writeln!(out, "{}", r.csv_row())?;
        }
    } else {
        for r in &reports {
            writeln!(out, "{}", r.json_line())?;
        }
    }
    out.flush()?;

    // Human summary on stderr so report streams stay clean for piping.
    let mut by_identity: Vec<(String, usize, usize)> = Vec::new();
    for r in &reports {
        match by_identity
            .iter_mut()
            .find(|(name, _, _)| *name == r.identity)
        {
            Some(entry) => {
                entry.1 += 1;
                entry.2 += usize::from(r.failed());
            }
            None => by_identity.push((r.identity.clone(), 1, usize::from(r.failed()))),
        }
    }
    let failed: usize = by_identity.iter().map(|(_, _, f)| f).sum();
    eprintln!(
        "suite `{}` seed {}: {} reports",
        suite.name(),
        args.seed,
        reports.len()
    );
    for (name, total, fails) in &by_identity {
        eprintln!("  {:24} {:>5} checked {:>3} failed", name, total, fails);
    }
    if failed > 0 {
        eprintln!("FAILED: {failed} of {} reports", reports.len());
        Ok(ExitCode::FAILURE)
    } else {
        eprintln!("all reports passed");
        Ok(ExitCode::SUCCESS)
    }
}

fn gamma_cmd(args: GammaArgs) -> CliResult<ExitCode> {
    let values = gamma_sequence(args.count);
    if args.json {
        let docs: Vec<String> = values.iter().map(|g| render(g, args.decimal)).collect();
        println!("{}", serde_json::to_string(&docs)?);
    } else {
        let rendered: Vec<String> = values.iter().map(|g| render(g, args.decimal)).collect();
        println!("{}", rendered.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}
