use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mccrepair::codes::spec::CodeSpec;
use mccrepair::codes::{complement_exponents, MccCode};
use mccrepair::oracle;
use mccrepair::repair::{self, CodewordOracle, Scheme};
use mccrepair::report;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Monomial-Cartesian codes with trace repair.
#[derive(Parser)]
#[command(name = "mccrepair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and print its parameters.
    Build(SpecArgs),
    /// Print a code description as JSON.
    Inspect(SpecArgs),
    /// Run the brute-force check suite; exits nonzero on any failure.
    Verify(VerifyArgs),
    /// Repair simulated erasures and emit one CSV record per trial.
    RepairSim(SimArgs),
    /// Rate versus bandwidth for RM, ARM1 and ARM2 over every valid k.
    Sweep(SweepArgs),
    /// Maximum-k rates and bandwidth rates as t grows.
    Asymptotics(AsymptoticsArgs),
    /// Codes of a given dimension across families.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Erasure patterns checked per scheme.
    #[arg(long, default_value_t = 20)]
    max_patterns: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Single,
    /// The family's own two-erasure scheme.
    Two,
    /// The general two-erasure scheme for any decreasing code.
    TwoDmcc,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = SchemeArg::Single)]
    scheme: SchemeArg,
    /// `all`, `random:N[:SEED]`, or comma-separated patterns; a two-erasure
    /// pattern is written `a:b`.
    #[arg(long, default_value = "all")]
    erase: String,
    /// Codewords per erasure pattern.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 5)]
    q: u64,
    #[arg(long, default_value_t = 4)]
    t: u32,
    #[arg(long, default_value_t = 3)]
    m: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    t_min: u32,
    #[arg(long, default_value_t = 12)]
    t_max: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Target dimension.
    #[arg(long)]
    dimension: u64,
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Base field degree: `q = p^e`.
    #[arg(long, default_value_t = 1)]
    e: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<MccCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = CodeSpec::from_json(&text)?;
    Ok(spec.build()?)
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build(args) => {
            let code = load(&args.spec)?;
            let text = format!(
                "family={} q={} t={} sizes={:?} axis_origin={:?} length={} dimension={} rate={}\n",
                code.family().name(),
                code.tower().q(),
                code.tower().t(),
                code.sizes(),
                code.set().axis_origin(),
                code.len(),
                code.dimension(),
                code.rate()
            );
            emit(&args.output, &text)?;
            Ok(true)
        }
        Command::Inspect(args) => {
            let code = load(&args.spec)?;
            emit(&args.output, &inspect(&code)?)?;
            Ok(true)
        }
        Command::Verify(args) => {
            let code = load(&args.spec)?;
            let reports = oracle::full_suite(&code, args.max_patterns);
            let mut text = String::new();
            for r in &reports {
                let status = serde_json::to_value(r.status)?;
                text.push_str(&format!("{} {}: {}", status.as_str().unwrap_or("?").to_uppercase(), r.name, r.instance));
                match &r.witness {
                    Some(w) => text.push_str(&format!(" -- witness: {w}\n")),
                    None => text.push_str(&format!(" -- {}\n", r.detail)),
                }
            }
            emit(&args.output, &text)?;
            Ok(reports.iter().all(|r| !r.failed()))
        }
        Command::RepairSim(args) => simulate(&args),
        Command::Sweep(args) => {
            emit(&args.output, &report::figure_sweep(args.q, args.t, args.m)?.to_csv())?;
            Ok(true)
        }
        Command::Asymptotics(args) => {
            if args.t_min > args.t_max {
                bail!("--t-min exceeds --t-max");
            }
            emit(&args.output, &report::asymptotics(args.q, args.m, args.t_min..=args.t_max)?.to_csv())?;
            Ok(true)
        }
        Command::Compare(args) => {
            emit(&args.output, &report::compare(args.dimension, args.p, args.e, args.seed)?.to_csv())?;
            Ok(true)
        }
    }
}

fn inspect(code: &MccCode) -> Result<String> {
    let dual: Vec<_> = complement_exponents(code.exponents(), &code.sizes())?.iter().cloned().collect();
    let axes: Vec<serde_json::Value> = (0..code.arity())
        .map(|j| {
            serde_json::json!({
                "axis": j,
                "size": code.sizes()[j],
                "edge_disjoint": code.edge_disjoint(j).unwrap_or(false),
            })
        })
        .collect();
    let value = serde_json::json!({
        "tower": code.tower().info(),
        "family": code.family(),
        "sizes": code.sizes(),
        "axis_origin": code.set().axis_origin(),
        "subsets": (0..code.arity()).map(|i| code.set().subset(i).to_vec()).collect::<Vec<_>>(),
        "length": code.len(),
        "dimension": code.dimension(),
        "rate": code.rate(),
        "decreasing": code.exponents().is_decreasing(),
        "axes": axes,
        "exponents": code.exponents().iter().collect::<Vec<_>>(),
        "dual_exponents": dual,
        "lambda": code.lambda(),
    });
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

fn resolve_scheme(code: &MccCode, arg: SchemeArg) -> Scheme {
    match arg {
        SchemeArg::Single => Scheme::Single,
        SchemeArg::Two if code.family().is_acar2() => Scheme::TwoAcar2,
        SchemeArg::Two | SchemeArg::TwoDmcc => Scheme::TwoDmcc,
    }
}

fn parse_patterns(code: &MccCode, scheme: Scheme, erase: &str, seed: u64) -> Result<Vec<Vec<usize>>> {
    let width = repair::erasure_count(scheme);
    if erase == "all" {
        return Ok(oracle::erasure_patterns(code, scheme));
    }
    if let Some(rest) = erase.strip_prefix("random:") {
        let mut parts = rest.split(':');
        let count: usize = parts.next().unwrap_or_default().parse().context("random:N needs a count")?;
        let seed = match parts.next() {
            Some(s) => s.parse().context("random:N:SEED needs an integer seed")?,
            None => seed,
        };
        let mut all = oracle::erasure_patterns(code, scheme);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        all.shuffle(&mut rng);
        all.truncate(count);
        return Ok(all);
    }
    erase
        .split(',')
        .map(|item| {
            let pattern = item
                .split(':')
                .map(|p| p.trim().parse::<usize>().with_context(|| format!("bad position {p:?}")))
                .collect::<Result<Vec<_>>>()?;
            if pattern.len() != width {
                bail!("scheme {scheme} needs {width} position(s) per pattern, got {item:?}");
            }
            if pattern.iter().collect::<BTreeSet<_>>().len() != width {
                bail!("pattern {item:?} repeats a position");
            }
            if let Some(&p) = pattern.iter().find(|&&p| p >= code.len()) {
                bail!("position {p} is out of range for length {}", code.len());
            }
            Ok(pattern)
        })
        .collect()
}

fn simulate(args: &SimArgs) -> Result<bool> {
    let code = load(&args.spec)?;
    let scheme = resolve_scheme(&code, args.scheme);
    let patterns = parse_patterns(&code, scheme, &args.erase, args.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let n = code.len() as u64;
    let t = code.tower().t() as u64;
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "trial",
        "positions",
        "axis",
        "scheme",
        "recovered_ok",
        "bandwidth",
        "bitwidth",
        "bound",
        "printed_bound",
        "slack",
        "printed_slack",
    ])?;
    let mut all_ok = true;
    let mut skipped = Vec::new();
    let mut trial = 0;
    for erased in &patterns {
        let plan = match repair::plan(&code, scheme, erased) {
            Ok(p) => p,
            Err(e @ repair::RepairError::NoSeparatingAxis(..)) => {
                skipped.push(format!("{erased:?}: {e}"));
                continue;
            }
            Err(e) => bail!("planning {erased:?}: {e}"),
        };
        let n_j = code.sizes()[plan.axis] as u64;
        let (bound, printed) = match scheme {
            Scheme::Single => (repair::single_bound(n, n_j, t), None),
            _ => (repair::two_bound(n, n_j, t), Some(repair::two_bound_printed(n, n_j, t))),
        };
        for _ in 0..args.trials {
            let word = code.random_codeword(&mut rng);
            let mut helper = CodewordOracle::new(code.tower(), word.clone(), erased);
            let result = repair::execute(code.tower(), &plan, &mut helper)?;
            let ok = result.recovered.iter().all(|&(p, v)| word[p] == v) && helper.calls() == plan.bandwidth();
            all_ok &= ok;
            let b = result.bandwidth as i64;
            writer.write_record([
                trial.to_string(),
                erased.iter().map(usize::to_string).collect::<Vec<_>>().join(":"),
                plan.axis.to_string(),
                scheme.to_string(),
                ok.to_string(),
                result.bandwidth.to_string(),
                result.bitwidth.to_string(),
                bound.to_string(),
                printed.map(|p| p.to_string()).unwrap_or_default(),
                (bound as i64 - b).to_string(),
                printed.map(|p| (p - b).to_string()).unwrap_or_default(),
            ])?;
            trial += 1;
        }
    }
    let mut text = String::from_utf8(writer.into_inner()?)?;
    for s in skipped {
        text.push_str(&format!("# skipped {s}\n"));
    }
    emit(&args.output, &text)?;
    Ok(all_ok)
}
