use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use discrim_core::constructions::{data_hiding_pair, lo_vs_locc_delta, uniform_pair, werner_pair};
use discrim_core::experiments::{emit, run, write_records, ExperimentOutput};
use discrim_core::hermitian::{read_operator, write_operator};
use discrim_core::norms::{all_norm, locc_one_way_lower, ppt_norm, uniform_norm_estimate};
use discrim_core::{Error, ExperimentConfig, ExperimentName, Hermitian64, RngStream};
use serde_json::json;

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "discrim",
    version,
    about = "Distinguishability norms under restricted measurement classes",
    after_help = "Solver settings are overridden with --solver.KEY VALUE, e.g. --solver.tolerance 1e-7."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available experiments.
    List,
    /// Run a named experiment.
    Run(RunArgs),
    /// Write the difference operator of a construction in matrix text format.
    Construct(ConstructArgs),
    /// Evaluate a norm of an operator read from a matrix text file.
    Norm(NormArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment name (see `discrim list`); optional when --config names one.
    experiment: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record file; the summary goes to `<out>.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "jsonl"])]
    format: Option<String>,
    /// Monte-Carlo sample count for sampling experiments.
    #[arg(long)]
    samples: Option<usize>,
    /// Net resolution for net-approx.
    #[arg(long)]
    epsilon: Option<f64>,
    /// JSON experiment config; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Solver override KEY=VALUE (repeatable).
    #[arg(long = "solver", value_name = "KEY=VALUE")]
    solver: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Werner,
    DataHiding,
    LoVsLocc,
    Uniform,
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    All,
    Ppt,
    Locc,
    Uniform,
}

#[derive(clap::Args)]
struct NormArgs {
    #[arg(value_enum)]
    norm: NormKind,
    /// Matrix text file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count for the uniform norm.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long = "solver", value_name = "KEY=VALUE")]
    solver: Vec<String>,
}

/// Rewrites `--solver.KEY VALUE` and `--solver.KEY=VALUE` into `--solver KEY=VALUE`.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.peekable();
    while let Some(a) = it.next() {
        match a.strip_prefix("--solver.") {
            Some(rest) if rest.contains('=') => {
                out.push("--solver".into());
                out.push(rest.to_string());
            }
            Some(key) => {
                out.push("--solver".into());
                let value = it.next().unwrap_or_default();
                out.push(format!("{key}={value}"));
            }
            None => out.push(a),
        }
    }
    out
}

fn parse_overrides(pairs: &[String]) -> Result<Vec<(String, String)>, Error> {
    pairs
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Validation(format!("solver override {p:?} is not KEY=VALUE")))
        })
        .collect()
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&args.config, &args.experiment) {
        (Some(path), name) => {
            let cfg = ExperimentConfig::from_json_file(path)?;
            if let Some(name) = name {
                let n: ExperimentName = name.parse()?;
                if n != cfg.name {
                    return Err(Error::Validation(format!(
                        "experiment {n} conflicts with config file naming {}",
                        cfg.name
                    )));
                }
            }
            cfg
        }
        (None, Some(name)) => ExperimentConfig::default_for(name.parse()?),
        (None, None) => {
            return Err(Error::Validation("name an experiment or pass --config".into()));
        }
    };
    if let Some(d) = &args.d {
        cfg.d_values = d.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(f) = &args.format {
        cfg.format = f.parse()?;
    }
    if args.samples.is_some() {
        cfg.samples = args.samples;
    }
    if args.epsilon.is_some() {
        cfg.epsilon = args.epsilon;
    }
    for (k, v) in parse_overrides(&args.solver)? {
        cfg.solver.insert(k, v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(out: &ExperimentOutput, w: &mut impl Write) -> io::Result<()> {
    for e in &out.summary.entries {
        match e.d {
            Some(d) => writeln!(w, "{} d={} {}", e.metric, d, e.value)?,
            None => writeln!(w, "{} {}", e.metric, e.value)?,
        }
    }
    for f in &out.summary.fits {
        writeln!(
            w,
            "slope {} {:.4} (r2 {:.4})",
            f.metric, f.fit.slope, f.fit.r_squared
        )?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let cfg = build_config(&args)?;
    let out = run(&cfg)?;
    match &cfg.output_path {
        Some(path) => {
            emit(&out, cfg.format, path)?;
            print_summary(&out, &mut io::stdout().lock())?;
        }
        None => {
            write_records(&out.records, cfg.format, io::stdout().lock())?;
            print_summary(&out, &mut io::stderr().lock())?;
        }
    }
    Ok(())
}

fn cmd_construct(args: ConstructArgs) -> Result<(), Error> {
    let mut rng = RngStream::new(args.seed, 0).generator();
    let op: Hermitian64 = match args.construction {
        Construction::Werner => werner_pair(args.d)?.difference(),
        Construction::DataHiding => data_hiding_pair(args.d, &mut rng)?.difference(),
        Construction::LoVsLocc => lo_vs_locc_delta(args.d, &mut rng)?.expand(),
        Construction::Uniform => uniform_pair(args.d, &mut rng)?.difference(),
    };
    match args.out {
        Some(path) => write_operator(&op, io::BufWriter::new(File::create(path)?)),
        None => write_operator(&op, io::stdout().lock()),
    }
}

fn cmd_norm(args: NormArgs) -> Result<(), Error> {
    let delta: Hermitian64 = read_operator(BufReader::new(File::open(&args.input)?))?;
    let mut solver = discrim_core::SolverConfig::default();
    for (k, v) in parse_overrides(&args.solver)? {
        solver.set(&k, &v)?;
    }
    let mut rng = RngStream::new(args.seed, 0).generator();
    let value = match args.norm {
        NormKind::All => json!({ "norm": "all", "value": all_norm(&delta) }),
        NormKind::Ppt => {
            let r = ppt_norm(&delta, &solver)?.report;
            json!({ "norm": "ppt", "report": r })
        }
        NormKind::Locc => {
            let r = locc_one_way_lower(&delta, &solver, &mut rng)?;
            json!({ "norm": "locc_one_way_lower", "value": r.value, "iterations": r.iterations, "starts": r.starts })
        }
        NormKind::Uniform => {
            let e = uniform_norm_estimate(&delta, args.samples, &mut rng)?;
            json!({ "norm": "uniform", "estimate": e })
        }
    };
    println!("{value}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize_args(std::env::args()));
    let result = match cli.command {
        Command::List => {
            for n in ExperimentName::ALL {
                println!("{:<18} {}", n.as_str(), n.description());
            }
            Ok(())
        }
        Command::Run(a) => cmd_run(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Norm(a) => cmd_norm(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::from(EXIT_IO)
            }
        }
    }
}
