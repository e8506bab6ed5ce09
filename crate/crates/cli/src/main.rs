use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paradiff::experiments::{run_experiment, ExperimentConfig, ExperimentKind};
use paradiff::{build_partition, make_grid};

const EXIT_CODES: &str = "\
Exit codes:
  0  every verdict passed
  1  usage or configuration error
  2  a verdict or invariant check failed";

const RATIO_HELP: &str = "\
CSV columns:
  sweep        grid depth J (depth sweeps) or block count M (block sweeps)
  trial        trial index
  input_norm   domain norm of the input
  output_norm  codomain norm of the output
  ratio        output_norm / input_norm
Lines starting with `#` carry run metadata before the header and the
per-sweep summaries (max, median) and the verdict after the rows.";

const GROWTH_HELP: &str = "\
CSV columns:
  blocks         block count M of the truncation
  top_block      highest block of the truncation
  operator_norm  exact grid L2 operator norm
  control_norm   same for the control ratio on the same blocks
  f21_ratio      largest domain-to-codomain ratio over the random trials
Lines starting with `#` carry metadata and the verdict.";

const SUPPORT_HELP: &str = "\
CSV columns:
  trial     trial index
  symbol    random, ching-r<ratio> or ching-r<control_ratio>
  check     support-rule, off-diagonal, diagonal-ball or diagonal-annulus
  k         localization scale (0 for the support rule)
  observed  number of output frequencies above the cutoff
  passed    whether they all lie in the claimed region
Lines starting with `#` carry metadata and the verdict.";

const DUMP_HELP: &str = "\
CSV columns:
  j          block index
  k1[,k2]    lattice frequency
  value      block value at that frequency (nonzero entries only)";

/// Littlewood-Paley, paradifferential splitting and boundedness experiments
/// for type 1,1 operators on the discretized torus.
#[derive(Parser)]
#[command(name = "paradiff", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Key-value configuration file (`key = value` lines, `#` comments).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed of the random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    /// Spatial dimension n (1 or 2).
    #[arg(long)]
    dim: Option<usize>,
    /// Grid depth J, a list `6,8` or a range `6..10`.
    #[arg(long, value_name = "J")]
    depth: Option<String>,
}

#[derive(Args)]
struct DumpArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    /// Spatial dimension n (1 or 2).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Grid depth J.
    #[arg(long, value_name = "J", default_value_t = 6)]
    depth: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Ratios of a symbol between a domain and a codomain norm across depths.
    #[command(after_help = RATIO_HELP)]
    Boundedness(RunArgs),
    /// Lacunary inputs matched to Ching blocks, ratio against block count.
    #[command(after_help = RATIO_HELP)]
    Sharpness(RunArgs),
    /// Ratios between F^{s+d}_{p,q} and F^s_{p,q} across depths.
    #[command(after_help = RATIO_HELP)]
    Negsmooth(RunArgs),
    /// Exact L2 operator norms of Ching truncations against block count.
    #[command(name = "l2growth", after_help = GROWTH_HELP)]
    L2growth(RunArgs),
    /// Support-rule and localization checks on random and Ching symbols.
    #[command(after_help = SUPPORT_HELP)]
    Supportcheck(RunArgs),
    /// The dyadic partition sampled on the frequency lattice.
    #[command(name = "partition-dump", after_help = DUMP_HELP)]
    PartitionDump(DumpArgs),
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<paradiff::Error> for Failure {
    fn from(e: paradiff::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("verdict: fail ({msg})");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let (kind, args) = match command {
        Command::Boundedness(a) => (ExperimentKind::Boundedness, a),
        Command::Sharpness(a) => (ExperimentKind::Sharpness, a),
        Command::Negsmooth(a) => (ExperimentKind::NegativeSmoothness, a),
        Command::L2growth(a) => (ExperimentKind::L2Growth, a),
        Command::Supportcheck(a) => (ExperimentKind::SupportCheck, a),
        Command::PartitionDump(a) => return partition_dump(a),
    };
    let cfg = configure(kind, &args)?;
    let output = run_experiment(&cfg)?;
    let mut sink = open_sink(cfg.output.as_ref())?;
    match args.out {
        Format::Csv => output.write_csv(&mut sink)?,
        Format::Json => output.write_json(&mut sink)?,
    }
    sink.flush()?;
    let verdict = output.verdict();
    if verdict.passed {
        eprintln!("verdict: pass ({})", verdict.detail);
        Ok(())
    } else {
        Err(Failure::Check(verdict.detail.clone()))
    }
}

/// Defaults, then the file, then the flags.
fn configure(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::new(kind);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dim) = args.dim {
        cfg.dim = dim;
    }
    if let Some(depth) = &args.depth {
        cfg.set("depths", depth)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn partition_dump(args: DumpArgs) -> Result<(), Failure> {
    let grid = make_grid(args.dim, args.depth)?;
    let partition = build_partition(grid);
    let mut out = open_sink(None)?;
    match args.out {
        Format::Csv => partition.write_dump(&mut out)?,
        Format::Json => {
            let entries: Vec<_> = partition.entries().collect();
            serde_json::to_writer_pretty(&mut out, &entries).map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    let worst = (0..grid.len())
        .map(|i| ((0..=partition.jmax()).map(|j| partition.block(j)[i]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    if worst > 1e-12 {
        return Err(Failure::Check(format!("blocks sum to 1 only within {worst:e}")));
    }
    Ok(())
}
