use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, ArgGroup, Args, Parser, Subcommand};
use qsw_cli::{emit_plot_data, read_container, run, CliError, Overrides, Quantity, RunConfig, TimeSpec};

#[derive(Parser)]
#[command(name = "qsw", version, about = "Quantum stochastic walk simulation")]
struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the walk described by a TOML configuration.
    Run(RunArgs),
    /// Print the metadata and array shapes of a result container.
    Inspect { container: PathBuf },
    /// Write comma-separated series from a result container.
    PlotData {
        container: PathBuf,
        /// populations, population:K or coherence_norm; repeatable or comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        quantity: Vec<String>,
        /// Destination file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(group = ArgGroup::new("series").multiple(true).conflicts_with("t"))]
struct RunArgs {
    config: PathBuf,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, group = "series")]
    t1: Option<f64>,
    #[arg(long, group = "series")]
    tq: Option<f64>,
    #[arg(long, group = "series")]
    steps: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Inspect { container } => cmd_inspect(&container),
        Command::PlotData {
            container,
            quantity,
            out,
        } => cmd_plot(&container, &quantity, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    let time = match (args.t, args.t1, args.tq, args.steps) {
        (Some(t), ..) => Some(TimeSpec::Single { t }),
        (None, Some(t1), Some(tq), Some(steps)) => Some(TimeSpec::Series { t1, tq, steps }),
        (None, None, None, None) => None,
        _ => return Err(CliError::Config("--t1, --tq and --steps must be given together".into())),
    };
    cfg.apply(Overrides {
        omega: args.omega,
        time,
        workers: args.workers,
        output: args.out,
    })?;
    let out = cfg.output.clone().unwrap_or_else(|| args.config.with_extension("qswc"));
    let c = run(&cfg, &out)?;
    log::info!("wrote {}", out.display());
    if let Some(p) = c.array("populations") {
        let last = p.rows().last().unwrap_or_default();
        println!("{}: final populations {:?}", out.display(), last);
    } else {
        println!("{}", out.display());
    }
    Ok(())
}

fn cmd_inspect(path: &Path) -> Result<(), CliError> {
    let c = read_container(path)?;
    let text = serde_json::to_string_pretty(&c.metadata).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    for a in c.arrays() {
        println!("{:<16} {:?}", a.name, a.shape);
    }
    Ok(())
}

fn cmd_plot(path: &Path, quantity: &[String], out: Option<&Path>) -> Result<(), CliError> {
    let quantities = quantity
        .iter()
        .map(|q| q.parse())
        .collect::<Result<Vec<Quantity>, _>>()?;
    let c = read_container(path)?;
    match out {
        Some(p) => {
            let mut buf = Vec::new();
            emit_plot_data(&c, &quantities, &mut buf)?;
            let mut f = BufWriter::new(File::create(p).map_err(|e| CliError::Io(e.to_string()))?);
            f.write_all(&buf)
                .and_then(|_| f.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
        None => emit_plot_data(&c, &quantities, io::stdout().lock()),
    }
}
