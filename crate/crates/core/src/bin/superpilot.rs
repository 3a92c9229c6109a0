use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use superpilot::cli::{self, Axis, OutputFormat, Overrides, SchemeSelection, Suite};
use superpilot::pilot::gen_mwbe_pilots;
use superpilot::Error;

#[derive(Parser)]
#[command(name = "superpilot", version, about = "Superimposed vs regular pilot capacity bounds for massive MIMO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// MILB curves over transmit power or user count
    Sweep(Common),
    /// Optimal SP pilot power fraction at one operating point
    OptimalAlpha(Common),
    /// Optimal RP pilot length at one operating point
    OptimalLp(Common),
    /// Monte Carlo checks of the closed forms, as a JSON report
    Validate(ValidateArgs),
    /// Write the MWBE pilot codebook as CSV
    PilotDump(PilotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Sp,
    Rp,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    PowerDb,
    Users,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Variances,
    Traces,
    Milb,
    Density,
}

#[derive(Args)]
struct Common {
    /// JSON file with any of the options below; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    /// user counts, comma separated
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// user axis as start:stop[:step]
    #[arg(long)]
    k_range: Option<String>,
    /// coherence interval length
    #[arg(long)]
    l: Option<usize>,
    /// base-station antennas
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sigma2: Option<f64>,
    /// transmit powers in dB, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p_db: Option<Vec<f64>>,
    /// power axis as start:stop[:step] in dB
    #[arg(long, allow_hyphen_values = true)]
    p_db_range: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lp: Option<usize>,
    /// re-optimise alpha / Lp at every point (default when neither is given)
    #[arg(long)]
    optimal: bool,
    /// Monte Carlo trials per sweep point; 0 for closed form only
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// report nats per channel use instead of per coherence block
    #[arg(long)]
    per_channel_use: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = cli::DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = cli::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PilotArgs {
    #[arg(long)]
    k: usize,
    /// pilot length, defaults to K
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, Error> {
        let flags = Overrides {
            scheme: self.scheme.map(|s| match s {
                SchemeArg::Sp => SchemeSelection::Sp,
                SchemeArg::Rp => SchemeSelection::Rp,
                SchemeArg::Both => SchemeSelection::Both,
            }),
            axis: self.axis.map(|a| match a {
                AxisArg::PowerDb => Axis::PowerDb,
                AxisArg::Users => Axis::Users,
            }),
            k: self.k.clone(),
            k_range: self.k_range.clone(),
            l: self.l,
            n: self.n,
            sigma2: self.sigma2,
            p_db: self.p_db.clone(),
            p_db_range: self.p_db_range.clone(),
            alpha: self.alpha,
            lp: self.lp,
            optimal: self.optimal.then_some(true),
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            }),
            per_channel_use: self.per_channel_use.then_some(true),
        };
        let base = match &self.config {
            Some(path) => Overrides::from_json_file(path)?,
            None => Overrides::default(),
        };
        Ok(base.merged(flags))
    }
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), Error> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Returns whether the run succeeded on its own terms.
fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Sweep(args) => {
            let spec = args.overrides()?.sweep_spec()?;
            let rows = cli::run_sweep(&spec)?;
            let mut w = sink(spec.out.as_ref())?;
            cli::write_sweep(&spec, &rows, &mut w)?;
            w.flush()?;
        }
        Command::OptimalAlpha(args) => {
            let o = args.overrides()?;
            let (p_db, k, l, n, s2) = o.point()?;
            write_json(&cli::run_optimal_alpha(p_db, k, l, n, s2)?, o.out.as_ref())?;
        }
        Command::OptimalLp(args) => {
            let o = args.overrides()?;
            let (p_db, k, l, n, s2) = o.point()?;
            write_json(&cli::run_optimal_lp(p_db, k, l, n, s2)?, o.out.as_ref())?;
        }
        Command::Validate(args) => {
            let suite = match args.suite {
                SuiteArg::All => Suite::All,
                SuiteArg::Variances => Suite::Variances,
                SuiteArg::Traces => Suite::Traces,
                SuiteArg::Milb => Suite::Milb,
                SuiteArg::Density => Suite::Density,
            };
            let report = cli::run_validate(suite, args.trials, args.seed)?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                log::warn!("check {} failed: observed {} expected {} band {}", c.name, c.observed, c.expected, c.band);
            }
            write_json(&report, args.out.as_ref())?;
            return Ok(report.passed);
        }
        Command::PilotDump(args) => {
            let pilots = gen_mwbe_pilots(args.k, args.len.unwrap_or(args.k))?;
            let mut w = sink(args.out.as_ref())?;
            pilots.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let parsed = Cli::parse();
    match run(parsed.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parameter(_) | Error::Dimension(_) | Error::DensityShape { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
