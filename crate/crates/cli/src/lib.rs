//! Experiment runner for percolated quantum walks.
//!
//! Settings come from a flat `key = value` file and `--key value` flags
//! (flags win). Results are written as CSV tables or a single JSON record.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod record;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use record::ResultRecord;

#[derive(Debug, Parser)]
#[command(name = "percwalk", version, about = "Quantum walks on dynamically percolated lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a walker and report zone probabilities per step.
    Simulate(RunArgs),
    /// Theta-averaged initial distance for a = 1.0 .. 0.5.
    Table1(RunArgs),
    /// Analytic relaxation curves, rate functions and tuned rates.
    Curves(RunArgs),
    /// Time for the relaxation curve to reach --target.
    MixingTime(RunArgs),
    /// Noise rate that makes the relaxation curve exact.
    GammaTune(RunArgs),
    /// Compare the sampler against exact enumeration.
    Validate(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Omit the `# generated` line from CSV and the timestamp from JSON.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Increase log verbosity.
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Every configuration key as a flag; values are parsed by the config layer.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Lattice side length L (N = L² vertices).
    #[arg(long, alias = "lattice_side", alias = "side")]
    pub lattice_side: Option<String>,
    /// Probability that each bond is open at a step.
    #[arg(long)]
    pub lambda: Option<String>,
    /// none, dephasing or bitflip.
    #[arg(long, alias = "noise_kind", alias = "noise")]
    pub noise_kind: Option<String>,
    /// Noise rate Γ.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Duration of one step.
    #[arg(long)]
    pub dt: Option<String>,
    /// Coin angle α (accepts forms like pi/2).
    #[arg(long, alias = "coin_alpha", allow_hyphen_values = true)]
    pub coin_alpha: Option<String>,
    /// Coin angle β.
    #[arg(long, alias = "coin_beta", allow_hyphen_values = true)]
    pub coin_beta: Option<String>,
    /// Bloch radius of the initial coin state.
    #[arg(long)]
    pub a: Option<String>,
    /// Polar angle of the initial coin state.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Azimuthal angle of the initial coin state.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Number of walk steps.
    #[arg(long)]
    pub steps: Option<String>,
    /// Monte Carlo trajectory count.
    #[arg(long)]
    pub trajectories: Option<String>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<String>,
    /// auto, pure-state or density-matrix.
    #[arg(long)]
    pub mode: Option<String>,
    /// auto, exact or monte-carlo.
    #[arg(long)]
    pub engine: Option<String>,
    /// Largest lattice side accepted by simulate.
    #[arg(long, alias = "max_side")]
    pub max_side: Option<String>,
    /// Vertex count N used by the analytic commands.
    #[arg(long)]
    pub vertices: Option<String>,
    /// Closeness parameter for dephasing (default 1/(2N√N)).
    #[arg(long, alias = "delta_dep")]
    pub delta_dep: Option<String>,
    /// Closeness parameter for bit flip (default 1/N).
    #[arg(long, alias = "delta_bit")]
    pub delta_bit: Option<String>,
    /// Target trace distance for mixing-time.
    #[arg(long)]
    pub target: Option<String>,
    /// Last time point of the curves.
    #[arg(long, alias = "t_max")]
    pub t_max: Option<String>,
    /// Number of time points in the curves.
    #[arg(long)]
    pub points: Option<String>,
    /// continuous or per-step decay.
    #[arg(long)]
    pub convention: Option<String>,
    /// Output file; multi-series CSV writes <stem>_<series>.csv.
    #[arg(long, alias = "output_path", alias = "output")]
    pub output_path: Option<String>,
    /// csv or json.
    #[arg(long, alias = "output_format", alias = "format")]
    pub output_format: Option<String>,
}

impl Overrides {
    pub fn pairs(&self) -> Vec<(String, String)> {
        let fields = [
            ("lattice-side", &self.lattice_side),
            ("lambda", &self.lambda),
            ("noise-kind", &self.noise_kind),
            ("gamma", &self.gamma),
            ("dt", &self.dt),
            ("coin-alpha", &self.coin_alpha),
            ("coin-beta", &self.coin_beta),
            ("a", &self.a),
            ("theta", &self.theta),
            ("phi", &self.phi),
            ("steps", &self.steps),
            ("trajectories", &self.trajectories),
            ("seed", &self.seed),
            ("mode", &self.mode),
            ("engine", &self.engine),
            ("max-side", &self.max_side),
            ("vertices", &self.vertices),
            ("delta-dep", &self.delta_dep),
            ("delta-bit", &self.delta_bit),
            ("target", &self.target),
            ("t-max", &self.t_max),
            ("points", &self.points),
            ("convention", &self.convention),
            ("output-path", &self.output_path),
            ("output-format", &self.output_format),
        ];
        fields.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default()).filter_level(level).try_init();
}

/// Runs one parsed invocation and returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    let (name, args) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Table1(a) => ("table1", a),
        Command::Curves(a) => ("curves", a),
        Command::MixingTime(a) => ("mixing-time", a),
        Command::GammaTune(a) => ("gamma-tune", a),
        Command::Validate(a) => ("validate", a),
    };
    init_logging(args.verbose);
    let cfg = ExperimentConfig::load(args.config.as_deref(), &args.overrides.pairs())?;
    log::info!("running {name}");
    let mut passed = true;
    let mut record = match cli.command {
        Command::Simulate(_) => commands::cmd_simulate(&cfg)?,
        Command::Table1(_) => commands::cmd_table1(&cfg)?,
        Command::Curves(_) => commands::cmd_curves(&cfg)?,
        Command::MixingTime(_) => commands::cmd_mixing_time(&cfg)?,
        Command::GammaTune(_) => commands::cmd_gamma_tune(&cfg)?,
        Command::Validate(_) => {
            let (rec, ok) = commands::cmd_validate(&cfg)?;
            passed = ok;
            rec
        }
    };
    let timestamp = (!args.no_timestamp)
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    record.provenance.created = timestamp.clone();
    let written = output::emit(&record, cfg.output_format, cfg.output_path.as_deref(), timestamp.as_deref())?;
    for p in written {
        log::info!("wrote {}", p.display());
    }
    if !passed {
        return Err(CliError::ValidationFailed("sampler disagrees with exact enumeration".into()));
    }
    Ok(error::EXIT_OK)
}

/// Parses `args` (including the program name) and runs. Errors are printed
/// to stderr; the return value is the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
