use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nhmagic::verify::VerifyOptions;
use nhmagic_cli::commands;
use nhmagic_cli::config::{self, EvolveConfig, SpectrumConfig, SweepConfig, TrajectoriesConfig};
use nhmagic_cli::{CliError, CliResult};

/// Magic steady states of (stochastic) non-Hermitian dissipative qubits.
#[derive(Parser)]
#[command(name = "nhmagic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Non-Hermitian and averaged spectra, gap and steady state.
    Spectrum(Common),
    /// Deterministic time evolution.
    Evolve(Common),
    /// Stochastic trajectory ensemble.
    Trajectories {
        #[command(flatten)]
        common: Common,
        /// Master seed; overrides the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Phase diagram over noise strength and decay rate.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Master seed; overrides the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the acceptance checks.
    Verify {
        /// Skip the stochastic checks.
        #[arg(long)]
        quick: bool,
        /// Also write verify.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

fn require<T>(path: &Option<PathBuf>) -> CliResult<T>
where
    T: serde::de::DeserializeOwned,
{
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            config::parse(&text)
        }
        None => Err(CliError::Config("this command needs --config".into())),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("at `--threads`: {e}")))?;
    }
    let report = |paths: Vec<PathBuf>| {
        for p in paths {
            log::info!("wrote {}", p.display());
        }
    };
    match cli.command {
        Command::Spectrum(c) => {
            let cfg: SpectrumConfig = require(&c.config)?;
            report(vec![commands::spectrum(&cfg, &c.out)?]);
        }
        Command::Evolve(c) => {
            let cfg: EvolveConfig = require(&c.config)?;
            report(commands::evolve(&cfg, &c.out)?);
        }
        Command::Trajectories { common, seed } => {
            let mut cfg: TrajectoriesConfig = config::load(common.config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            report(commands::trajectories(&cfg, &common.out)?);
        }
        Command::Sweep { common, seed } => {
            let mut cfg: SweepConfig = config::load(common.config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            report(commands::sweep(&cfg, &common.out)?);
        }
        Command::Verify { quick, out, corrupt } => {
            commands::verify(VerifyOptions { quick, corrupt }, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
