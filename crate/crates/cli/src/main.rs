//! `macrogame`: train, evaluate and compare the two learning schemes on the
//! macroeconomic game from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macrogame::error::Error;
use macrogame::harness::{self, RunConfig};

#[derive(Parser)]
#[command(name = "macrogame", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (falls back to $OUT_DIR).
    #[arg(long, value_name = "DIR", env = "OUT_DIR")]
    out: PathBuf,
    /// Cap on worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one policy per agent type by independent PPO.
    TrainImarl {
        #[command(flatten)]
        common: Common,
        /// Training episodes.
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Run PSRO, persisting strategies and the empirical game each epoch.
    TrainPsro {
        #[command(flatten)]
        common: Common,
        /// Best-response training episodes per oracle call.
        #[arg(long)]
        episodes: Option<usize>,
        /// Simulations per empirical-game cell.
        #[arg(long)]
        runs: Option<usize>,
        /// PSRO epochs.
        #[arg(long)]
        epochs: Option<usize>,
        /// Continue from the state saved in --out.
        #[arg(long)]
        resume: bool,
    },
    /// Play test episodes and write episode logs.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// IMARL policy directory or PSRO output directory.
        #[arg(long, value_name = "DIR")]
        policies: PathBuf,
        #[arg(long)]
        episodes: Option<usize>,
        /// Greedy actions instead of sampling.
        #[arg(long)]
        deterministic: bool,
    },
    /// Regret of both schemes against the union of their strategies.
    Regret {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR")]
        imarl: PathBuf,
        #[arg(long, value_name = "DIR")]
        psro: PathBuf,
        /// Test episodes per deviation cell.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        deterministic: bool,
    },
    /// Stylized-fact checks over an evaluation directory.
    Facts {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR")]
        logs: PathBuf,
    },
    /// Export the empirical game of a PSRO run.
    ExportGame {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR")]
        psro: PathBuf,
    },
}

impl Command {
    fn config_path(&self) -> &PathBuf {
        let common = match self {
            Command::TrainImarl { common, .. }
            | Command::TrainPsro { common, .. }
            | Command::Evaluate { common, .. }
            | Command::Regret { common, .. }
            | Command::Facts { common, .. }
            | Command::ExportGame { common, .. } => common,
        };
        &common.config
    }
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn checked(cfg: RunConfig) -> Result<RunConfig, Error> {
    cfg.validate()?;
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).unwrap_or_default());
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::TrainImarl { common, episodes } => {
            let mut cfg = load(&common)?;
            if let Some(n) = episodes {
                cfg.imarl.episodes = n;
            }
            let summary = with_jobs(common.jobs, || {
                harness::train_imarl_command(&checked(cfg)?, &common.out)
            })?;
            print_json(&summary);
        }
        Command::TrainPsro {
            common,
            episodes,
            runs,
            epochs,
            resume,
        } => {
            let mut cfg = load(&common)?;
            if let Some(n) = episodes {
                cfg.psro.episodes_per_oracle = n;
            }
            if let Some(n) = runs {
                cfg.psro.runs_per_cell = n;
            }
            if let Some(n) = epochs {
                cfg.psro.epochs = n;
            }
            let summary = with_jobs(common.jobs, || {
                harness::train_psro_command(&checked(cfg)?, &common.out, resume)
            })?;
            print_json(&summary);
        }
        Command::Evaluate {
            common,
            policies,
            episodes,
            deterministic,
        } => {
            let mut cfg = load(&common)?;
            if let Some(n) = episodes {
                cfg.evaluation.episodes = n;
            }
            cfg.evaluation.deterministic |= deterministic;
            let summary = with_jobs(common.jobs, || {
                harness::evaluate_command(&checked(cfg)?, &policies, &common.out)
            })?;
            print_json(&summary);
        }
        Command::Regret {
            common,
            imarl,
            psro,
            runs,
            deterministic,
        } => {
            let mut cfg = load(&common)?;
            if let Some(n) = runs {
                cfg.psro.final_eval_runs = n;
            }
            cfg.evaluation.deterministic |= deterministic;
            let outcome = with_jobs(common.jobs, || {
                harness::regret_command(&checked(cfg)?, &imarl, &psro, &common.out)
            })?;
            print!("{}", outcome.table);
        }
        Command::Facts { common, logs } => {
            let cfg = checked(load(&common)?)?;
            let verdicts = harness::facts_command(&cfg, &logs, &common.out)?;
            for v in &verdicts {
                print_json(v);
            }
        }
        Command::ExportGame { common, psro } => {
            let cfg = checked(load(&common)?)?;
            harness::export_game_command(&cfg, &psro, &common.out)?;
            println!("{}", common.out.join("game.json").display());
        }
    }
    Ok(())
}

fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> Result<T, Error> + Send) -> Result<T, Error>
where
    T: Send,
{
    match jobs {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(f),
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let path = cli.command.config_path();
    if !path.is_file() {
        eprintln!("error kind=usage msg=config file not found: {}", path.display());
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} msg={}", e.kind(), one_line(&e.to_string()));
            ExitCode::from(1)
        }
    }
}

