use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use hemsim::commands;
use hemsim::config::Overrides;
use hemsim::harness::BillingMode;

/// Household load scheduling under time-of-use tariffs, with forged-price
/// attack experiments and exact integer cost accounting.
#[derive(Parser)]
#[command(name = "hemsim", version, about, max_term_width = 100)]
struct Cli {
    /// Replace the config seed list with this single seed.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Directory for CSV artifacts; overrides the config.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Which tariff the bill is computed from: true_tariff or forged_tariff.
    #[arg(long, global = true, value_name = "MODE")]
    billing_mode: Option<BillingMode>,

    /// Largest search space the oracle will enumerate; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    oracle_limit: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Experiment config file (TOML).
    #[arg(short, long, value_name = "FILE")]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured optimizers on the clean tariff and report costs.
    Optimize(ConfigArg),
    /// Run clean and attacked legs per optimizer and score resilience.
    Attack(ConfigArg),
    /// Enumerate every feasible schedule and report the exact optimum.
    Oracle(ConfigArg),
    /// Load and check the config and its input files without running anything.
    Validate(ConfigArg),
}

fn main() {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        out_dir: cli.out_dir,
        billing: cli.billing_mode,
        oracle_limit: cli.oracle_limit,
    };
    let result = match &cli.command {
        Command::Optimize(arg) => commands::run_optimize(&arg.config, &overrides),
        Command::Attack(arg) => commands::run_attack(&arg.config, &overrides),
        Command::Oracle(arg) => commands::run_oracle(&arg.config, &overrides),
        Command::Validate(arg) => commands::run_validate(&arg.config, &overrides),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}
