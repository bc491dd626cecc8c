mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{NormalizationArg, OrderingArg, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "qss", version, about = "GHZ-based quantum secret sharing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the protocol and write a security report.
    Run {
        /// Flat TOML file; flags override its keys.
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[command(flatten)]
        options: RunOptions,
    },
    /// Charlie's conditional state for every pair of Alice/Bob X/Y outcomes.
    TruthTable,
    /// Witness terms and their exact value on the calibrated GHZ state.
    WitnessTable {
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(long, default_value = "i1")]
        variant: String,
        #[arg(long, value_enum, default_value = "published")]
        normalization: NormalizationArg,
    },
    /// Compare the attacked original protocol, the attacked modified protocol and an honest control.
    AttackDemo {
        #[arg(long, value_enum)]
        mode: Option<commands::DemoMode>,
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "naive")]
        ordering: OrderingArg,
    },
    /// Random search over two-qubit cheat unitaries.
    Sweep {
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        p_psi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_refine: bool,
        #[arg(long, value_enum, default_value = "published")]
        normalization: NormalizationArg,
        /// Tab-separated table of every evaluated point.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { commands::EXIT_USAGE } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run { config, options } => commands::run(config.as_deref(), &options),
        Command::TruthTable => commands::truth_table(),
        Command::WitnessTable { parties, variant, normalization } => {
            commands::witness_table(parties, &variant, normalization.into())
        }
        Command::AttackDemo { mode, parties, rounds, seed, ordering } => {
            commands::attack_demo(mode, parties, rounds, seed, ordering)
        }
        Command::Sweep { parties, samples, p_psi, seed, no_refine, normalization, output } => {
            commands::sweep(parties, samples, p_psi, seed, !no_refine, normalization.into(), output.as_deref())
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        commands::EXIT_USAGE
    })
}
