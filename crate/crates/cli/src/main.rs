mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_srm::perf_model::Quantization;
use polar_srm::presets;

use commands::{CliError, RunKnobs, SimulateArgs};

#[derive(Parser)]
#[command(
    name = "polar-srm",
    version,
    about = "SC-Flip and Dynamic SC-Flip polar decoding with midpoint restarts",
    after_long_help = config::keys_help(),
)]
struct Cli {
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true, env = "POLAR_SRM_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file.
    #[command(after_long_help = config::keys_help())]
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// `key=value`, repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Decode every frame with SRM off and on and compare the outcomes.
        #[arg(long)]
        paired: bool,
        /// Print the resolved config and exit.
        #[arg(long)]
        dry_run: bool,
        /// Also log the first N frames of every point.
        #[arg(long, value_name = "N")]
        frame_log: Option<u64>,
    },
    /// Memory estimates of the reference configurations and custom ones.
    Memory {
        /// `N,TMAX,OMEGA`, repeatable.
        #[arg(long = "config", value_name = "N,TMAX,OMEGA", value_parser = commands::parse_memory_config)]
        custom: Vec<(u64, u64, u64)>,
        #[arg(long, default_value_t = 6)]
        q_ch: u64,
        #[arg(long, default_value_t = 7)]
        q_int: u64,
        #[arg(long, default_value_t = 7)]
        q_flip: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-pass latency: closed form against the cycle counter.
    Latency {
        #[arg(long = "pe", default_values_t = [64])]
        pe_counts: Vec<usize>,
        #[arg(long, default_value_t = 4096)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired SRM on/off runs at every reference operating point.
    Conformance {
        #[arg(long)]
        code: Option<String>,
        #[arg(long)]
        decoder: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        frames: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reference scenarios: fig3, fig4, table1, table2, table3.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Fig3,
    Fig4,
    Table1,
    Table2,
    Table3,
}

#[derive(Args)]
struct ReproduceArgs {
    scenario: Scenario,
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    decoder: Option<String>,
    /// Frames per point: exact for fig3/fig4, a minimum for the tables.
    #[arg(long)]
    frames: Option<u64>,
    /// Frame errors collected at least per table point.
    #[arg(long, default_value_t = 1_000)]
    min_errors: u64,
    /// Frame cap per table point.
    #[arg(long, default_value_t = 10_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = cli.workers.filter(|&w| w > 0).unwrap_or_else(default_workers);
    match cli.command {
        Command::Simulate {
            config,
            overrides,
            out,
            paired,
            dry_run,
            frame_log,
        } => commands::simulate(SimulateArgs {
            config,
            overrides,
            out,
            paired,
            dry_run,
            frame_log,
            workers,
        }),
        Command::Memory {
            custom,
            q_ch,
            q_int,
            q_flip,
            out,
        } => commands::memory(&custom, Quantization { q_ch, q_int, q_flip }, out.as_deref(), false),
        Command::Latency { pe_counts, max_n, out } => commands::latency(&pe_counts, max_n, out.as_deref()),
        Command::Conformance {
            code,
            decoder,
            frames,
            seed,
            out,
        } => {
            let knobs = RunKnobs {
                frames,
                min_errors: 0,
                max_frames: frames,
                seed,
                workers,
            };
            commands::conformance(&code, &decoder, &knobs, out.as_deref())
        }
        Command::Reproduce(a) => {
            let out = a.out.as_deref();
            match a.scenario {
                Scenario::Table3 => commands::memory(&[], Quantization::default(), out, true),
                Scenario::Table1 | Scenario::Table2 => {
                    let knobs = RunKnobs {
                        frames: a.frames.unwrap_or(100_000),
                        min_errors: a.min_errors,
                        max_frames: a.max_frames,
                        seed: a.seed,
                        workers,
                    };
                    let (table, name): (&[_], _) = match a.scenario {
                        Scenario::Table1 => (&presets::TABLE1, "table1.csv"),
                        _ => (&presets::TABLE2, "table2.csv"),
                    };
                    commands::reproduce_deltas(table, &a.code, &a.decoder, &knobs, out, name)
                }
                Scenario::Fig3 | Scenario::Fig4 => {
                    let frames = a.frames.unwrap_or(10_000);
                    let knobs = RunKnobs {
                        frames,
                        min_errors: 0,
                        max_frames: frames,
                        seed: a.seed,
                        workers,
                    };
                    let name = if matches!(a.scenario, Scenario::Fig3) { "fig3.csv" } else { "fig4.csv" };
                    commands::reproduce_curves(&a.code, &a.decoder, &knobs, out, name)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
