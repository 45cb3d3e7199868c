use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod trace;

use commands::{CliError, Metric};
use pktreorder::Threshold;

#[derive(Debug, Parser)]
#[command(
    name = "pktreorder",
    version,
    about = "Packet reordering analysis for packet-ID traces"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Buffer size after each arrival.
    Map { trace: Vec<String> },
    /// Cumulative ACK after each arrival.
    Ack { trace: Vec<String> },
    /// Greedy ascending-list partition and its size.
    Sus { trace: Vec<String> },
    /// Ordered/unordered episodes and pivot packets.
    Episodes { trace: Vec<String> },
    /// Reorder density of a permutation.
    Rd {
        /// Displacement threshold: a positive integer or "inf".
        #[arg(long, value_parser = parse_threshold)]
        dt: Threshold,
        trace: Vec<String>,
    },
    /// Advertised receive window after each arrival.
    Rcvwindow {
        #[arg(long)]
        rcv_buffer: u64,
        trace: Vec<String>,
    },
    /// FB and behavioral equivalence of two traces.
    Equiv { first: String, second: String },
    /// Permutation with at most three ascending runs that maps to a buffer sequence.
    Reconstruct { buffer: Vec<String> },
    /// Exhaustive uniqueness and identity checks over all permutations of length n.
    Verify {
        #[arg(long)]
        n: usize,
    },
    /// Searches for two FB-equivalent permutations on which a metric differs.
    Consistency {
        #[arg(long, value_enum, default_value_t = Metric::Rd)]
        metric: Metric,
        /// Required for the rd metric.
        #[arg(long, value_parser = parse_threshold)]
        dt: Option<Threshold>,
        #[arg(long)]
        n: usize,
    },
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    s.parse().map_err(|e: pktreorder::Error| e.to_string())
}

fn run(cli: Cli) -> Result<commands::Output, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Map { trace } => commands::map(&trace, format),
        Command::Ack { trace } => commands::ack(&trace, format),
        Command::Sus { trace } => commands::sus(&trace, format),
        Command::Episodes { trace } => commands::episodes(&trace, format),
        Command::Rd { dt, trace } => commands::rd(&trace, dt, format),
        Command::Rcvwindow { rcv_buffer, trace } => commands::rcvwindow(&trace, rcv_buffer, format),
        Command::Equiv { first, second } => commands::equiv(&first, &second, format),
        Command::Reconstruct { buffer } => commands::reconstruct(&buffer, format),
        Command::Verify { n } => commands::verify(n, format),
        Command::Consistency { metric, dt, n } => commands::consistency(metric, dt, n, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.body.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(out.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
