use std::io;
use std::process::ExitCode;

use actor_core::bench::{
    run_mailbox_bench, run_ring_bench, MailboxBenchConfig, ReportFormat, RingBenchConfig,
    DEFAULT_FACTOR_TARGET,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bench", about = "Actor runtime benchmarks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Many threads flood one pooled actor.
    Mailbox {
        #[arg(long, default_value_t = 20)]
        senders: usize,
        /// Messages per sender.
        #[arg(long, default_value_t = 1_000_000)]
        messages: u64,
        #[arg(long)]
        pool: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Token rings with respawning chains plus a factorization load.
    Ring {
        #[arg(long, default_value_t = 20)]
        rings: usize,
        #[arg(long, default_value_t = 49)]
        chain: usize,
        #[arg(long, default_value_t = 10_000)]
        token: u64,
        #[arg(long, default_value_t = 5)]
        respawns: usize,
        #[arg(long, default_value_t = DEFAULT_FACTOR_TARGET)]
        factor: u64,
        #[arg(long)]
        pool: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format) = match cli.command {
        Command::Mailbox {
            senders,
            messages,
            pool,
            format,
        } => {
            let config = MailboxBenchConfig {
                senders,
                messages_per_sender: messages,
                pool_size: pool,
            };
            (
                run_mailbox_bench(&config).map(|o| (o.counts_hold(), o.report)),
                format,
            )
        }
        Command::Ring {
            rings,
            chain,
            token,
            respawns,
            factor,
            pool,
            format,
        } => {
            let config = RingBenchConfig {
                rings,
                chain_length: chain,
                token_initial: token,
                respawns,
                factor_target: factor,
                pool_size: pool,
            };
            (
                run_ring_bench(&config).map(|o| (o.counts_hold(), o.report)),
                format,
            )
        }
    };
    let format = match format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    match result {
        Ok((ok, report)) => {
            if let Err(e) = report.write_to(format, io::stdout().lock()) {
                eprintln!("bench: {e}");
                return ExitCode::FAILURE;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("bench: counts do not match the expected values");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(2)
        }
    }
}
