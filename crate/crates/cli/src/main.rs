use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mission_mesh::PolicyKind;
use mission_mesh_cli::{
    load, oracle_check, run, RunOptions, SnapshotFormat, EXIT_DEGRADED, EXIT_INPUT,
};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(
    name = "mission-mesh",
    version,
    about = "Plan and adapt collaboration middleware for response teams"
)]
struct Cli {
    /// Log engine traces to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Dispersion,
    Distance,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Report {
    #[default]
    Table,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario and write one snapshot per phase.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Tie-break used while adapting.
        #[arg(long, value_enum)]
        policy: Option<Policy>,
        /// Minimum energy for a channel manager host.
        #[arg(long)]
        e_min: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: SnapshotFormat,
        #[arg(long, value_enum, default_value_t)]
        report: Report,
    },
    /// Check that a scenario parses and validates.
    Validate { file: PathBuf },
    /// Compare every selection with an exhaustive scan.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        policy: Option<Policy>,
        #[arg(long)]
        e_min: Option<u32>,
    },
}

fn policy(p: Option<Policy>) -> Option<PolicyKind> {
    p.map(|p| match p {
        Policy::Dispersion => PolicyKind::Dispersion,
        Policy::Distance => PolicyKind::Distance,
    })
}

fn execute(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Run {
            file,
            out,
            policy: p,
            e_min,
            format,
            report,
        } => {
            let scenario = load(&file)?;
            let opts = RunOptions {
                out_dir: Some(out),
                policy: policy(p),
                e_min,
                format,
            };
            let result = run(&scenario, &opts)?;
            match report {
                Report::Table => print!("{}", result.to_table()),
                Report::Machine => print!("{}", result.to_machine()),
            }
            Ok(result.exit_code())
        }
        Command::Validate { file } => {
            let scenario = load(&file)?;
            println!(
                "ok: {} actors, {} devices, {} events, phases {}",
                scenario.model.actors.len(),
                scenario.model.devices.len(),
                scenario.events.len(),
                scenario.phases().join(", ")
            );
            Ok(0)
        }
        Command::Oracle {
            file,
            policy: p,
            e_min,
        } => {
            let scenario = load(&file)?;
            let opts = RunOptions {
                policy: policy(p),
                e_min,
                ..RunOptions::default()
            };
            let rows = oracle_check(&scenario, &opts)?;
            let show = |i: Option<usize>| i.map_or_else(|| "none".to_owned(), |i| i.to_string());
            for row in &rows {
                println!(
                    "{:<12} {:<8} candidates {:>5}  engine {:>5}  oracle {:>5}",
                    row.label,
                    if row.agrees() { "agree" } else { "DIFFER" },
                    row.candidates,
                    show(row.engine),
                    show(row.oracle)
                );
            }
            Ok(if rows.iter().all(|r| r.agrees()) {
                0
            } else {
                EXIT_DEGRADED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(level)),
        )
        .with_writer(std::io::stderr)
        .init();

    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
