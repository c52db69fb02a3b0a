use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use magnoncat_cli::{commands, exit, CliError, CliResult, Preset, RunConfig};

#[derive(Parser)]
#[command(name = "magnoncat", version, about = "Magnon cat-state preparation with a flux-modulated transmon")]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "ci")]
    preset: Preset,
    /// Override one config key, `key=value`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the static couplings over flux bias and junction asymmetry.
    Couplings,
    /// Run the cat-preparation protocol.
    Protocol,
    /// Wigner function of a single-mode state file.
    Wigner {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        pgm: bool,
    },
    /// Critical distance, thermal occupation and operating-point report.
    Design,
    /// List the accepted configuration keys.
    Keys,
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("MAGNONCAT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("MAGNONCAT_THREADS: `{value}` is not a positive integer")))?;
    // Fails only if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: Cli) -> CliResult<String> {
    configure_threads()?;
    if let Command::Keys = cli.command {
        return Ok(magnoncat_cli::config::KEYS.iter().map(|(k, d)| format!("{k:32} {d}\n")).collect());
    }
    let mut cfg = RunConfig::load(cli.preset, cli.config.as_deref(), &cli.set)?;
    cfg.output_dir = cli.out;
    match cli.command {
        Command::Couplings => commands::couplings(&cfg),
        Command::Protocol => commands::protocol(&cfg),
        Command::Wigner { state, half_width, points, pgm } => {
            if let Some(s) = state {
                cfg.wigner.state = Some(s);
            }
            if half_width.is_some() {
                cfg.wigner.half_width = half_width;
            }
            if let Some(p) = points {
                cfg.wigner.points = p;
            }
            cfg.wigner.pgm |= pgm;
            cfg.validate()?;
            commands::wigner_cmd(&cfg)
        }
        Command::Design => commands::design(&cfg),
        Command::Keys => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::from(exit::OK as u8)
        }
        Err(e) => {
            eprintln!("magnoncat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
