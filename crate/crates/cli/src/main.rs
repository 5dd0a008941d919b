use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dissem_cli::catalog::{list_json, list_text};
use dissem_cli::{run_file, Overrides, EXIT_TOLERANCE};

#[derive(Parser)]
#[command(
    name = "dissem",
    version,
    about = "Run dissipative-electrodynamics experiments from TOML configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Replace the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long)]
        threads: Option<usize>,
        /// Replace the config's output directory.
        #[arg(long)]
        output: Option<String>,
    },
    /// List experiments.
    List {
        /// One JSON record per experiment.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::List { json } => {
            print!(
                "{}",
                if json {
                    list_json() + "\n"
                } else {
                    list_text()
                }
            );
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            seed,
            threads,
            output,
        } => {
            let overrides = Overrides {
                seed,
                threads,
                output_dir: output,
            };
            match run_file(&config, &overrides) {
                Ok(m) => {
                    for c in &m.checks {
                        println!(
                            "{} {} = {:.3e} (limit {:.1e})",
                            if c.pass { "PASS" } else { "FAIL" },
                            c.name,
                            c.value,
                            c.limit
                        );
                    }
                    println!(
                        "{} {} in {:.2} s",
                        m.config.experiment, m.config_hash, m.wall_time_s
                    );
                    if m.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_TOLERANCE)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
    }
}
