use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use limeout::cli::{cmd_audit, cmd_explain, cmd_synth, cmd_train};

#[derive(Parser)]
#[command(name = "limeout", version, about = "Audit tabular classifiers for reliance on sensitive features")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, explain globally, judge, and build the dropout ensemble when unfair.
    Audit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Explain one row with a saved model.
    Explain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        row: Option<usize>,
    },
    /// Train and save models without auditing.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a planted-bias CSV.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Audit { config, seed } => cmd_audit(config, *seed),
        Command::Explain { config, seed, model, row } => cmd_explain(config, *seed, model.as_deref(), *row),
        Command::Train { config, seed } => cmd_train(config, *seed),
        Command::Synth { config, seed } => cmd_synth(config, *seed),
    };
    match result {
        Ok(out) => {
            print!("{}", out.summary);
            println!("outputs in {}", out.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
