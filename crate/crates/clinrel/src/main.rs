use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clinrel::commands::{self, Outcome};
use clinrel::config::{Format, RunConfig};
use clinrel::parallel::{build_pool, threads_from_env};
use clinrel::Error;

/// Evaluate synthetic image feature sets: directional KID sweep, t-SNE plots,
/// and a real vs. real+synthetic classification experiment.
#[derive(Debug, Parser)]
#[command(name = "clinrel", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset manifest (overrides the config file).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for KID subsampling and t-SNE initialization.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output formats (repeatable or comma separated).
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    /// Weight of the cross-class term in the selection score.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every feature file exists, parses and shares one dimension.
    Validate {
        /// Manifest to check (defaults to --manifest / config).
        manifest: Option<PathBuf>,
    },
    /// Directional KID for every checkpoint, with best markers and selection.
    Sweep {
        /// Re-render a saved sweep.json instead of computing KID.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// t-SNE scatter plot per checkpoint.
    Tsne {
        /// Embed these manifest entries together instead.
        #[arg(long, value_delimiter = ',')]
        entries: Option<Vec<String>>,
    },
    /// Train on real vs. real+synthetic features and score on the real test split.
    Classify {
        /// Synthetic checkpoint to add (defaults to the sweep's selection).
        #[arg(long)]
        iteration: Option<u64>,
    },
    /// Run all evaluations and write a combined report.md.
    Report,
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &cli.manifest {
        cfg.manifest = Some(m.clone());
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.set_seed(s);
    }
    if let Some(l) = cli.lambda {
        cfg.lambda = l;
    }
    commands::apply_formats(&mut cfg, &cli.format);
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let cfg = load_config(cli)?;
    let outcome: Outcome = match &cli.command {
        Command::Validate { manifest } => {
            let path = match manifest {
                Some(p) => p.as_path(),
                None => cfg.manifest_path()?,
            };
            let report = commands::cmd_validate(path)?;
            print!("{report}");
            return Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Sweep { from: Some(path) } => commands::cmd_sweep_from(&cfg, path)?,
        Command::Sweep { from: None } => commands::cmd_sweep(&cfg)?,
        Command::Tsne { entries } => commands::cmd_tsne(&cfg, entries.as_deref())?,
        Command::Classify { iteration } => commands::cmd_classify(&cfg, *iteration)?,
        Command::Report => commands::cmd_report(&cfg)?,
    };
    for p in &outcome.written {
        println!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match threads_from_env().and_then(build_pool) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
