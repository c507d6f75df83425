use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stoq_core::ensembles::CatalystMode;
use stoq_expcli::{run, ExperimentConfig, Family, Variant};

#[derive(Parser)]
#[command(name = "stoq-exp", version, about = "Stoquastization gap and runtime experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Win fractions of random dense matrices against their stoquastizations.
    DenseWins(Common),
    /// Sector minimum gaps along Max-Cut interpolation paths.
    MaxcutMingap(Common),
    /// Optimized time to solution along Max-Cut interpolation paths.
    MaxcutTts(Common),
    /// Cheeger and converse inequalities on random signed graphs.
    CheegerAudit(Common),
    /// Gaps of random X-diagonal Hamiltonians before and after de-signing.
    XdiagGaps(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file mirroring the experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    instances: Option<usize>,
    /// Output directory for the JSONL records and CSV summary.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// `uniform` or `pm1`.
    #[arg(long)]
    catalyst_mode: Option<CatalystMode>,
    /// Comma-separated subset of `designed,shifted`.
    #[arg(long, value_delimiter = ',')]
    stoquastizations: Option<Vec<Variant>>,
}

fn build_config(family: Family, args: Common) -> stoq_expcli::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(family),
    };
    if cfg.family != family {
        return Err(stoq_expcli::ExpError::Config(format!(
            "config file describes {} but the subcommand is {}",
            cfg.family, family
        )));
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(s) = args.sizes {
        cfg.sizes = s;
    }
    if let Some(n) = args.instances {
        cfg.instances_per_size = n;
    }
    if let Some(o) = args.out {
        cfg.output = Some(o);
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(m) = args.catalyst_mode {
        cfg.catalyst_mode = m;
    }
    if let Some(v) = args.stoquastizations {
        cfg.stoquastizations = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (family, args) = match cli.command {
        Command::DenseWins(a) => (Family::DenseWins, a),
        Command::MaxcutMingap(a) => (Family::MaxcutMingap, a),
        Command::MaxcutTts(a) => (Family::MaxcutTts, a),
        Command::CheegerAudit(a) => (Family::CheegerAudit, a),
        Command::XdiagGaps(a) => (Family::XdiagGaps, a),
    };
    let result = build_config(family, args).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => {
            print!("{}", summary.table());
            if summary.hard_failures > 0 {
                eprintln!("{} records failed hard assertions", summary.hard_failures);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
