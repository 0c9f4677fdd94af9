use clap::Parser;
use monostab::config::{ExperimentConfig, ExperimentKind};
use monostab::{catalog, pipelines};
use std::path::PathBuf;
use std::process::ExitCode;

/// Steady-state experiments on masked grids, intervals, and polygons.
///
/// Exit code 0 when every assertion in the run passed, 1 when any failed,
/// 2 on configuration or compute errors.
#[derive(Parser)]
#[command(name = "monostab", version, arg_required_else_help = true)]
struct Cli {
    /// Experiment to run; see --list.
    experiment: Option<String>,

    /// List the experiments and exit.
    #[arg(long)]
    list: bool,

    /// Config file; defaults to the experiment's built-in config.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory; defaults to out/<experiment>.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the seed of a randomized experiment.
    #[arg(long)]
    seed: Option<u64>,

    /// Print the effective config as JSON and exit without running.
    #[arg(long)]
    print_config: bool,
}

fn effective_config(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::from_file(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            if cfg.kind() != kind {
                return Err(format!(
                    "config file is for '{}' but '{}' was requested",
                    cfg.kind().name(),
                    kind.name()
                ));
            }
            cfg
        }
        None => catalog::default_config(kind),
    };
    if let Some(seed) = cli.seed {
        if !cfg.apply_seed(seed) {
            eprintln!(
                "note: '{}' is deterministic; --seed has no effect",
                kind.name()
            );
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.list {
        for kind in ExperimentKind::ALL {
            println!("{:16} {}", kind.name(), kind.describe());
        }
        return ExitCode::SUCCESS;
    }

    let Some(name) = &cli.experiment else {
        eprintln!("error: an experiment name is required; try --list");
        return ExitCode::from(2);
    };
    let Some(kind) = ExperimentKind::parse(name) else {
        eprintln!("error: unknown experiment '{name}'; try --list");
        return ExitCode::from(2);
    };

    let cfg = match effective_config(&cli, kind) {
        Ok(cfg) => cfg,
        Err(why) => {
            eprintln!("error: {why}");
            return ExitCode::from(2);
        }
    };

    if cli.print_config {
        let text = serde_json::to_string_pretty(&cfg.to_value()).expect("config serializes");
        println!("{text}");
        return ExitCode::SUCCESS;
    }

    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    match pipelines::run(&cfg, &out_dir) {
        Ok(report) => {
            println!("{report}");
            println!("report: {}", out_dir.join("report.json").display());
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
