use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use approach_lab::game::validate_instance;
use approach_lab::harness::{
    rate_reports, read_metrics_csv, run_matrix, seed_offset, write_outputs, ExperimentConfig, InstanceRef,
};
use approach_lab::Result;

#[derive(Parser)]
#[command(name = "approach-lab", version, about = "Opportunistic approachability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment matrix and write metrics.csv, metrics.json, rates.json, rates.tsv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output directory (default: the config's `output`, else the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit power-law rates to a metrics.csv and print them as JSON.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check an instance file (or built-in name) for dimension, isotropy, payoff-bound
    /// and response violations.
    Validate {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, workers, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let rows = run_matrix(&cfg, workers, seed_offset()?, config.parent())?;
            let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
            write_outputs(&dir, &rows)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!("{} rows written to {} ({failed} with errors)", rows.len(), dir.display());
            Ok(true)
        }
        Command::Fit { input } => {
            let rows = read_metrics_csv(&std::fs::read(input)?)?;
            println!("{}", serde_json::to_string_pretty(&rate_reports(&rows))?);
            Ok(true)
        }
        Command::Validate { instance, samples } => {
            let r = if std::path::Path::new(&instance).exists() {
                InstanceRef::File { path: instance.into() }
            } else {
                InstanceRef::Builtin(instance)
            };
            let inst = r.load(None)?;
            let report = validate_instance(&inst, samples, 0);
            for v in &report.violations {
                println!("{:?}: {} (value {:e})", v.kind, v.detail, v.value);
            }
            if report.is_ok() {
                println!("ok: d_P={} d_L={} d={}", inst.d_p(), inst.d_l(), inst.d());
            }
            Ok(report.is_ok())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
