use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use moduli_cli::repfile;
use moduli_cli::run::{self, describe};
use moduli_cli::{read_report, write_report, ExperimentConfig, Report, Status};

#[derive(Parser)]
#[command(
    name = "moduli-cli",
    version,
    about = "Local models of moduli of central connections on a surface"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; replaces `seed` from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path; replaces `output_path` (a directory for `sweep`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key=value` override applied on top of the configuration file.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Produce a central representation and write it as a representation file.
    FindRep,
    /// Run the full invariant suite on one chart.
    Verify,
    /// Build the chart and sample the reduced local model.
    Chart,
    /// Repeat `chart` over consecutive seeds.
    Sweep {
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Print a summary of a saved report.
    Report { path: PathBuf },
}

const CONFIG_ERROR: u8 = 2;

fn load(cli: &Cli) -> Result<ExperimentConfig, String> {
    let path = cli.config.as_ref().ok_or("--config is required")?;
    let mut config = ExperimentConfig::load(path, &cli.overrides).map_err(|e| e.to_string())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_path = Some(out.clone());
    }
    Ok(config)
}

fn emit(report: &Report, path: Option<&PathBuf>) -> ExitCode {
    match path {
        Some(p) => {
            if let Err(e) = write_report(report, p) {
                eprintln!("{e}");
                return ExitCode::from(CONFIG_ERROR);
            }
            eprint!("{}", describe(report));
        }
        None => print!("{}", report.to_json()),
    }
    ExitCode::from(report.status.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Report { path } = &cli.command {
        return match read_report(path) {
            Ok(r) => {
                print!("{}", describe(&r));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(CONFIG_ERROR)
            }
        };
    }
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match &cli.command {
        Command::FindRep => match run::build_rep(&config) {
            Ok(rep) => {
                let text = repfile::RepFile::from_rep(&rep).to_toml();
                match &config.output_path {
                    Some(p) => {
                        if let Err(e) = std::fs::write(p, text) {
                            eprintln!("cannot write {}: {e}", p.display());
                            return ExitCode::from(CONFIG_ERROR);
                        }
                        eprintln!(
                            "wrote {} (relator defect {:.3e})",
                            p.display(),
                            rep.defect()
                        );
                    }
                    None => print!("{text}"),
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(CONFIG_ERROR)
            }
        },
        Command::Verify => emit(&run::run_verify(&config), config.output_path.as_ref()),
        Command::Chart => emit(&run::run_chart(&config), config.output_path.as_ref()),
        Command::Sweep { count } => {
            let Some(dir) = &config.output_path else {
                eprintln!("sweep needs --out or output_path (a directory)");
                return ExitCode::from(CONFIG_ERROR);
            };
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("cannot create {}: {e}", dir.display());
                return ExitCode::from(CONFIG_ERROR);
            }
            let reports = run::run_sweep(&config, *count);
            let mut worst = Status::Pass;
            for r in &reports {
                if let Err(e) = write_report(r, &run::sweep_path(dir, r.seed)) {
                    eprintln!("{e}");
                    return ExitCode::from(CONFIG_ERROR);
                }
                eprint!("{}", describe(r));
                if r.status.exit_code() > worst.exit_code() {
                    worst = r.status;
                }
            }
            ExitCode::from(worst.exit_code() as u8)
        }
        Command::Report { .. } => unreachable!(),
    }
}
