use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use geophase::config::{load, Experiment, Override};
use geophase::{run, RunError};

/// Geometric phase experiments for price-impact trading models.
#[derive(Debug, Parser)]
#[command(name = "geophase", version)]
struct Cli {
    /// Experiment to run
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON config file; omitted fields take the experiment defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config field by dotted path, e.g. `market.q=0.02`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (default: config `output_dir`, else `out/<experiment>`)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main_inner(cli: Cli) -> Result<(), RunError> {
    let overrides = cli
        .set
        .iter()
        .map(|s| Override::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let config = load(cli.experiment, cli.config.as_deref(), &overrides)?;
    let out_dir = cli
        .out
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(cli.experiment.name()));
    let output = run(cli.experiment, &config, &overrides, &out_dir)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: wrote {} files to {}",
        cli.experiment,
        output.files.len(),
        out_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
