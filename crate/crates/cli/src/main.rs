use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use num_complex::Complex64;
use quartic_cli::{
    load_config, parse_complex, resolve_config_path, run_subcommand, CliError, Command, ErrorRecord, OutputFormat,
    ResultDocument, RunArgs, CONFIG_DIR_ENV,
};

/// Planar solver for the quartic Kontsevich-type matrix model.
///
/// Exit status: 0 success, 1 computational failure or failed check, 2 input error.
#[derive(Debug, Parser)]
#[command(name = "quartic", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Model config (JSON). Relative paths fall back to the config directory.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Default config directory.
    #[arg(long, env = CONFIG_DIR_ENV, hide_env_values = true)]
    config_dir: Option<PathBuf>,

    /// Overrides the configured coupling.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,

    /// First argument, as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<Complex64>,

    /// Second argument, as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    w: Option<Complex64>,

    /// Highest order of the perturbative series (at most 6).
    #[arg(long, default_value_t = 4)]
    order: usize,

    /// Monte Carlo sweeps.
    #[arg(long, default_value_t = 10_000)]
    sweeps: usize,

    /// Monte Carlo seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Row index for mc-check.
    #[arg(long, default_value_t = 0)]
    a: usize,

    /// Column index for mc-check.
    #[arg(long, default_value_t = 0)]
    b: usize,

    /// Output format; defaults to the config's choice.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Replaces every check tolerance of verify and mc-check.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn run(cli: &Cli) -> Result<(ResultDocument, OutputFormat), CliError> {
    let path = resolve_config_path(cli.config.as_deref(), cli.config_dir.as_deref())?;
    let mut config = load_config(&path)?;
    if let Some(lambda) = cli.lambda {
        config = config.with_lambda(lambda).map_err(|message| CliError::Validation {
            path: "--lambda".into(),
            message,
        })?;
    }
    if let Some(t) = cli.tolerance {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!("--tolerance {t} must be positive")));
        }
    }
    let args = RunArgs {
        z: cli.z,
        w: cli.w,
        order: cli.order,
        sweeps: cli.sweeps,
        seed: cli.seed,
        tolerance: cli.tolerance,
        indices: (cli.a, cli.b),
    };
    let start = Instant::now();
    let mut doc = run_subcommand(&config, cli.command, &args)?;
    doc.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok((doc, cli.format.unwrap_or(config.format)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = run(&cli).and_then(|(doc, format)| {
        let text = match format {
            OutputFormat::Json => doc.to_json()?,
            OutputFormat::Csv => doc.to_csv()?,
        };
        Ok((doc, text))
    });
    match outcome {
        Ok((doc, text)) => {
            print!("{text}");
            if doc.all_passed() {
                ExitCode::SUCCESS
            } else {
                for c in doc.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check failed: {} ({})", c.name, c.detail);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let record = ErrorRecord::new(cli.command.name(), &e);
            if let Ok(json) = serde_json::to_string_pretty(&record) {
                println!("{json}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
