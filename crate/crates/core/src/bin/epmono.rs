use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use epmono::cli::{self, ConfigError, Format, RunConfig, RunError, Scenario};

/// Run a scenario from a config file, or check a config with `validate`.
#[derive(Parser)]
#[command(name = "epmono", version)]
struct Args {
    /// Scenario name (eig, evolve, phase, monopole-field, contour,
    /// atom-cyclic, atom-noncyclic, tunneling, pulses, sweep) or `validate`.
    command: String,
    /// Config file for `validate`.
    path: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("epmono: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let path = match args.config.or(args.path) {
        Some(p) => p,
        None => return fail(ConfigError::Missing("--config".into()).into()),
    };
    if args.command == "validate" {
        return match cli::validate(&path) {
            Ok(lines) => {
                lines.iter().for_each(|l| println!("{l}"));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e.into()),
        };
    }
    let setup = || -> Result<RunConfig, ConfigError> {
        let scenario: Scenario = args.command.parse()?;
        let mut cfg = RunConfig::load(&path, Some(scenario))?;
        if let Some(out) = &args.out {
            cfg.output = Some(out.clone());
        }
        match &args.format {
            Some(f) => cfg.format = f.parse()?,
            None => {
                if cfg.output.as_ref().and_then(|p| p.extension()).is_some_and(|e| e == "json") {
                    cfg.format = Format::Json;
                }
            }
        }
        if let Some(w) = args.workers {
            if w == 0 {
                return Err(ConfigError::BadValue { key: "workers".into(), msg: "expected a positive integer".into() });
            }
            cfg.workers = w;
        }
        Ok(cfg)
    };
    let cfg = match setup() {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    match cli::execute(&cfg) {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
