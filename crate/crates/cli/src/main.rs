use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlfront::config::{Command, ScenarioConfig};
use nlfront::{presets, run, CliError, Exit, Overrides};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "nlfront",
    version,
    about = "Nonlocal-diffusion epidemic model with a free boundary"
)]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// List the built-in scenarios, or write their configs to a directory.
    Presets {
        #[arg(long)]
        write: Option<PathBuf>,
    },
    #[command(flatten)]
    Run(RunCommand),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario config (JSON).
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Run a built-in scenario instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum RunCommand {
    /// Principal eigenvalues on a fixed habitat.
    Eigen(RunArgs),
    /// Positive steady state on a fixed habitat.
    Steady(RunArgs),
    /// Fixed-habitat dynamics and decay rates.
    Evolve(RunArgs),
    /// Moving-front simulation.
    Simulate(RunArgs),
    /// Spreading/vanishing verdict.
    Classify(RunArgs),
    /// Semi-wave profile, speed tables and front comparison.
    Semiwave(RunArgs),
    /// Threshold searches.
    Threshold(RunArgs),
    /// Eigenvalue sweeps.
    Sweep(RunArgs),
    /// Regime report or symmetrization diagnostic.
    Report(RunArgs),
}

impl RunCommand {
    fn split(self) -> (Command, RunArgs) {
        match self {
            RunCommand::Eigen(a) => (Command::Eigen, a),
            RunCommand::Steady(a) => (Command::Steady, a),
            RunCommand::Evolve(a) => (Command::Evolve, a),
            RunCommand::Simulate(a) => (Command::Simulate, a),
            RunCommand::Classify(a) => (Command::Classify, a),
            RunCommand::Semiwave(a) => (Command::Semiwave, a),
            RunCommand::Threshold(a) => (Command::Threshold, a),
            RunCommand::Sweep(a) => (Command::Sweep, a),
            RunCommand::Report(a) => (Command::Report, a),
        }
    }
}

fn load(command: Command, args: &RunArgs) -> Result<ScenarioConfig, CliError> {
    let config = match (&args.config, &args.preset) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(name)) => presets::find(name)?.config,
        (None, None) => return Err(CliError::config("need --config or --preset")),
    };
    if config.command != command {
        return Err(CliError::config(format!(
            "config is for command {:?}, not {:?}",
            config.command.name(),
            command.name()
        )));
    }
    Ok(config)
}

fn list_presets(write: Option<PathBuf>) -> Result<(), CliError> {
    let all = presets::all();
    if let Some(dir) = write {
        std::fs::create_dir_all(&dir)?;
        for p in &all {
            let path = dir.join(format!("{}.json", p.name));
            let mut text = serde_json::to_string_pretty(&p.config).expect("configs serialize");
            text.push('\n');
            std::fs::write(&path, text)?;
            println!("{}", path.display());
        }
        return Ok(());
    }
    for p in &all {
        println!(
            "{:<18} {:<10} ~{:>4}s  {}",
            p.name,
            p.config.command.name(),
            p.budget_seconds,
            p.description
        );
    }
    Ok(())
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.diagnostic());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.action {
        Action::Presets { write } => {
            return match list_presets(write) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            }
        }
        Action::Run(r) => r.split(),
    };
    let config = match load(command, &args) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let overrides = Overrides {
        out: args.out.clone(),
        seed: args.seed,
    };
    match run(&config, &overrides) {
        Ok(outcome) => {
            let artifacts: Vec<String> = outcome
                .artifacts
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            println!(
                "{}",
                json!({
                    "command": command.name(),
                    "preset": config.preset,
                    "exit_code": outcome.exit as i32,
                    "artifacts": artifacts,
                    "result": outcome.summary,
                })
            );
            if outcome.exit == Exit::Undecided {
                eprintln!(
                    "{}",
                    json!({"error": "undecided", "message": "classification undecided at t_max", "exit_code": 4})
                );
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => fail(&e),
    }
}
