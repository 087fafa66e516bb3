use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use toml::{Table, Value};

use cvbell::scenario::{self, parse_assignment, set_path, ScenarioConfig, ScenarioError, ScenarioKind};

/// Continuous-variable Bell inequality laboratory.
#[derive(Debug, Parser)]
#[command(name = "cvbell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one state and write a single result row.
    Evaluate(CommonArgs),
    /// Evaluate every point of a parameter grid.
    Sweep(CommonArgs),
    /// Search hidden-variable ensembles for the largest violation.
    LhvSearch(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// vacuum, single-photon, twin-photon, tmsv, cs-counter-model, constrained-sampler
    #[arg(long)]
    preset: Option<String>,
    /// Per-mode Fock dimensions, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    order_k: Option<u32>,
    /// Override any configuration key, e.g. `--set lhv.budget=5000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl CommonArgs {
    fn override_table(&self) -> Result<Table, ScenarioError> {
        let mut t = Table::new();
        for a in &self.overrides {
            parse_assignment(&mut t, a)?;
        }
        if let Some(p) = &self.out {
            set_path(&mut t, "output.path", Value::String(p.display().to_string()))?;
        }
        if let Some(f) = &self.format {
            set_path(&mut t, "output.format", Value::String(f.clone()))?;
        }
        if let Some(s) = self.seed {
            let s =
                i64::try_from(s).map_err(|_| ScenarioError::Config(format!("seed {s} exceeds the supported range")))?;
            set_path(&mut t, "seed", Value::Integer(s))?;
        }
        if let Some(p) = &self.preset {
            set_path(&mut t, "preset", Value::String(p.clone()))?;
        }
        if let Some(d) = &self.dims {
            let dims = d.iter().map(|&x| Value::Integer(x as i64)).collect();
            set_path(&mut t, "dims", Value::Array(dims))?;
        }
        if let Some(k) = self.order_k {
            set_path(&mut t, "order_k", Value::Integer(k.into()))?;
        }
        Ok(t)
    }
}

fn execute(kind: ScenarioKind, args: &CommonArgs) -> Result<(), ScenarioError> {
    let config = ScenarioConfig::load(kind, args.config.as_deref(), args.override_table()?)?;
    let output = scenario::run(&config)?;
    eprint!("{}", output.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Evaluate(a) => (ScenarioKind::Evaluate, a),
        Command::Sweep(a) => (ScenarioKind::Sweep, a),
        Command::LhvSearch(a) => (ScenarioKind::LhvSearch, a),
    };
    match execute(kind, args).with_context(|| format!("{} failed", kind.as_str())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<ScenarioError>().map_or(1, ScenarioError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
