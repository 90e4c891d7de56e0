use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfl::data::{generate_synthetic, SyntheticDatasetSpec};
use qfl::experiment::{build_config, run_experiment, write_artifacts, Preset};
use qfl::Error;

#[derive(Parser)]
#[command(name = "qfl", version, about = "Quantum federated learning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write rounds.csv / summary.json per arm.
    Run(RunArgs),
    /// Write synthetic train/val/test feature CSVs.
    Generate(GenerateArgs),
    /// Print the fully resolved configuration as TOML.
    Config(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// exp1, exp2, exp3 or custom.
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "QFL_OUT_DIR", default_value = "qfl-out")]
    out: PathBuf,
    /// Override a config value, e.g. `--set qsa.noise=1e-3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "QFL_OUT_DIR", default_value = "qfl-out")]
    out: PathBuf,
    /// Override a generator field, e.g. `--set mean=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn resolve(args: &RunArgs) -> Result<qfl::experiment::ExperimentConfig, Error> {
    let text = match &args.config {
        Some(path) => Some(
            fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = build_config(args.preset, text.as_deref(), &overrides)?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<(), Error> {
    let cfg = resolve(&args)?;
    let outcomes = run_experiment(&cfg)?;
    write_artifacts(&args.out, &cfg, &outcomes)?;
    for o in &outcomes {
        let s = &o.summary;
        println!(
            "{:<28} test_acc {:.4}  test_loss {:.4}  switch {:>4}  formula {}  logical {}  physical {}",
            s.name,
            s.final_test_acc,
            s.final_test_loss,
            s.switch_round.map_or("-".to_string(), |t| t.to_string()),
            s.formula_cost,
            s.ledger.logical_total(),
            s.ledger.physical_total,
        );
        if s.clips > 0 {
            eprintln!("warning: {}: {} values clipped to ±{}", s.name, s.clips, cfg.qsa.bound);
        }
    }
    println!("artifacts in {}", args.out.display());
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let mut table =
        toml::Table::try_from(SyntheticDatasetSpec::default()).map_err(|e| Error::config("data", e.to_string()))?;
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::config(o.clone(), "override must look like key=value"))?;
        let one: toml::Table = format!("{} = {}", k.trim(), v.trim())
            .parse()
            .map_err(|e: toml::de::Error| Error::config(k.trim(), e.message().to_string()))?;
        table.extend(one);
    }
    let spec: SyntheticDatasetSpec = table
        .try_into()
        .map_err(|e: toml::de::Error| Error::config("--set", e.message().to_string()))?;
    let splits = generate_synthetic(&spec, args.seed)?;
    splits.write_csvs(&args.out)?;
    println!("wrote train/val/test CSVs to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Generate(args) => generate(args),
        Command::Config(args) => resolve(&args).and_then(|cfg| {
            let text = toml::to_string(&cfg).map_err(|e| Error::config("config", e.to_string()))?;
            print!("{text}");
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
