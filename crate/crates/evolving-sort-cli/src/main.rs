//! Command-line front door for the simulation presets and the verification
//! suite. Flags override config-file values; the effective config is echoed
//! into the JSON summary.
//!
//! Exit codes: 0 success with zero violations, 1 violations found, 2 usage
//! errors (from the parser), 3 unreadable/invalid config, 4 output path not
//! writable.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evolving_sort::acceptance;
use evolving_sort::experiments::output::{summary_json_string, write_outputs};
use evolving_sort::experiments::presets::run_preset;
use evolving_sort::experiments::ExperimentConfig;
use evolving_sort::{InitPolicy, SorterKind};

#[derive(Parser)]
#[command(
    name = "evolving-sort",
    version,
    about = "Sorting simulations against a drifting total order, with invariant checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sorter against drifting data and record time series.
    Simulate(RunArgs),
    /// Steady-state inversion statistics across an n sweep.
    SteadyState(RunArgs),
    /// Hitting times of I <= beta*n from reversed starts.
    Convergence(RunArgs),
    /// Instrumented invariant checks (counters, frozen-state bounds).
    LemmaChecks(RunArgs),
    /// Occupancy trials for the counter bound.
    BallsBins(RunArgs),
    /// Run the whole acceptance suite with pinned seeds.
    VerifyAll {
        /// Write a JSON report here in addition to stdout lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SorterArg {
    RepeatedInsertion,
    QuickThenInsertion,
    RepeatedQuicksort,
}

impl From<SorterArg> for SorterKind {
    fn from(arg: SorterArg) -> Self {
        match arg {
            SorterArg::RepeatedInsertion => SorterKind::RepeatedInsertion,
            SorterArg::QuickThenInsertion => SorterKind::QuickThenInsertion,
            SorterArg::RepeatedQuicksort => SorterKind::RepeatedQuicksortBaseline,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitArg {
    Identity,
    Reversed,
    UniformRandom,
}

impl From<InitArg> for InitPolicy {
    fn from(arg: InitArg) -> Self {
        match arg {
            InitArg::Identity => InitPolicy::Identity,
            InitArg::Reversed => InitPolicy::Reversed,
            InitArg::UniformRandom => InitPolicy::UniformRandom,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Single problem size (shorthand for --n-list with one entry).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated problem sizes.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Random adjacent swaps per comparison step.
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long, value_enum)]
    sorter: Option<SorterArg>,
    /// Initial rank assignment.
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    /// Step budget per run (default derived from n and the sorter).
    #[arg(long)]
    steps: Option<u64>,
    /// Round budget per run (takes precedence over --steps).
    #[arg(long)]
    rounds: Option<u64>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds (seed, seed+1, ..).
    #[arg(long)]
    seeds: Option<u64>,
    /// Sampling interval for time series.
    #[arg(long)]
    sample_every: Option<u64>,
    /// Burn-in fraction of the step budget.
    #[arg(long)]
    burn_in: Option<f64>,
    /// Record S and B columns (alpha=1 insertion runs only).
    #[arg(long)]
    instrument: bool,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV series and the JSON summary.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Analysis constant (occupancy ratio / round-length constant).
    #[arg(long)]
    c: Option<f64>,
    /// Occupancy trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Convergence threshold multiple.
    #[arg(long)]
    beta: Option<f64>,
}

impl RunArgs {
    /// File config (if any) -> preset defaults -> flag overrides.
    fn build_config(&self, preset: &str) -> Result<ExperimentConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                ExperimentConfig::from_toml_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => ExperimentConfig::default(),
        };
        config.preset = preset.to_string();
        apply_preset_defaults(&mut config, preset, self.config.is_some());
        if let Some(n) = self.n {
            config.n_list = vec![n];
        }
        if let Some(list) = &self.n_list {
            config.n_list = list.clone();
        }
        if let Some(alpha) = self.alpha {
            config.alpha = alpha;
        }
        if let Some(sorter) = self.sorter {
            config.sorter = sorter.into();
        }
        if let Some(init) = self.init {
            config.init = init.into();
        }
        if let Some(steps) = self.steps {
            config.steps = Some(steps);
        }
        if let Some(rounds) = self.rounds {
            config.rounds = Some(rounds);
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(seeds) = self.seeds {
            config.seeds = seeds;
        }
        if let Some(every) = self.sample_every {
            config.sample_every = Some(every);
        }
        if let Some(burn_in) = self.burn_in {
            config.burn_in_fraction = Some(burn_in);
        }
        if self.instrument {
            config.instrument = true;
        }
        if let Some(out) = &self.out {
            config.out_dir = Some(out.clone());
        }
        if let Some(c) = self.c {
            config.c = c;
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(beta) = self.beta {
            config.beta = Some(beta);
        }
        Ok(config)
    }
}

/// Per-subcommand defaults, applied only when no config file set the values.
fn apply_preset_defaults(config: &mut ExperimentConfig, preset: &str, from_file: bool) {
    if from_file {
        return;
    }
    match preset {
        "steady-state" => {
            config.n_list = vec![128, 256];
            config.seeds = 8;
        }
        "convergence" => {
            config.n_list = vec![128, 256];
            config.seeds = 8;
        }
        "lemma-checks" => {
            config.n_list = vec![8, 16, 32];
            config.seeds = 10;
            config.c = 0.25;
        }
        "balls-bins" => {
            config.n_list = vec![10_000];
        }
        _ => {}
    }
}

enum CliError {
    Config(String),
    Output(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(violations) => {
            if violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Output(msg)) => {
            eprintln!("output error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(cli: Cli) -> Result<u64, CliError> {
    let (preset, args) = match cli.command {
        Command::Simulate(args) => ("simulate", args),
        Command::SteadyState(args) => ("steady-state", args),
        Command::Convergence(args) => ("convergence", args),
        Command::LemmaChecks(args) => ("lemma-checks", args),
        Command::BallsBins(args) => ("balls-bins", args),
        Command::VerifyAll { out } => return verify_all(out),
    };
    let config = args.build_config(preset)?;
    let output = run_preset(&config).map_err(|e| CliError::Config(e.to_string()))?;
    let violations = output.summary.total_violations();

    println!(
        "{}: {} run(s), {} violation(s)",
        preset,
        output.summary.seeds.len() * config.n_list.len(),
        violations
    );
    for (key, count) in &output.summary.violations {
        if *count > 0 {
            println!("  violation {key}: {count}");
        }
    }
    match &config.out_dir {
        Some(dir) => {
            let written = write_outputs(dir, &output)
                .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            println!("wrote {} file(s) under {}", written.len(), dir.display());
        }
        None => {
            // No output directory: the summary goes to stdout.
            print!("{}", summary_json_string(&output.summary));
        }
    }
    Ok(violations)
}

fn verify_all(out: Option<PathBuf>) -> Result<u64, CliError> {
    let results = acceptance::run_all();
    let mut failures = 0u64;
    for result in &results {
        println!("{result}");
        if !result.pass {
            failures += 1;
        }
    }
    println!(
        "verify-all: {}/{} criteria passed",
        results.len() as u64 - failures,
        results.len()
    );
    if let Some(dir) = out {
        let report: Vec<serde_json::Value> = results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "id": r.id,
                    "name": r.name,
                    "pass": r.pass,
                    "details": r.details,
                })
            })
            .collect();
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        let path = dir.join("verify-all.json");
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(failures)
}
