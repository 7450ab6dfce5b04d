use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hamflow::harness::{
    emit_poisson_trace, execute, format_check, grid_search_stepsize, parse_config, powers_of_two, run_suite,
    write_outputs, ExperimentConfig, VerifyOptions,
};
use hamflow::problems::ProblemDescriptor;
use hamflow::rng::RandomSource;

#[derive(Parser)]
#[command(name = "hamflow", version, about = "Randomized Hamiltonian flow optimizers and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output`, then `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of runs.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Write the problem instance of every run as JSON.
    Generate(Common),
    /// Execute a config and write per-run and aggregate CSVs.
    Run(Common),
    /// Stepsize grid search over c = 2^n, n in [min_exp, max_exp].
    Grid {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
        min_exp: i32,
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        max_exp: i32,
    },
    /// Run the verification suite; exits nonzero if any check fails.
    Verify {
        /// Seed count for the ensemble checks.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Refresh events and matching Poisson jumps of each refresh-bearing algorithm.
    Poisson(Common),
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf)> {
    let text = fs::read_to_string(&common.config)
        .with_context(|| format!("reading {}", common.config.display()))?;
    let mut config = parse_config(&text).with_context(|| format!("in {}", common.config.display()))?;
    if let Some(n) = common.seeds {
        if n == 0 {
            bail!("--seeds must be at least 1");
        }
        config.runs = n;
    }
    let out = common
        .out
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((config, out))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(common: &Common) -> Result<()> {
    let (config, out) = load(common)?;
    fs::create_dir_all(&out)?;
    let mut instances: Vec<ProblemDescriptor> = Vec::with_capacity(config.runs);
    for r in 0..config.runs {
        instances.push(config.problem.build(config.run_seed(r))?.descriptor());
    }
    let path = out.join("instances.json");
    write_json(&path, &instances)?;
    println!("wrote {} instance(s) to {}", instances.len(), path.display());
    Ok(())
}

fn run(common: &Common) -> Result<()> {
    let (config, out) = load(common)?;
    let result = execute(&config, common.threads)?;
    write_outputs(&result, &out)?;
    for curve in &result.aggregate.curves {
        let last = curve.mean_f_gap.last().copied().unwrap_or(f64::NAN);
        println!("{:<16} final mean f_gap {:.6e} over {} run(s)", curve.label, last, curve.runs);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn grid(common: &Common, min_exp: i32, max_exp: i32) -> Result<()> {
    if min_exp > max_exp {
        bail!("--min-exp must not exceed --max-exp");
    }
    let (config, out) = load(common)?;
    let choices = grid_search_stepsize(&config, &powers_of_two(min_exp..=max_exp), common.threads)?;
    for c in &choices {
        println!("{:<16} c = {:<10} stepsize = {:.6e}", c.label, c.multiple, c.stepsize);
    }
    fs::create_dir_all(&out)?;
    write_json(&out.join("grid.json"), &choices)?;
    Ok(())
}

fn poisson(common: &Common) -> Result<()> {
    let (config, out) = load(common)?;
    let result = execute(&config, common.threads)?;
    fs::create_dir_all(&out)?;
    let mut written = 0;
    for spec in &config.algorithms {
        let label = spec.label();
        for run in result.traces_for(&label) {
            let problem = config.problem.build(run.seed)?;
            let algorithm = spec.resolve(&problem)?;
            let Some((h, schedule)) = algorithm.refresh() else { break };
            let mut src = RandomSource::for_run(run.seed, &format!("poisson-jumps:{label}"), 0);
            let trace = emit_poisson_trace(&run.trace, &schedule, h, &mut src)?;
            trace.write_csv(&out.join(format!("poisson_{label}_run{}.csv", run.run)))?;
            written += 1;
        }
    }
    if written == 0 {
        bail!("no algorithm in the config refreshes its velocity");
    }
    println!("wrote {written} trace(s) to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(c) => generate(c),
        Command::Run(c) => run(c),
        Command::Grid { common, min_exp, max_exp } => grid(common, *min_exp, *max_exp),
        Command::Poisson(c) => poisson(c),
        Command::Verify { seeds, threads, only } => {
            let opts = VerifyOptions { seeds: *seeds, only: only.clone(), threads: *threads };
            let report = run_suite(&opts);
            for c in &report.checks {
                println!("{}", format_check(c));
            }
            if report.all_pass() {
                return ExitCode::SUCCESS;
            }
            return ExitCode::FAILURE;
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
