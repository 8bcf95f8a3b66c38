use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anderson_qsim::lab::{configure_threads, run_experiment, EngineKind, ExperimentConfig, Pipeline};
use anderson_qsim::verify::run_battery;

#[derive(Parser)]
#[command(name = "aqsim", version, about = "Quantum simulation of the quasi-periodically kicked rotator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one trajectory and write its observable series.
    Evolve(RunArgs),
    /// Scan the kick strength over disorder realizations.
    Scan(RunArgs),
    /// Locate k_c at each imperfection strength.
    Critical(RunArgs),
    /// Fit the critical-point shift against the rescaled strength.
    Scaling(RunArgs),
    /// Run the identity and convergence checks.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    t_max: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<EngineKind>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Comma-separated strengths for `critical` and `scaling`.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    record_every: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    match s {
        "circuit" => Ok(EngineKind::Circuit),
        "oracle" => Ok(EngineKind::Oracle),
        other => Err(format!("unknown engine `{other}` (circuit, oracle)")),
    }
}

impl RunArgs {
    fn config(&self, pipeline: Pipeline) -> anderson_qsim::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        c.pipeline = pipeline;
        macro_rules! set {
            ($($field:ident <- $flag:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { c.$field = v; })*
            };
        }
        set!(
            n_qubits <- n_qubits,
            k <- k,
            t_max <- t_max,
            seed <- seed,
            engine <- engine,
            epsilon <- epsilon,
            mu <- mu,
            epsilons <- epsilons,
            realizations <- realizations,
            record_every <- record_every,
            gamma_target <- gamma,
        );
        c.validate()?;
        Ok(c)
    }
}

fn run(pipeline: Pipeline, args: &RunArgs) -> anderson_qsim::Result<()> {
    let config = args.config(pipeline)?;
    let summary = run_experiment(&config, &args.out)?;
    for f in &summary.files {
        println!("{}", args.out.join(f).display());
    }
    Ok(())
}

fn verify() -> anderson_qsim::Result<bool> {
    let checks = run_battery()?;
    println!("{:<28} {:>14}  {:<14} result", "check", "value", "bound");
    for c in &checks {
        println!("{:<28} {:>14.6e}  {:<14} {}", c.name, c.value, c.bound, if c.passed { "PASS" } else { "FAIL" });
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(a) => run(Pipeline::Evolve, a).map(|_| true),
        Command::Scan(a) => run(Pipeline::Scan, a).map(|_| true),
        Command::Critical(a) => run(Pipeline::Critical, a).map(|_| true),
        Command::Scaling(a) => run(Pipeline::Scaling, a).map(|_| true),
        Command::Verify => verify(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
