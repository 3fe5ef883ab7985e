use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pauliest::analysis::{delta_a_bracket, lower_bound_card, run_suite, BracketOptions, VerifySuite};
use pauliest::coloring::{build_graph, exact_coloring, fractional_coloring, schedule};
use pauliest::harness::{
    report_render, run_experiment, sweep, write_once, ExperimentConfig, ProtocolConfig, SweepAxis,
};
use pauliest::pauli::PauliSet;
use pauliest::protocols::PurityMode;
use pauliest::rng::stream;
use pauliest::{Error, Result};

#[derive(Parser)]
#[command(name = "pauliest", version, about = "Pauli expectation estimation experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment config (JSON); flags given alongside it override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files. Existing files are never overwritten.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Pauli expectations with one of the protocols.
    Estimate(EstimateArgs),
    /// k-memory purity test.
    Purity(PurityArgs),
    /// Fractional colouring and Clifford measurement plan for a set.
    Coloring(ColoringArgs),
    /// Bracket on the memory-free advantage delta_A.
    Delta(DeltaArgs),
    /// Randomised checks of the structural lemmas.
    Verify(VerifyArgs),
    /// Lower bounds on copies for given n, k, c, eps.
    Bound(BoundArgs),
    /// Sweep one parameter of an experiment config and emit CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// nomem, clifford, bell, twocopy, kmem or generic.
    #[arg(long)]
    protocol: Option<String>,
    /// Pauli set file, one string per line.
    #[arg(long)]
    set: Option<PathBuf>,
    /// State generator: mixed, haar, ghz, rho_p:<pauli>:<eps>, product:<bits>.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct PurityArgs {
    #[arg(long)]
    state: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    n: Option<usize>,
    /// Simulate both measurement outcomes and the swap test instead of one
    /// Bernoulli draw per repetition.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Args)]
struct ColoringArgs {
    #[arg(long)]
    set: PathBuf,
    /// Solve over all maximal independent sets in exact arithmetic.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct DeltaArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 40)]
    refinements: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// pauli-identities, mps-bound, permutation, swap-bound or chi2-clifford.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long)]
    eps: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// T, eps, k or n.
    #[arg(long)]
    axis: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
}

fn load_set(path: &Path) -> Result<PauliSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read Pauli set {}: {e}", path.display())))?;
    PauliSet::parse_text(&text)
}

/// Write `contents` under `--out` if given, else print it.
fn emit(global: &Global, stem: &str, ext: &str, contents: &str) -> Result<()> {
    match &global.out {
        Some(dir) => {
            let path = write_once(dir, stem, ext, contents.as_bytes())?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{contents}");
        }
    }
    Ok(())
}

fn base_config(global: &Global) -> Result<Option<ExperimentConfig>> {
    global.config.as_deref().map(ExperimentConfig::from_file).transpose()
}

fn finish_config(mut cfg: ExperimentConfig, global: &Global) -> Result<ExperimentConfig> {
    if let Some(seed) = global.seed {
        cfg.seeds = vec![seed];
    }
    if global.threads.is_some() {
        cfg.threads = global.threads;
    }
    if global.out.is_some() {
        cfg.output.dir = global.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn estimate(global: &Global, a: &EstimateArgs) -> Result<()> {
    let mut cfg = match base_config(global)? {
        Some(cfg) => cfg,
        None => {
            let id = a.protocol.as_deref().ok_or_else(|| Error::Config("--protocol or --config is required".into()))?;
            let state = a.state.as_deref().unwrap_or("haar");
            let eps = a.eps.ok_or_else(|| Error::Config("--eps is required".into()))?;
            let n = match (a.n, &a.set) {
                (Some(n), _) => n,
                (None, Some(path)) => load_set(path)?.n(),
                (None, None) => state
                    .parse::<pauliest::quantum::StateSpec>()?
                    .intrinsic_n()
                    .ok_or_else(|| Error::Config("--n is required without --set".into()))?,
            };
            ExperimentConfig::new(ProtocolConfig::from_id(id, a.k)?, n, state, eps)
        }
    };
    if let Some(path) = &a.set {
        cfg.paulis = format!("file:{}", path.display());
    }
    if let Some(k) = a.k {
        if let ProtocolConfig::Kmem { k: slot, .. } = &mut cfg.protocol {
            *slot = k;
        }
    }
    if a.rounds.is_some() {
        cfg.budget.rounds = a.rounds;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    let cfg = finish_config(cfg, global)?;
    let result = run_experiment(&cfg)?;
    print!("{}", report_render(&result));
    if let Some(path) = &result.written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn purity(global: &Global, a: &PurityArgs) -> Result<()> {
    let spec: pauliest::quantum::StateSpec = a.state.parse()?;
    let n = a
        .n
        .or_else(|| spec.intrinsic_n())
        .ok_or_else(|| Error::Config("--n is required for this state".into()))?;
    let mode = if a.trajectory { PurityMode::Trajectory } else { PurityMode::Bernoulli };
    let mut cfg = ExperimentConfig::new(ProtocolConfig::Purity { k: a.k, mode }, n, &a.state, 0.5);
    cfg.trials = a.trials;
    cfg.output.name = Some("purity".into());
    let cfg = finish_config(cfg, global)?;
    let result = run_experiment(&cfg)?;
    let mixed = result.trials.iter().filter(|t| t.verdict == Some(pauliest::protocols::Verdict::Mixed)).count();
    print!("{}", report_render(&result));
    println!("verdicts    {} mixed, {} pure", mixed, result.trials.len() - mixed);
    if let Some(path) = &result.written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn coloring(global: &Global, a: &ColoringArgs) -> Result<()> {
    let set = load_set(&a.set)?;
    let g = build_graph(&set);
    let col = if a.exact { exact_coloring(&g)? } else { fractional_coloring(&g)? };
    let plan = schedule(&col, &g)?;
    emit(global, "plan", "json", &plan.document(&set, &col)?)
}

fn delta(global: &Global, a: &DeltaArgs) -> Result<()> {
    let set = load_set(&a.set)?;
    let options = BracketOptions { iterations: a.iters, restarts: a.restarts, refinements: a.refinements };
    let bracket = delta_a_bracket(&set, &options, &mut stream(global.seed.unwrap_or(0), 0))?;
    eprintln!("delta_A in [{:.6}, {:.6}]", bracket.lower, bracket.upper);
    emit(global, "delta", "json", &serde_json::to_string_pretty(&bracket)?)
}

fn verify(global: &Global, a: &VerifyArgs) -> Result<()> {
    let suite: VerifySuite = a.suite.parse()?;
    let rows = run_suite(suite, a.trials, &mut stream(global.seed.unwrap_or(0), 0))?;
    for r in &rows {
        eprintln!("pass  {:<40} statistic {:.6e}  bound {:.6e}", r.case, r.statistic, r.bound);
    }
    emit(global, "verify", "json", &serde_json::to_string_pretty(&rows)?)
}

fn bound(global: &Global, a: &BoundArgs) -> Result<()> {
    let card = lower_bound_card(a.n, a.k, a.c, a.eps)?;
    emit(global, "bound", "json", &serde_json::to_string_pretty(&card)?)
}

fn bench(global: &Global, a: &BenchArgs) -> Result<()> {
    let cfg = base_config(global)?.ok_or_else(|| Error::Config("bench needs --config".into()))?;
    let axis: SweepAxis = a.axis.parse()?;
    let mut cfg = finish_config(cfg, global)?;
    cfg.output.dir = None;
    let table = sweep(&cfg, axis, &a.values)?;
    emit(global, "sweep", "csv", &table.to_csv()?)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::InvalidPauli(_)
        | Error::Duplicate(_)
        | Error::Empty(_)
        | Error::SizeMismatch { .. }
        | Error::CapExceeded { .. } => 2,
        Error::Verifier(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Estimate(a) => estimate(g, a),
        Command::Purity(a) => purity(g, a),
        Command::Coloring(a) => coloring(g, a),
        Command::Delta(a) => delta(g, a),
        Command::Verify(a) => verify(g, a),
        Command::Bound(a) => bound(g, a),
        Command::Bench(a) => bench(g, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
