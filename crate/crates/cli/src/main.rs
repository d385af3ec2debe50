use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use rqboost::anneal::{solve, IceModel, SolverConfig, SolverKind};
use rqboost::boost::{HardwareOracle, OracleConfig};
use rqboost::chimera::{
    chain_strength_sweep, clique_embed_n, heuristic_embed, max_clique_size, verify_embedding, ChimeraGraph, Embedding,
    ProblemGraph, DEFAULT_BREAK_THRESHOLD,
};
use rqboost::experiments::{run_linsep, run_names, run_seizure, LinsepConfig, NamesConfig, SeizureConfig};
use rqboost::io::read_qubo;

#[derive(Parser)]
#[command(name = "rqboost", version, about = "QBoost and RQBoost on an emulated quantum annealer")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config for the chosen experiment.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Boosting oracle; overrides the config file.
    #[arg(long, global = true, value_enum)]
    oracle: Option<OracleKind>,
    /// Root directory for experiment outputs.
    #[arg(long, global = true, env = "RQBOOST_OUT", default_value = "results")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Brute,
    Sa,
    Hw,
}

impl OracleKind {
    fn config(self) -> OracleConfig {
        match self {
            OracleKind::Brute => OracleConfig::BruteForce,
            OracleKind::Sa => OracleConfig::SimulatedAnnealing { solver: SolverConfig::default() },
            OracleKind::Hw => OracleConfig::Hardware(HardwareOracle::default()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Names corpus: k-fold AUC of random forest, QBoost and RQBoost.
    Names {
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, requires = "female")]
        male: Option<PathBuf>,
        #[arg(long, requires = "male")]
        female: Option<PathBuf>,
        /// Fail instead of using the bundled corpus when no files are given.
        #[arg(long)]
        no_bundled: bool,
        #[arg(long)]
        resamples: Option<usize>,
    },
    /// Linearly separable matrix with a bait column.
    Linsep,
    /// Synthetic EEG seizure-prediction pipeline.
    Seizure {
        #[arg(long)]
        clips_per_class: Option<usize>,
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Minimize a QUBO file and print the best sample as JSON.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "sa")]
        solver: SolverChoice,
        #[arg(long)]
        reads: Option<usize>,
        #[arg(long)]
        sweeps: Option<usize>,
    },
    /// Embedding utilities on Chimera graphs.
    Embed {
        #[command(subcommand)]
        action: EmbedAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Brute,
    Sa,
}

#[derive(Args)]
struct HardwareArgs {
    /// Chimera grid size M (M × M unit cells).
    #[arg(long, short)]
    m: usize,
    /// Number of random dead qubits.
    #[arg(long, default_value_t = 0)]
    defects: usize,
    #[arg(long, default_value_t = 0)]
    defect_seed: u64,
}

impl HardwareArgs {
    fn graph(&self) -> Result<ChimeraGraph> {
        Ok(ChimeraGraph::with_random_defects(self.m, self.defects, self.defect_seed)?)
    }
}

#[derive(Subcommand)]
enum EmbedAction {
    /// Native clique embedding of K_n on a perfect graph (largest by default).
    Clique {
        #[command(flatten)]
        hw: HardwareArgs,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Heuristic embedding of K_n, which tolerates defects.
    Heuristic {
        #[command(flatten)]
        hw: HardwareArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        tries: usize,
    },
    /// Check an embedding JSON file of K_n and report every violation.
    Verify {
        embedding: PathBuf,
        #[command(flatten)]
        hw: HardwareArgs,
        #[arg(long)]
        n: usize,
    },
    /// Solve a QUBO file on the device model at several chain strengths.
    Sweep {
        problem: PathBuf,
        #[command(flatten)]
        hw: HardwareArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
        strengths: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_BREAK_THRESHOLD)]
        threshold: f64,
    },
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(T::default()),
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(value)?).context("writing to stdout")
}

fn embedding_report(emb: &Embedding, graph: &ChimeraGraph) -> serde_json::Value {
    json!({
        "grid_size": graph.grid_size(),
        "active_qubits": graph.num_active_qubits(),
        "num_chains": emb.num_chains(),
        "total_qubits": emb.total_qubits(),
        "max_chain_length": emb.max_chain_length(),
        "embedding": emb,
    })
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Names { folds, male, female, no_bundled, resamples } => {
            let mut cfg: NamesConfig = load_config(config)?;
            if let Some(o) = cli.oracle {
                cfg = cfg.with_oracle(o.config());
            }
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.folds = folds.unwrap_or(cfg.folds);
            cfg.rqboost.resamples = resamples.unwrap_or(cfg.rqboost.resamples);
            if male.is_some() {
                cfg.male_file = male;
                cfg.female_file = female;
            }
            cfg.use_bundled &= !no_bundled;
            let res = run_names(&cfg, &cli.out.join("names"))?;
            for (t, s) in &res.summary {
                println!("{t:<14} mean AUC {:.4}  (min {:.4}, max {:.4})", s.mean, s.min, s.max);
            }
        }
        Command::Linsep => {
            let mut cfg: LinsepConfig = load_config(config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            if cli.oracle.is_some_and(|o| !matches!(o, OracleKind::Hw)) {
                bail!("linsep always uses the hardware-model oracle");
            }
            let res = run_linsep(&cfg, &cli.out.join("linsep"))?;
            println!("dataset sha256 {}", res.dataset_sha256);
            for c in &res.qboost {
                println!(
                    "qboost lambda {:<6} chain {:<4} accuracy {:.3} bait {}",
                    c.lambda, c.chain_strength, c.accuracy, c.bait_included
                );
            }
            for c in &res.logistic {
                println!("logistic {:?} lambda {:<6} accuracy {:.3}", c.penalty, c.lambda, c.accuracy);
            }
        }
        Command::Seizure { clips_per_class, folds } => {
            let mut cfg: SeizureConfig = load_config(config)?;
            if let Some(o) = cli.oracle {
                cfg = cfg.with_oracle(o.config());
            }
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.clips_per_class = clips_per_class.unwrap_or(cfg.clips_per_class);
            cfg.folds = folds.unwrap_or(cfg.folds);
            let res = run_seizure(&cfg, &cli.out.join("seizure"))?;
            println!("{} features per clip", res.num_features);
            for (t, s) in &res.summary {
                println!("{t:<14} mean AUC {:.4}  (min {:.4}, max {:.4})", s.mean, s.min, s.max);
            }
        }
        Command::Solve { problem, solver, reads, sweeps } => {
            let q = read_qubo(&problem)?;
            let mut cfg: SolverConfig = load_config(config)?;
            cfg.kind = match solver {
                SolverChoice::Brute => SolverKind::BruteForce,
                SolverChoice::Sa => SolverKind::SimulatedAnnealing,
            };
            cfg.num_reads = reads.unwrap_or(cfg.num_reads);
            cfg.sweeps_per_read = sweeps.unwrap_or(cfg.sweeps_per_read);
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            let set = solve(&q, &cfg)?;
            let best = set.best().context("solver returned no samples")?;
            print_json(&json!({
                "energy": best.energy,
                "assignment": best.assignment.bits(),
                "multiplicity": best.multiplicity,
                "distinct_samples": set.len(),
            }))?;
        }
        Command::Embed { action } => embed(action)?,
    }
    Ok(())
}

fn embed(action: EmbedAction) -> Result<()> {
    match action {
        EmbedAction::Clique { hw, n } => {
            let graph = hw.graph()?;
            let emb = clique_embed_n(&graph, n.unwrap_or_else(|| max_clique_size(hw.m)))?;
            print_json(&embedding_report(&emb, &graph))
        }
        EmbedAction::Heuristic { hw, n, tries } => {
            let graph = hw.graph()?;
            match heuristic_embed(&ProblemGraph::complete(n), &graph, hw.defect_seed, tries) {
                Some(emb) => print_json(&embedding_report(&emb, &graph)),
                None => bail!("no embedding of K_{n} found in {tries} tries"),
            }
        }
        EmbedAction::Verify { embedding, hw, n } => {
            let graph = hw.graph()?;
            let text = std::fs::read_to_string(&embedding).with_context(|| format!("reading {}", embedding.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            // accept a bare embedding or the report printed by the other subcommands
            let emb: Embedding = serde_json::from_value(value.get("embedding").cloned().unwrap_or(value))
                .with_context(|| format!("{} is not an embedding", embedding.display()))?;
            let violations = verify_embedding(&ProblemGraph::complete(n), &graph, &emb);
            print_json(&json!({
                "valid": violations.is_empty(),
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            }))?;
            if !violations.is_empty() {
                bail!("{} violation(s)", violations.len());
            }
            Ok(())
        }
        EmbedAction::Sweep { problem, hw, strengths, threshold } => {
            let q = read_qubo(&problem)?;
            let graph = hw.graph()?;
            let n = q.num_vars();
            let emb = if graph.is_perfect() {
                clique_embed_n(&graph, n)?
            } else {
                heuristic_embed(&ProblemGraph::complete(n), &graph, hw.defect_seed, 10)
                    .with_context(|| format!("no embedding of K_{n} found"))?
            };
            let outcome = chain_strength_sweep(
                &q,
                &graph,
                &emb,
                &strengths,
                &IceModel::default(),
                &SolverConfig::default(),
                threshold,
            )?;
            print_json(&json!({
                "selected_chain_strength": outcome.chain_strength(),
                "points": outcome.points(),
            }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
