use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use serde::Serialize;

use friending_cli::report::{write_csv, Summary};
use friending_cli::{exit_code, run_experiment, Experiment, ExperimentConfig};
use friending_core::graph::load_edge_list_path;
use friending_core::pmax::default_max_samples;
use friending_core::{
    compute_vmax, estimate_f_traces, grow_until, stopping_rule_estimate, strategy_set, upsilon, Error,
    ExactOracle, Instance, NodeId, RafOptions, Result, SocialGraph, Strategy, VmaxMode, WeightScheme,
};

#[derive(Parser)]
#[command(name = "friending", version, about = "Minimum active friending: RAF, baselines and experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format for single-instance commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    /// `w(u,v) = 1/deg(v)`.
    Recip,
    /// Four-column edge list `u v w(u,v) w(v,u)`.
    File,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Weights::Recip)]
    weights: Weights,
}

impl GraphArgs {
    fn load(&self) -> Result<SocialGraph> {
        let scheme = match self.weights {
            Weights::Recip => WeightScheme::DegreeReciprocal,
            Weights::File => WeightScheme::ExplicitWeights,
        };
        load_edge_list_path(&self.graph, scheme).map_err(|e| match e {
            Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", self.graph.display()))),
            e => e,
        })
    }
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Initiator label.
    #[arg(long)]
    s: u64,
    /// Target label.
    #[arg(long)]
    t: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate p_max with the stopping rule.
    EstimatePmax {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0.3)]
        epsilon0: f64,
        #[arg(long, default_value_t = 10.0)]
        big_n: f64,
        #[arg(long)]
        max_samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run RAF on one pair.
    Solve {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 10.0)]
        big_n: f64,
        /// Fixed realization count instead of l*.
        #[arg(long)]
        realizations: Option<u64>,
        /// Trace samples for the reported f(I*).
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use n instead of |V_max| in the parameter coupling.
        #[arg(long)]
        full_n: bool,
        /// Largest relative error handed to the stopping rule.
        #[arg(long, default_value_t = 1.0)]
        pmax_epsilon_cap: f64,
    },
    /// HD or SP invitation set, at budget --k or grown to --target-f.
    Baseline {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long, required_unless_present = "target_f")]
        k: Option<usize>,
        #[arg(long, conflicts_with = "k")]
        target_f: Option<f64>,
        #[arg(long)]
        k_cap: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Candidates on some seed-to-target chain.
    Vmax {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Exact f(I) by enumerating realizations (tiny graphs only).
    ExactF {
        #[command(flatten)]
        pair: PairArgs,
        /// Comma-separated invited labels.
        #[arg(long, value_delimiter = ',')]
        invite: Vec<u64>,
        #[arg(long, default_value_t = friending_core::realization::DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Run an experiment over sampled pairs; CSV rows to --out, JSON to --summary.
    Experiment {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        /// Explicit `s:t` label pairs; disables sampling.
        #[arg(long = "pair", value_parser = parse_pair)]
        explicit: Vec<(u64, u64)>,
        #[arg(long, default_value_t = 0.01)]
        pmax_floor: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 10.0)]
        big_n: f64,
        /// Realizations per RAF run; 0 uses l*.
        #[arg(long, default_value_t = 100_000)]
        realizations: u64,
        /// Realization counts for the sweep.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000")]
        ls: Vec<u64>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        k_cap: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        pmax_epsilon_cap: f64,
        #[arg(long)]
        full_n: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Write a seeded preferential-attachment edge list.
    GenGraph {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 7)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Hd,
    Sp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Overapprox,
}

fn parse_pair(s: &str) -> std::result::Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or("expected s:t")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn labels(g: &SocialGraph, nodes: &[NodeId]) -> Vec<u64> {
    let mut v: Vec<u64> = nodes.iter().map(|&x| g.label(x)).collect();
    v.sort_unstable();
    v
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn io_err(e: impl std::error::Error + Send + Sync + 'static) -> Error {
    Error::Io(io::Error::other(e))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// One record as pretty JSON or as a header plus one CSV row.
fn emit<T: Serialize>(record: &T, format: Format, out: &Option<PathBuf>) -> Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, record).map_err(io_err)?;
            writeln!(w)?;
        }
        Format::Csv => write_csv([record], &mut w).map_err(io_err)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PmaxRecord {
    s: u64,
    t: u64,
    p_star: f64,
    upsilon: u64,
    total_samples: u64,
    epsilon0: f64,
    failure_budget: f64,
}

#[derive(Serialize)]
struct SolveRecord {
    s: u64,
    t: u64,
    invitation: String,
    size: usize,
    l: u64,
    l_star: Option<u64>,
    ones: u64,
    p: u64,
    covered: u64,
    exact_cover: bool,
    p_star: f64,
    epsilon0: f64,
    epsilon1: f64,
    beta: f64,
    n_eff: usize,
    f: Option<f64>,
    half_width: Option<f64>,
}

#[derive(Serialize)]
struct BaselineRecord {
    s: u64,
    t: u64,
    strategy: Strategy,
    k: usize,
    nodes: String,
    clipped: bool,
    padded: bool,
    reached: Option<bool>,
    f: f64,
    half_width: f64,
}

#[derive(Serialize)]
struct VmaxRecord {
    s: u64,
    t: u64,
    mode: &'static str,
    size: usize,
    nodes: String,
}

#[derive(Serialize)]
struct ExactRecord {
    s: u64,
    t: u64,
    invitation: String,
    f: f64,
    p_max: f64,
}

fn run(cli: Cli) -> Result<()> {
    let (format, out) = (cli.format, cli.out);
    match cli.command {
        Command::EstimatePmax { pair, epsilon0, big_n, max_samples, seed } => {
            let g = pair.graph.load()?;
            let inst = Instance::from_labels(&g, pair.s, pair.t)?;
            let max = max_samples.unwrap_or_else(|| default_max_samples(upsilon(epsilon0, big_n)));
            let est = stopping_rule_estimate(&inst, epsilon0, big_n, max, seed)?;
            emit(
                &PmaxRecord {
                    s: pair.s,
                    t: pair.t,
                    p_star: est.p_star,
                    upsilon: est.upsilon,
                    total_samples: est.total_samples,
                    epsilon0: est.epsilon0,
                    failure_budget: est.failure_budget,
                },
                format,
                &out,
            )
        }
        Command::Solve { pair, alpha, epsilon, big_n, realizations, samples, seed, full_n, pmax_epsilon_cap } => {
            let g = pair.graph.load()?;
            let inst = Instance::from_labels(&g, pair.s, pair.t)?;
            let opts = RafOptions {
                full_n,
                l_override: realizations,
                seed,
                f_check_samples: samples,
                pmax_epsilon_cap,
                ..RafOptions::default()
            };
            let sol = friending_core::raf(&inst, alpha, epsilon, big_n, &opts)?;
            let invitation = labels(&g, &sol.invitation);
            emit(
                &SolveRecord {
                    s: pair.s,
                    t: pair.t,
                    invitation: join(&invitation),
                    size: invitation.len(),
                    l: sol.batch.l,
                    l_star: sol.config.l_star,
                    ones: sol.batch.ones,
                    p: sol.batch.p,
                    covered: sol.covered,
                    exact_cover: sol.exact_cover,
                    p_star: sol.pmax.p_star,
                    epsilon0: sol.config.epsilon0,
                    epsilon1: sol.config.epsilon1,
                    beta: sol.config.beta,
                    n_eff: sol.config.n_eff,
                    f: sol.f_check.as_ref().map(|f| f.mean),
                    half_width: sol.f_check.as_ref().map(|f| f.half_width),
                },
                format,
                &out,
            )
        }
        Command::Baseline { pair, strategy, k, target_f, k_cap, samples, seed } => {
            let g = pair.graph.load()?;
            let inst = Instance::from_labels(&g, pair.s, pair.t)?;
            let strategy = match strategy {
                StrategyArg::Hd => Strategy::Hd,
                StrategyArg::Sp => Strategy::Sp,
            };
            let (set, estimate, reached) = match (k, target_f) {
                (_, Some(target)) => {
                    let cap = k_cap.unwrap_or(inst.candidates().len());
                    let r = grow_until(&inst, strategy, target, samples, cap, seed)?;
                    (r.set, r.estimate, Some(r.reached))
                }
                (Some(k), None) => {
                    let set = strategy_set(&inst, strategy, k)?;
                    let est = estimate_f_traces(&inst, &set.nodes, samples, seed)?;
                    (set, est, None)
                }
                (None, None) => unreachable!("clap requires one of --k and --target-f"),
            };
            if set.clipped {
                warn!("budget clipped to {} candidates", set.nodes.len());
            }
            emit(
                &BaselineRecord {
                    s: pair.s,
                    t: pair.t,
                    strategy,
                    k: set.nodes.len(),
                    nodes: join(&labels(&g, &set.nodes)),
                    clipped: set.clipped,
                    padded: set.padded,
                    reached,
                    f: estimate.mean,
                    half_width: estimate.half_width,
                },
                format,
                &out,
            )
        }
        Command::Vmax { pair, mode } => {
            let g = pair.graph.load()?;
            let inst = Instance::from_labels(&g, pair.s, pair.t)?;
            let (mode, name) = match mode {
                ModeArg::Exact => (VmaxMode::Exact, "exact"),
                ModeArg::Overapprox => (VmaxMode::Overapprox, "overapprox"),
            };
            let nodes = labels(&g, &compute_vmax(&inst, mode));
            emit(&VmaxRecord { s: pair.s, t: pair.t, mode: name, size: nodes.len(), nodes: join(&nodes) }, format, &out)
        }
        Command::ExactF { pair, invite, cap } => {
            let g = pair.graph.load()?;
            let inst = Instance::from_labels(&g, pair.s, pair.t)?;
            let ids = invite
                .iter()
                .map(|&l| g.id_of(l).ok_or_else(|| Error::InvalidParameter(format!("unknown node label {l}"))))
                .collect::<Result<Vec<_>>>()?;
            let oracle = ExactOracle::with_cap(&inst, cap)?;
            let f = oracle.f(&inst, &ids)?;
            let record =
                ExactRecord { s: pair.s, t: pair.t, invitation: join(&labels(&g, &ids)), f, p_max: oracle.p_max() };
            emit(&record, format, &out)
        }
        Command::Experiment {
            graph,
            experiment,
            pairs,
            explicit,
            pmax_floor,
            alpha,
            epsilon,
            big_n,
            realizations,
            ls,
            samples,
            k_cap,
            pmax_epsilon_cap,
            full_n,
            seed,
            summary,
        } => {
            let g = graph.load()?;
            let explicit = if explicit.is_empty() {
                None
            } else {
                Some(
                    explicit
                        .iter()
                        .map(|&(s, t)| {
                            let inst = Instance::from_labels(&g, s, t)?;
                            Ok((inst.s(), inst.t()))
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            };
            let config = ExperimentConfig {
                experiment,
                pair_count: explicit.as_ref().map_or(pairs, Vec::len),
                pmax_floor,
                alpha,
                epsilon,
                big_n,
                l_override: (realizations > 0).then_some(realizations),
                sweep_ls: ls,
                eval_samples: samples,
                k_cap,
                pmax_epsilon_cap,
                full_n,
                seed,
                pairs: explicit,
            };
            let run = run_experiment(&g, &config)?;
            let mut w = sink(&out)?;
            write_csv(run.rows(), &mut w).map_err(io_err)?;
            w.flush()?;
            if let Some(path) = summary {
                write_json(&path, &Summary::new(&run))?;
            }
            Ok(())
        }
        Command::GenGraph { nodes, m, seed } => {
            let edges = friending_core::synthetic::preferential_attachment_edges(nodes, m, seed)?;
            let mut w = sink(&out)?;
            writeln!(w, "# preferential attachment: n={nodes} m={m} seed={seed}")?;
            for (u, v) in edges {
                writeln!(w, "{u}\t{v}")?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(io_err)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
