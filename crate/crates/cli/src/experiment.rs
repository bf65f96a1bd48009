//! The comparison experiments, run per sampled pair.

use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use friending_core::raf::cover_sampled;
use friending_core::rng::derive_seed;
use friending_core::{
    compute_vmax, estimate_f_traces, grow_until, hd, raf, solve_params, sp, Error, FEstimate, Instance, NodeId,
    RafOptions, RafSolution, Result, SocialGraph, Strategy, VmaxMode,
};

use crate::pairs::sample_pairs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// RAF, then HD and SP at the same budget.
    FixedBudget,
    /// Grow HD until it matches f(I_RAF).
    MatchHd,
    /// Grow SP until it matches f(I_RAF).
    MatchSp,
    /// |V_max| against |I_RAF|.
    VmaxRatio,
    /// f(I*) for a range of realization counts.
    RealizationSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub pair_count: usize,
    pub pmax_floor: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub big_n: f64,
    /// Realization count per RAF run; `None` uses `l*`.
    pub l_override: Option<u64>,
    /// Realization counts for the sweep.
    pub sweep_ls: Vec<u64>,
    /// Trace samples behind every reported `f`.
    pub eval_samples: u64,
    /// Budget cap when growing baselines; `None` means all candidates.
    pub k_cap: Option<usize>,
    pub pmax_epsilon_cap: f64,
    pub full_n: bool,
    pub seed: u64,
    /// Explicit `(s, t)` ids; when set, no pairs are sampled.
    pub pairs: Option<Vec<(NodeId, NodeId)>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::FixedBudget,
            pair_count: 10,
            pmax_floor: 0.01,
            alpha: 0.1,
            epsilon: 0.01,
            big_n: 10.0,
            l_override: Some(100_000),
            sweep_ls: vec![10, 100, 1_000, 10_000, 100_000],
            eval_samples: 100_000,
            k_cap: None,
            pmax_epsilon_cap: 0.3,
            full_n: false,
            seed: 0,
            pairs: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.pmax_floor > 0.0 && self.pmax_floor <= 1.0) {
            return bad(format!("pmax_floor = {} outside (0, 1]", self.pmax_floor));
        }
        if self.pair_count == 0 && self.pairs.is_none() {
            return bad("pair_count must be at least 1".into());
        }
        if self.eval_samples == 0 {
            return bad("eval_samples must be at least 1".into());
        }
        if self.experiment == Experiment::RealizationSweep && (self.sweep_ls.is_empty() || self.sweep_ls.contains(&0)) {
            return bad("sweep realization counts must be positive".into());
        }
        if self.k_cap == Some(0) {
            return bad("k_cap must be at least 1".into());
        }
        solve_params(self.alpha, self.epsilon, 1).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The target cannot be reached through candidates.
    Unreachable,
    /// No stopping decision within the sample budget.
    PmaxTooSmall,
    /// The batch contained no type-1 trace.
    NoTypeOneTraces,
    Failed,
}

impl Status {
    fn of(err: &Error) -> Status {
        match err {
            Error::PMaxTooSmall { upper_bound, .. } if *upper_bound == 0.0 => Status::Unreachable,
            Error::PMaxTooSmall { .. } => Status::PmaxTooSmall,
            Error::ZeroPmax { .. } => Status::NoTypeOneTraces,
            _ => Status::Failed,
        }
    }
}

/// One CSV row: a pair, or a `(pair, l)` combination in the sweep. Columns
/// that do not apply to the experiment stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct PairRow {
    pub pair_index: usize,
    /// Original node labels.
    pub s: u64,
    pub t: u64,
    pub status: Option<Status>,
    pub p_star: Option<f64>,
    pub l: Option<u64>,
    pub ones: Option<u64>,
    pub p: Option<u64>,
    pub covered: Option<u64>,
    pub size_raf: Option<usize>,
    pub f_raf: Option<f64>,
    pub hw_raf: Option<f64>,
    pub size_hd: Option<usize>,
    pub f_hd: Option<f64>,
    pub hw_hd: Option<f64>,
    pub size_sp: Option<usize>,
    pub f_sp: Option<f64>,
    pub hw_sp: Option<f64>,
    pub size_vmax: Option<usize>,
    pub ratio_hd: Option<f64>,
    pub ratio_sp: Option<f64>,
    pub ratio_vmax: Option<f64>,
    /// `f` of the baseline at `|I_RAF|` over `f(I_RAF)`.
    pub f_ratio_hd: Option<f64>,
    pub f_ratio_sp: Option<f64>,
    pub reached_hd: Option<bool>,
    pub reached_sp: Option<bool>,
}

/// Wall-clock per phase in milliseconds; reported in the JSON summary only.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub raf_ms: f64,
    pub baselines_ms: f64,
    pub evaluation_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOutcome {
    pub rows: Vec<PairRow>,
    pub seed: u64,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub outcomes: Vec<PairOutcome>,
    pub pair_attempts: u64,
    pub shortfall: bool,
}

impl ExperimentRun {
    pub fn rows(&self) -> impl Iterator<Item = &PairRow> {
        self.outcomes.iter().flat_map(|o| o.rows.iter())
    }
}

// Per-pair seed tags.
const TAG_RAF: u64 = 1;
const TAG_EVAL: u64 = 2;
const TAG_SWEEP: u64 = 3;
const TAG_PAIRS: u64 = 0xA11;

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

fn record(row_f: &mut Option<f64>, row_hw: &mut Option<f64>, est: &FEstimate) {
    *row_f = Some(est.mean);
    *row_hw = Some(est.half_width);
}

/// Samples (or takes) the pairs and runs the configured experiment on each,
/// in parallel. Per-pair seeds depend only on `(config.seed, pair_index)`.
pub fn run_experiment(graph: &SocialGraph, config: &ExperimentConfig) -> Result<ExperimentRun> {
    config.validate()?;
    let (pairs, attempts, shortfall) = match &config.pairs {
        Some(p) => (p.clone(), 0, false),
        None => {
            let sample = sample_pairs(graph, config.pair_count, config.pmax_floor, derive_seed(config.seed, TAG_PAIRS));
            (sample.pairs.iter().map(|&(s, t, _)| (s, t)).collect(), sample.attempts, sample.shortfall)
        }
    };
    info!("running {:?} on {} pairs", config.experiment, pairs.len());
    let outcomes = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(s, t))| run_pair(graph, config, i, s, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentRun { config: config.clone(), outcomes, pair_attempts: attempts, shortfall })
}

fn raf_options(config: &ExperimentConfig, seed: u64) -> RafOptions {
    RafOptions {
        full_n: config.full_n,
        l_override: config.l_override,
        seed: derive_seed(seed, TAG_RAF),
        f_check_samples: 0,
        pmax_epsilon_cap: config.pmax_epsilon_cap,
        ..RafOptions::default()
    }
}

fn run_pair(graph: &SocialGraph, config: &ExperimentConfig, index: usize, s: NodeId, t: NodeId) -> Result<PairOutcome> {
    let seed = derive_seed(config.seed, index as u64);
    let inst = Instance::new(graph, s, t)?;
    let base = PairRow { pair_index: index, s: graph.label(s), t: graph.label(t), ..PairRow::default() };
    let mut timings = Timings::default();
    if config.experiment == Experiment::RealizationSweep {
        let rows = sweep(&inst, config, seed, &base)?;
        return Ok(PairOutcome { rows, seed, timings });
    }

    let start = Instant::now();
    let solution = raf(&inst, config.alpha, config.epsilon, config.big_n, &raf_options(config, seed));
    timings.raf_ms = ms(start);
    let sol = match solution {
        Ok(sol) => sol,
        Err(e @ (Error::InvalidParameter(_) | Error::ParamSolve(_))) => return Err(e),
        Err(e) => {
            warn!("pair {index} ({}, {}): {e}", base.s, base.t);
            return Ok(PairOutcome { rows: vec![PairRow { status: Some(Status::of(&e)), ..base }], seed, timings });
        }
    };
    let mut row = raf_row(base, &sol);
    let eval_seed = derive_seed(seed, TAG_EVAL);
    let k = sol.invitation.len();

    let start = Instant::now();
    let f_raf = estimate_f_traces(&inst, &sol.invitation, config.eval_samples, eval_seed)?;
    record(&mut row.f_raf, &mut row.hw_raf, &f_raf);
    timings.evaluation_ms = ms(start);

    let start = Instant::now();
    match config.experiment {
        Experiment::FixedBudget => {
            for (strategy, size, f, hw) in [
                (Strategy::Hd, &mut row.size_hd, &mut row.f_hd, &mut row.hw_hd),
                (Strategy::Sp, &mut row.size_sp, &mut row.f_sp, &mut row.hw_sp),
            ] {
                let set = match strategy {
                    Strategy::Hd => hd(&inst, k)?,
                    Strategy::Sp => sp(&inst, k)?,
                };
                let est = estimate_f_traces(&inst, &set.nodes, config.eval_samples, eval_seed)?;
                *size = Some(set.nodes.len());
                record(f, hw, &est);
            }
            row.f_ratio_hd = row.f_hd.filter(|_| f_raf.mean > 0.0).map(|f| f / f_raf.mean);
            row.f_ratio_sp = row.f_sp.filter(|_| f_raf.mean > 0.0).map(|f| f / f_raf.mean);
        }
        Experiment::MatchHd | Experiment::MatchSp => {
            let (strategy, fixed) = if config.experiment == Experiment::MatchHd {
                (Strategy::Hd, hd(&inst, k)?)
            } else {
                (Strategy::Sp, sp(&inst, k)?)
            };
            let at_budget = estimate_f_traces(&inst, &fixed.nodes, config.eval_samples, eval_seed)?;
            let f_ratio = (f_raf.mean > 0.0).then(|| at_budget.mean / f_raf.mean);
            let cap = config.k_cap.unwrap_or(inst.candidates().len());
            let grown = grow_until(&inst, strategy, f_raf.mean, config.eval_samples, cap, eval_seed)?;
            let size = grown.set.nodes.len();
            if strategy == Strategy::Hd {
                (row.size_hd, row.reached_hd, row.ratio_hd, row.f_ratio_hd) =
                    (Some(size), Some(grown.reached), ratio(size, k), f_ratio);
                record(&mut row.f_hd, &mut row.hw_hd, &grown.estimate);
            } else {
                (row.size_sp, row.reached_sp, row.ratio_sp, row.f_ratio_sp) =
                    (Some(size), Some(grown.reached), ratio(size, k), f_ratio);
                record(&mut row.f_sp, &mut row.hw_sp, &grown.estimate);
            }
        }
        Experiment::VmaxRatio => {
            let vmax = compute_vmax(&inst, VmaxMode::Exact).len();
            row.size_vmax = Some(vmax);
            row.ratio_vmax = ratio(vmax, k);
        }
        Experiment::RealizationSweep => unreachable!(),
    }
    timings.baselines_ms = ms(start);
    Ok(PairOutcome { rows: vec![row], seed, timings })
}

fn raf_row(base: PairRow, sol: &RafSolution) -> PairRow {
    PairRow {
        status: Some(Status::Ok),
        p_star: Some(sol.pmax.p_star),
        l: Some(sol.batch.l),
        ones: Some(sol.batch.ones),
        p: Some(sol.batch.p),
        covered: Some(sol.covered),
        size_raf: Some(sol.invitation.len()),
        ..base
    }
}

/// Fixed `β`, varying `l`. All `l` share one trace stream, so smaller batches
/// are prefixes of larger ones.
fn sweep(inst: &Instance<'_>, config: &ExperimentConfig, seed: u64, base: &PairRow) -> Result<Vec<PairRow>> {
    let n_eff = if config.full_n {
        inst.graph().node_count()
    } else {
        compute_vmax(inst, VmaxMode::Overapprox).len()
    };
    let beta = solve_params(config.alpha, config.epsilon, n_eff.max(1))?.beta;
    let batch_seed = derive_seed(seed, TAG_SWEEP);
    let eval_seed = derive_seed(seed, TAG_EVAL);
    let mut rows = Vec::with_capacity(config.sweep_ls.len());
    for &l in &config.sweep_ls {
        let mut row = PairRow { l: Some(l), ..base.clone() };
        match cover_sampled(inst, beta, l, batch_seed, friending_core::cover::DEFAULT_EXACT_MAX_SETS) {
            Ok((invitation, batch, covered, _)) => {
                let est = estimate_f_traces(inst, &invitation, config.eval_samples, eval_seed)?;
                row.status = Some(Status::Ok);
                (row.ones, row.p, row.covered, row.size_raf) =
                    (Some(batch.ones), Some(batch.p), Some(covered), Some(invitation.len()));
                record(&mut row.f_raf, &mut row.hw_raf, &est);
            }
            Err(e) => row.status = Some(Status::of(&e)),
        }
        rows.push(row);
    }
    Ok(rows)
}
