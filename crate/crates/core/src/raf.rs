//! Realization-based active friending: derive accuracy parameters, estimate
//! `p_max`, sample `l` traces and cover a `β` fraction of the type-1 ones.

use serde::Serialize;

use crate::cover::{build_cover_instance, CoverSolver, ExactSolver, GreedySolver, DEFAULT_EXACT_MAX_SETS};
use crate::diffusion::{estimate_f_traces, FEstimate};
use crate::error::{Error, Result};
use crate::graph::{Instance, NodeId};
use crate::pmax::{default_max_samples, stopping_rule_estimate, upsilon, PmaxEstimate};
use crate::realization::sample_batch;
use crate::rng::derive_seed;
use crate::vmax::{compute_vmax, VmaxMode};

/// Derived accuracy parameters `(ε0, ε1, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub beta: f64,
}

fn beta_of(alpha: f64, x: f64) -> f64 {
    (alpha - x) / (1.0 + x)
}

/// Solves for `ε1 > 0` with `ε0 = n_eff · ε1`, writing `x = ε1(1 + ε0)`:
///
/// ```text
/// β = (α − x) / (1 + x)
/// β (1 − x) − x = α − ε
/// ```
///
/// The left side of the second line decreases from `α` at `ε1 = 0` to `−α` at
/// the `ε1` where `x = α`, so bisection on that bracket converges.
pub fn solve_params(alpha: f64, epsilon: f64, n_eff: usize) -> Result<DerivedParams> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1]")));
    }
    if !(epsilon > 0.0 && epsilon < alpha) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, alpha)")));
    }
    if n_eff == 0 {
        return Err(Error::InvalidParameter("n_eff must be at least 1".into()));
    }
    let n = n_eff as f64;
    let x_of = |e1: f64| e1 * (1.0 + n * e1);
    let residual = |e1: f64| {
        let x = x_of(e1);
        beta_of(alpha, x) * (1.0 - x) - x - (alpha - epsilon)
    };
    // x(ε1) = α  ⇔  n ε1² + ε1 − α = 0
    let hi0 = (-1.0 + (1.0 + 4.0 * n * alpha).sqrt()) / (2.0 * n);
    let (mut lo, mut hi) = (0.0f64, hi0);
    if !(residual(lo) > 0.0 && residual(hi) < 0.0) {
        return Err(Error::ParamSolve(format!("no sign change on (0, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let epsilon1 = 0.5 * (lo + hi);
    if residual(epsilon1).abs() > 1e-12 || epsilon1 <= 0.0 {
        return Err(Error::ParamSolve(format!("bisection stalled at residual {}", residual(epsilon1))));
    }
    let beta = beta_of(alpha, x_of(epsilon1));
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::ParamSolve(format!("beta = {beta} outside (0, 1)")));
    }
    Ok(DerivedParams { epsilon0: n * epsilon1, epsilon1, beta })
}

/// Sample size sufficient for the uniform accuracy bound over all invitation sets:
///
/// ```text
/// l* = ⌈(ln 2 + ln N + n_eff ln 2)(2 + ε1(1 − ε0)) / (ε1² (1 − ε0)² p*)⌉
/// ```
#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
pub fn compute_l_star(epsilon0: f64, epsilon1: f64, big_n: f64, n_eff: usize, p_star: f64) -> Result<u64> {
    if !(epsilon0 < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon0 = {epsilon0} must be below 1")));
    }
    if !(p_star > 0.0) || !(epsilon1 > 0.0) || !(big_n > 0.0) {
        return Err(Error::InvalidParameter("p_star, epsilon1 and N must be positive".into()));
    }
    let ln2 = std::f64::consts::LN_2;
    let numerator = (ln2 + big_n.ln() + n_eff as f64 * ln2) * (2.0 + epsilon1 * (1.0 - epsilon0));
    let denominator = epsilon1 * epsilon1 * (1.0 - epsilon0).powi(2) * p_star;
    let l = (numerator / denominator).ceil();
    if !l.is_finite() || l >= u64::MAX as f64 {
        return Err(Error::InvalidParameter(format!("l* = {l} is not representable")));
    }
    Ok((l as u64).max(1))
}

#[derive(Debug, Clone)]
pub struct RafOptions {
    /// Use `n` instead of `|V_max|` in `l*`.
    pub full_n: bool,
    /// Fixed realization count instead of `l*`.
    pub l_override: Option<u64>,
    pub seed: u64,
    /// Traces used for the post-hoc `f(I*)` estimate.
    pub f_check_samples: u64,
    /// Stopping-rule sample budget; `None` means `100 · Υ / 0.01`.
    pub pmax_max_samples: Option<u64>,
    /// Largest `ε0` handed to the stopping rule. The coupling `ε0 = n ε1`
    /// exceeds 1 on large graphs; the estimate is then only used for
    /// reporting, and `l_override` must be set.
    pub pmax_epsilon_cap: f64,
    /// Distinct family sets above which the greedy solver replaces the exact one.
    pub exact_cover_cap: usize,
}

impl Default for RafOptions {
    fn default() -> Self {
        RafOptions {
            full_n: false,
            l_override: None,
            seed: 0,
            f_check_samples: 10_000,
            pmax_max_samples: None,
            pmax_epsilon_cap: 1.0,
            exact_cover_cap: DEFAULT_EXACT_MAX_SETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RafConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub big_n: f64,
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub beta: f64,
    /// `None` when the formula degenerates (`ε0 >= 1`) and an override was given.
    pub l_star: Option<u64>,
    pub n_eff: usize,
    pub l_override: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub l: u64,
    pub ones: u64,
    /// `⌈β · |B_l^1|⌉`.
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RafSolution {
    /// `I*`, ascending.
    pub invitation: Vec<NodeId>,
    pub config: RafConfig,
    pub batch: BatchSummary,
    /// `F(B_l, I*)`.
    pub covered: u64,
    pub exact_cover: bool,
    pub pmax: PmaxEstimate,
    pub f_check: Option<FEstimate>,
}

/// Seed tags of the pipeline stages: stage `X` draws from
/// `derive_seed(options.seed, TAG_X)`, so callers can replay a batch.
pub const TAG_PMAX: u64 = 1;
pub const TAG_BATCH: u64 = 2;
pub const TAG_FCHECK: u64 = 3;

/// `⌈β · ones⌉`.
pub fn required_cover(beta: f64, ones: u64) -> u64 {
    ((beta * ones as f64).ceil() as u64).min(ones)
}

/// Covers a `β` fraction of `l` freshly sampled traces; the framework step
/// shared by the full pipeline and the realization sweep.
pub fn cover_sampled(
    instance: &Instance<'_>,
    beta: f64,
    l: u64,
    seed: u64,
    exact_cover_cap: usize,
) -> Result<(Vec<NodeId>, BatchSummary, u64, bool)> {
    let batch = sample_batch(instance, l, seed);
    if batch.ones == 0 {
        return Err(Error::ZeroPmax { samples: l });
    }
    let p = required_cover(beta, batch.ones);
    let cover = build_cover_instance(&batch, instance.candidates(), p)?;
    drop(batch);
    let exact = ExactSolver { max_distinct_sets: exact_cover_cap, ..ExactSolver::default() };
    let solution = if cover.family.len() <= exact_cover_cap {
        match exact.solve(&cover) {
            Ok(s) => s,
            Err(Error::Intractable(_)) => GreedySolver.solve(&cover)?,
            Err(e) => return Err(e),
        }
    } else {
        GreedySolver.solve(&cover)?
    };
    if solution.covered < p {
        return Err(Error::Contract(format!("cover solver returned {} < {p}", solution.covered)));
    }
    Ok((solution.chosen, BatchSummary { l, ones: cover.family_size, p }, solution.covered, solution.exact))
}

/// Runs the full pipeline. Feasibility (`F(B_l, I*) >= ⌈β |B_l^1|⌉`) holds on
/// every return; the quality and size guarantees are probabilistic.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
pub fn raf(instance: &Instance<'_>, alpha: f64, epsilon: f64, big_n: f64, options: &RafOptions) -> Result<RafSolution> {
    if !(big_n >= 3.0) {
        return Err(Error::InvalidParameter(format!("N = {big_n} must be at least 3")));
    }
    let vmax = compute_vmax(instance, VmaxMode::Overapprox);
    let n_eff = if options.full_n { instance.graph().node_count() } else { vmax.len() }.max(1);
    let params = solve_params(alpha, epsilon, n_eff)?;

    let pmax_eps = params.epsilon0.min(options.pmax_epsilon_cap).min(1.0);
    let max_samples = options.pmax_max_samples.unwrap_or_else(|| default_max_samples(upsilon(pmax_eps, big_n)));
    if vmax.is_empty() {
        // t is unreachable from N_s: p_max = 0 exactly.
        return Err(Error::PMaxTooSmall { upper_bound: 0.0, samples: 0 });
    }
    let pmax = stopping_rule_estimate(instance, pmax_eps, big_n, max_samples, derive_seed(options.seed, TAG_PMAX))?;

    let l_star = match compute_l_star(params.epsilon0, params.epsilon1, big_n, n_eff, pmax.p_star) {
        Ok(l) => Some(l),
        Err(e) if options.l_override.is_none() => return Err(e),
        Err(_) => None,
    };
    let l = options.l_override.or(l_star).expect("one of them is set");

    let (invitation, batch, covered, exact_cover) = cover_sampled(
        instance,
        params.beta,
        l,
        derive_seed(options.seed, TAG_BATCH),
        options.exact_cover_cap,
    )?;
    let f_check = if options.f_check_samples > 0 {
        Some(estimate_f_traces(instance, &invitation, options.f_check_samples, derive_seed(options.seed, TAG_FCHECK))?)
    } else {
        None
    };
    Ok(RafSolution {
        invitation,
        config: RafConfig {
            alpha,
            epsilon,
            big_n,
            epsilon0: params.epsilon0,
            epsilon1: params.epsilon1,
            beta: params.beta,
            l_star,
            n_eff,
            l_override: options.l_override,
        },
        batch,
        covered,
        exact_cover,
        pmax,
        f_check,
    })
}

/// The unique minimum invitation set achieving `p_max`.
pub fn solve_alpha_one(instance: &Instance<'_>) -> Vec<NodeId> {
    compute_vmax(instance, VmaxMode::Exact)
}
