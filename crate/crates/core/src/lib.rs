//! Minimum active friending under the linear threshold friending model.
//!
//! Given a social graph, an initiator `s` and a target `t`, the crate finds a
//! small invitation set whose acceptance probability approaches the best
//! achievable one. The pipeline samples live-edge realizations backwards from
//! `t`, estimates `p_max` with a stopping rule, and reduces invitation
//! selection to a minimum subset cover over the sampled traces.
//!
//! Module map:
//! - [`graph`]: social graph, edge-list ingestion, problem instances.
//! - [`vmax`]: the candidate region reachable by simple seed-to-target chains.
//! - [`realization`]: backward traces, batches, full-realization enumeration.
//! - [`diffusion`]: the threshold friending process and `f(I)` estimators.
//! - [`pmax`]: stopping-rule estimation of `p_max`.
//! - [`cover`]: minimum subset cover over trace families.
//! - [`raf`]: parameter derivation and the end-to-end solver.
//! - [`baselines`]: high-degree and shortest-path comparison strategies.
//! - [`synthetic`]: seeded preferential-attachment graphs.

pub mod baselines;
pub mod cover;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod pmax;
pub mod raf;
pub mod realization;
pub mod rng;
pub mod stats;
pub mod synthetic;
pub mod vmax;

pub use baselines::{grow_until, hd, sp, strategy_set, BaselineSet, GrowResult, Strategy};
pub use cover::{
    build_cover_instance, solve_exact, solve_greedy, CoverInstance, CoverSolution, CoverSolver,
    ExactSolver, GreedySolver,
};
pub use diffusion::{
    estimate_f_thresholds, estimate_f_traces, exact_f, forward_process1, ExactOracle, FEstimate,
    EstimateMethod, ProcessOutcome, ThresholdAssignment,
};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Instance, NodeId, Role, SocialGraph, WeightScheme};
pub use pmax::{stopping_rule_estimate, upsilon, PmaxEstimate};
pub use raf::{compute_l_star, raf, solve_alpha_one, solve_params, RafConfig, RafOptions, RafSolution};
pub use realization::{
    enumerate_realizations, forward_process2, sample_backward_trace, sample_batch, BackwardTrace,
    FullRealization, RealizationBatch, Terminal,
};
pub use synthetic::preferential_attachment;
pub use vmax::{compute_vmax, VmaxMode};

/// Crate version, echoed in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
