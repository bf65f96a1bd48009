//! The threshold friending process and estimators of the acceptance
//! probability `f(I)`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Instance, NodeId};
use crate::realization::{self, enumerate_realizations, DEFAULT_ENUMERATION_CAP};
use crate::rng;
use crate::stats;

pub use crate::realization::ProcessOutcome;

/// One threshold `θ_v ∈ [0,1]` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAssignment {
    theta: Vec<f64>,
}

impl ThresholdAssignment {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(v) = theta.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Contract(format!("threshold of node {v} outside [0, 1]")));
        }
        Ok(ThresholdAssignment { theta })
    }

    /// Independent uniform thresholds. Draws land in `(0, 1]` so that a node
    /// with no friends of `s` around it never qualifies.
    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        ThresholdAssignment { theta: (0..n).map(|_| 1.0 - rng.random::<f64>()).collect() }
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.theta[v as usize]
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Runs the round-based friending process: `C_0 = N_s`, and each round every
/// invited node `u` outside `C` with `Σ_{v ∈ C} w(v,u) ≥ θ_u` joins, until no
/// one joins or `t` joins.
pub fn forward_process1(
    instance: &Instance<'_>,
    thresholds: &ThresholdAssignment,
    invited: &[NodeId],
) -> Result<ProcessOutcome> {
    instance.invitation_mask(invited)?;
    let n = instance.graph().node_count();
    if thresholds.len() != n {
        return Err(Error::Contract(format!("{} thresholds for {n} nodes", thresholds.len())));
    }
    Ok(run_process1(instance, &thresholds.theta, invited))
}

fn run_process1(instance: &Instance<'_>, theta: &[f64], invited: &[NodeId]) -> ProcessOutcome {
    let g = instance.graph();
    let n = g.node_count();
    let mut friend = vec![false; n];
    for &u in instance.seeds() {
        friend[u as usize] = true;
    }
    let mut pending: Vec<NodeId> = invited.to_vec();
    pending.sort_unstable();
    pending.dedup();
    let mut rounds = 0;
    loop {
        let joining: Vec<NodeId> = pending
            .iter()
            .copied()
            .filter(|&u| {
                let support: f64 = g
                    .neighbors(u)
                    .iter()
                    .zip(g.incoming_weights(u))
                    .filter(|(v, _)| friend[**v as usize])
                    .map(|(_, w)| w)
                    .sum();
                support >= theta[u as usize]
            })
            .collect();
        if joining.is_empty() {
            break;
        }
        rounds += 1;
        for &u in &joining {
            friend[u as usize] = true;
        }
        pending.retain(|&u| !friend[u as usize]);
        if friend[instance.t() as usize] {
            break;
        }
    }
    let friends = (0..n as NodeId).filter(|&v| friend[v as usize]).collect();
    ProcessOutcome { success: friend[instance.t() as usize], friends, rounds }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMethod {
    Thresholds,
    Traces,
    Exact,
}

/// An estimate of `f(I)` with its 95% half-width (zero for exact values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FEstimate {
    pub mean: f64,
    pub samples: u64,
    pub half_width: f64,
    pub method: EstimateMethod,
}

impl FEstimate {
    fn from_counts(successes: u64, samples: u64, method: EstimateMethod) -> Self {
        FEstimate {
            mean: successes as f64 / samples as f64,
            samples,
            half_width: stats::half_width(successes, samples),
            method,
        }
    }
}

fn check_samples(num_samples: u64) -> Result<()> {
    if num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be at least 1".into()));
    }
    Ok(())
}

/// Monte Carlo over uniform threshold assignments, one stream per sample.
pub fn estimate_f_thresholds(
    instance: &Instance<'_>,
    invited: &[NodeId],
    num_samples: u64,
    seed: u64,
) -> Result<FEstimate> {
    check_samples(num_samples)?;
    instance.invitation_mask(invited)?;
    let n = instance.graph().node_count();
    let successes = (0..num_samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = rng::stream(seed, i);
            let theta = ThresholdAssignment::uniform(n, &mut rng);
            run_process1(instance, &theta.theta, invited).success
        })
        .count() as u64;
    Ok(FEstimate::from_counts(successes, num_samples, EstimateMethod::Thresholds))
}

/// Monte Carlo over backward traces: a sample scores 1 when its trace is
/// type-1 and lies inside `I`.
pub fn estimate_f_traces(
    instance: &Instance<'_>,
    invited: &[NodeId],
    num_samples: u64,
    seed: u64,
) -> Result<FEstimate> {
    check_samples(num_samples)?;
    let mask = instance.invitation_mask(invited)?;
    let successes = (0..num_samples)
        .into_par_iter()
        .filter(|&i| realization::trace_at(instance, seed, i).covered_by(&mask))
        .count() as u64;
    Ok(FEstimate::from_counts(successes, num_samples, EstimateMethod::Traces))
}

/// Exact trace distribution of a small instance, obtained by enumerating every
/// realization once. Answers `f(I)` queries without re-enumerating.
#[derive(Debug, Clone)]
pub struct ExactOracle {
    /// Type-1 trace node sets (ascending) with their total probability.
    type1: Vec<(Vec<NodeId>, f64)>,
    p_max: f64,
    total_mass: f64,
}

impl ExactOracle {
    pub fn new(instance: &Instance<'_>) -> Result<Self> {
        Self::with_cap(instance, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(instance: &Instance<'_>, cap: u64) -> Result<Self> {
        let mut mass: HashMap<Vec<NodeId>, f64> = HashMap::new();
        let mut total_mass = 0.0;
        for (g, prob) in enumerate_realizations(instance, cap)? {
            total_mass += prob;
            if prob == 0.0 {
                continue;
            }
            let trace = g.trace(instance);
            if trace.y() {
                *mass.entry(trace.node_set()).or_default() += prob;
            }
        }
        let mut type1: Vec<_> = mass.into_iter().collect();
        type1.sort_by(|a, b| a.0.cmp(&b.0));
        let p_max = type1.iter().map(|(_, p)| p).sum();
        Ok(ExactOracle { type1, p_max, total_mass })
    }

    /// `p_max = f(candidates)`: the total type-1 mass.
    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Sum of all realization probabilities (1 up to rounding).
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Distinct type-1 trace node sets with their probabilities.
    pub fn type1_traces(&self) -> &[(Vec<NodeId>, f64)] {
        &self.type1
    }

    /// `f(I)` for an invitation set given as a membership mask.
    pub fn f_mask(&self, invited: &[bool]) -> f64 {
        self.type1
            .iter()
            .filter(|(set, _)| set.iter().all(|&v| invited[v as usize]))
            .map(|(_, p)| p)
            .fold(0.0, |a, p| a + p)
    }

    pub fn f(&self, instance: &Instance<'_>, invited: &[NodeId]) -> Result<f64> {
        Ok(self.f_mask(&instance.invitation_mask(invited)?))
    }
}

/// `f(I)` summed exactly over all realizations.
pub fn exact_f(instance: &Instance<'_>, invited: &[NodeId]) -> Result<FEstimate> {
    let mask = instance.invitation_mask(invited)?;
    let oracle = ExactOracle::new(instance)?;
    Ok(FEstimate { mean: oracle.f_mask(&mask), samples: 0, half_width: 0.0, method: EstimateMethod::Exact })
}
