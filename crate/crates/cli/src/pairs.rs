use log::warn;
use rand::Rng;

use friending_core::rng::{derive_seed, stream};
use friending_core::{compute_vmax, stopping_rule_estimate, Instance, NodeId, SocialGraph, VmaxMode};

/// Coarse relative error used when screening pairs.
pub const SCREEN_EPSILON0: f64 = 0.3;
pub const SCREEN_BIG_N: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    /// Accepted `(s, t)` in draw order, with the screening estimate `p*`.
    pub pairs: Vec<(NodeId, NodeId, f64)>,
    pub attempts: u64,
    /// The attempt cap was hit before `pair_count` pairs were accepted.
    pub shortfall: bool,
}

/// Screening estimate `p*` for `(s, t)` if the pair is valid and clears
/// `pmax_floor`. The stopping rule gets `2Υ / pmax_floor` draws, enough to
/// stop well before the budget whenever `p_max >= pmax_floor`.
pub fn screen_pair(graph: &SocialGraph, s: NodeId, t: NodeId, pmax_floor: f64, seed: u64) -> Option<f64> {
    let inst = Instance::new(graph, s, t).ok()?;
    if compute_vmax(&inst, VmaxMode::Overapprox).is_empty() {
        return None;
    }
    let upsilon = friending_core::upsilon(SCREEN_EPSILON0, SCREEN_BIG_N);
    let max_samples = (2.0 * upsilon as f64 / pmax_floor).ceil() as u64;
    let est = stopping_rule_estimate(&inst, SCREEN_EPSILON0, SCREEN_BIG_N, max_samples, seed).ok()?;
    (est.p_star >= pmax_floor).then_some(est.p_star)
}

/// Draws node pairs uniformly and keeps those with `s != t`, `t ∉ N_s` and a
/// screening estimate `p* >= pmax_floor`, until `pair_count` are accepted or
/// `1000 · pair_count` draws were made. Duplicate pairs are skipped.
pub fn sample_pairs(graph: &SocialGraph, pair_count: usize, pmax_floor: f64, seed: u64) -> PairSample {
    let n = graph.node_count() as NodeId;
    let mut pairs = Vec::with_capacity(pair_count);
    let cap = 1000 * pair_count as u64;
    let mut attempts = 0;
    if n < 2 {
        return PairSample { pairs, attempts, shortfall: pair_count > 0 };
    }
    while pairs.len() < pair_count && attempts < cap {
        let mut rng = stream(seed, attempts);
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        let screen_seed = derive_seed(seed, attempts);
        attempts += 1;
        if pairs.iter().any(|&(a, b, _)| (a, b) == (s, t)) {
            continue;
        }
        if let Some(p) = screen_pair(graph, s, t, pmax_floor, screen_seed) {
            pairs.push((s, t, p));
        }
    }
    let shortfall = pairs.len() < pair_count;
    if shortfall {
        warn!("accepted {} of {pair_count} pairs after {attempts} draws", pairs.len());
    }
    PairSample { pairs, attempts, shortfall }
}
