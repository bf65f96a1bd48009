//! Comparison strategies: high degree (HD) and successive shortest paths (SP).
//!
//! Both always invite `t` first; without it the acceptance probability is zero.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::diffusion::{EstimateMethod, FEstimate};
use crate::error::{Error, Result};
use crate::graph::{Instance, NodeId, Role};
use crate::realization::trace_at;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Hd,
    Sp,
}

/// Invitation set produced by a baseline, in selection order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselineSet {
    pub nodes: Vec<NodeId>,
    /// `k` exceeded the number of candidates and was reduced.
    pub clipped: bool,
    /// SP ran out of disjoint paths and was filled in HD order.
    pub padded: bool,
}

impl BaselineSet {
    pub fn sorted(&self) -> Vec<NodeId> {
        let mut v = self.nodes.clone();
        v.sort_unstable();
        v
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("budget k must be at least 1".into()));
    }
    Ok(())
}

/// `t`, then the remaining candidates by degree (descending, ties to smaller id).
fn degree_order(instance: &Instance<'_>) -> Vec<NodeId> {
    let g = instance.graph();
    let t = instance.t();
    let mut rest: Vec<NodeId> = instance.candidates().iter().copied().filter(|&v| v != t).collect();
    rest.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    std::iter::once(t).chain(rest).collect()
}

pub fn hd(instance: &Instance<'_>, k: usize) -> Result<BaselineSet> {
    check_k(k)?;
    let order = degree_order(instance);
    let clipped = k > order.len();
    Ok(BaselineSet { nodes: order[..k.min(order.len())].to_vec(), clipped, padded: false })
}

/// Shortest `s → t` path whose interior avoids `blocked` and contains at least
/// one candidate: `s`, one member of `N_s`, then candidates ending at `t`.
/// Returns the interior candidates nearest-to-`t` first.
fn next_path(instance: &Instance<'_>, blocked: &[bool]) -> Option<Vec<NodeId>> {
    let g = instance.graph();
    let t = instance.t();
    let n = g.node_count();
    let mut parent = vec![NodeId::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &x in instance.seeds() {
        seen[x as usize] = true;
        queue.push_back(x);
    }
    while let Some(v) = queue.pop_front() {
        let from_candidate = instance.role(v) == Role::Candidate;
        for &u in g.neighbors(v) {
            if u == t {
                if from_candidate {
                    let mut path = vec![v];
                    let mut cur = v;
                    while instance.role(parent[cur as usize]) == Role::Candidate {
                        cur = parent[cur as usize];
                        path.push(cur);
                    }
                    return Some(path);
                }
                continue;
            }
            if !seen[u as usize] && instance.role(u) == Role::Candidate && !blocked[u as usize] {
                seen[u as usize] = true;
                parent[u as usize] = v;
                queue.push_back(u);
            }
        }
    }
    None
}

pub fn sp(instance: &Instance<'_>, k: usize) -> Result<BaselineSet> {
    check_k(k)?;
    let limit = instance.candidates().len();
    let clipped = k > limit;
    let k = k.min(limit);
    let mut nodes = vec![instance.t()];
    let mut blocked = vec![false; instance.graph().node_count()];
    while nodes.len() < k {
        let Some(path) = next_path(instance, &blocked) else { break };
        for v in path {
            blocked[v as usize] = true;
            if nodes.len() < k {
                nodes.push(v);
            }
        }
    }
    let padded = nodes.len() < k;
    if padded {
        for v in degree_order(instance) {
            if nodes.len() == k {
                break;
            }
            if !nodes.contains(&v) {
                nodes.push(v);
            }
        }
    }
    Ok(BaselineSet { nodes, clipped, padded })
}

pub fn strategy_set(instance: &Instance<'_>, strategy: Strategy, k: usize) -> Result<BaselineSet> {
    match strategy {
        Strategy::Hd => hd(instance, k),
        Strategy::Sp => sp(instance, k),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowResult {
    pub set: BaselineSet,
    pub k: usize,
    pub estimate: FEstimate,
    /// Whether `estimate.mean >= f_target - estimate.half_width` was met within the cap.
    pub reached: bool,
}

/// Smallest `k <= k_cap` whose strategy set reaches `f_target`, judged by the
/// lower confidence edge of a trace estimate with `eval_samples` draws.
///
/// All budgets share stream `seed`, and strategy sets are nested in `k`, so
/// each trace is sampled once and scored by the smallest prefix covering it.
pub fn grow_until(
    instance: &Instance<'_>,
    strategy: Strategy,
    f_target: f64,
    eval_samples: u64,
    k_cap: usize,
    seed: u64,
) -> Result<GrowResult> {
    if !(0.0..=1.0).contains(&f_target) {
        return Err(Error::InvalidParameter(format!("f_target = {f_target} outside [0, 1]")));
    }
    if eval_samples == 0 {
        return Err(Error::InvalidParameter("eval_samples must be at least 1".into()));
    }
    let full = strategy_set(instance, strategy, k_cap)?;
    let mut rank = vec![usize::MAX; instance.graph().node_count()];
    for (i, &v) in full.nodes.iter().enumerate() {
        rank[v as usize] = i + 1;
    }
    // needed[j] = number of traces first covered by the prefix of length j.
    let mut needed = vec![0u64; full.nodes.len() + 1];
    let per_trace: Vec<usize> = (0..eval_samples)
        .into_par_iter()
        .map(|i| {
            let tr = trace_at(instance, seed, i);
            if !tr.y() {
                return usize::MAX;
            }
            tr.nodes.iter().map(|&v| rank[v as usize]).max().unwrap_or(usize::MAX)
        })
        .collect();
    for r in per_trace {
        if r != usize::MAX {
            needed[r] += 1;
        }
    }
    let mut successes = 0u64;
    let mut last = None;
    for (k, &n) in needed.iter().enumerate().skip(1).take(full.nodes.len()) {
        successes += n;
        let estimate = FEstimate {
            mean: successes as f64 / eval_samples as f64,
            samples: eval_samples,
            half_width: stats::half_width(successes, eval_samples),
            method: EstimateMethod::Traces,
        };
        let reached = estimate.mean >= f_target - estimate.half_width;
        if reached || k == full.nodes.len() {
            let set = strategy_set(instance, strategy, k)?;
            last = Some(GrowResult { set, k, estimate, reached });
            if reached {
                break;
            }
        }
    }
    Ok(last.expect("strategy sets always contain t"))
}
