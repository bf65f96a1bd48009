//! Live-edge realizations and backward traces.
//!
//! In a realization every node selects at most one neighbor, `u` with
//! probability `w(u,v)`. Following selections backwards from `t` gives the
//! trace `t(g)`; the friending process succeeds under `g` exactly when the
//! trace ends at a friend of `s` and every trace node is invited.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Instance, NodeId, Role};
use crate::rng;

/// How a backward walk ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    /// The last trace node selected this member of `N_s`.
    ReachedSeed(NodeId),
    /// The last trace node selected nobody.
    Dangling,
    /// The last trace node selected a node already on the trace.
    Cycle,
    /// The last trace node selected the initiator, which can never be activated.
    ThroughS,
}

/// The node chain `t(g)` of one realization, starting at `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BackwardTrace {
    pub nodes: Vec<NodeId>,
    pub terminal: Terminal,
}

impl BackwardTrace {
    /// The type flag `y(g)`.
    pub fn y(&self) -> bool {
        matches!(self.terminal, Terminal::ReachedSeed(_))
    }

    /// Whether an invitation mask covers this realization.
    pub fn covered_by(&self, invited: &[bool]) -> bool {
        self.y() && self.nodes.iter().all(|&v| invited[v as usize])
    }

    /// Trace nodes sorted ascending.
    pub fn node_set(&self) -> Vec<NodeId> {
        let mut set = self.nodes.clone();
        set.sort_unstable();
        set
    }
}

/// Debug dump line: `y terminal node,node,...`.
impl fmt::Display for BackwardTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terminal = match self.terminal {
            Terminal::ReachedSeed(u) => format!("seed:{u}"),
            Terminal::Dangling => "dangling".into(),
            Terminal::Cycle => "cycle".into(),
            Terminal::ThroughS => "through-s".into(),
        };
        let nodes: Vec<String> = self.nodes.iter().map(|v| v.to_string()).collect();
        write!(f, "{} {} {}", u8::from(self.y()), terminal, nodes.join(","))
    }
}

/// Follows selections back from `t`. `select(v)` is queried at most once per node.
fn walk(instance: &Instance<'_>, mut select: impl FnMut(NodeId) -> Option<NodeId>) -> BackwardTrace {
    let mut nodes = vec![instance.t()];
    let mut current = instance.t();
    let terminal = loop {
        let Some(u) = select(current) else { break Terminal::Dangling };
        if nodes.contains(&u) {
            break Terminal::Cycle;
        }
        match instance.role(u) {
            Role::Seed => break Terminal::ReachedSeed(u),
            Role::Initiator => break Terminal::ThroughS,
            Role::Candidate => {
                nodes.push(u);
                current = u;
            }
        }
    };
    BackwardTrace { nodes, terminal }
}

/// Samples `t(g)` for a random realization, drawing selections only for the
/// nodes on the chain.
pub fn sample_backward_trace<R: Rng + ?Sized>(instance: &Instance<'_>, rng: &mut R) -> BackwardTrace {
    let g = instance.graph();
    walk(instance, |v| g.select(v, rng.random::<f64>()))
}

/// Trace number `index` of the stream keyed by `seed`.
pub fn trace_at(instance: &Instance<'_>, seed: u64, index: u64) -> BackwardTrace {
    sample_backward_trace(instance, &mut rng::stream(seed, index))
}

/// A multiset `B_l` of sampled traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationBatch {
    pub traces: Vec<BackwardTrace>,
    /// `|B_l^1|`.
    pub ones: u64,
    pub seed: u64,
}

impl RealizationBatch {
    pub fn len(&self) -> u64 {
        self.traces.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// `F(B_l, I)`: number of traces covered by the invitation mask.
    pub fn covered(&self, invited: &[bool]) -> u64 {
        self.traces.iter().filter(|tr| tr.covered_by(invited)).count() as u64
    }
}

/// Draws `l` traces; trace `i` uses stream `(seed, i)`, so the batch is the
/// same for any thread count.
pub fn sample_batch(instance: &Instance<'_>, l: u64, seed: u64) -> RealizationBatch {
    let traces: Vec<BackwardTrace> = (0..l).into_par_iter().map(|i| trace_at(instance, seed, i)).collect();
    let ones = traces.iter().filter(|tr| tr.y()).count() as u64;
    RealizationBatch { traces, ones, seed }
}

/// A complete realization: `selection[v]` is `v`'s selected neighbor, `None` for `ℵ0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullRealization {
    pub selection: Vec<Option<NodeId>>,
}

impl FullRealization {
    /// `t(g)` extracted from the complete selection map.
    pub fn trace(&self, instance: &Instance<'_>) -> BackwardTrace {
        walk(instance, |v| self.selection[v as usize])
    }

    /// Draws every node's selection up front.
    pub fn sample<R: Rng + ?Sized>(instance: &Instance<'_>, rng: &mut R) -> Self {
        let g = instance.graph();
        FullRealization { selection: g.nodes().map(|v| g.select(v, rng.random::<f64>())).collect() }
    }
}

/// Result of a friending process: success flag, final friend set, rounds run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessOutcome {
    pub success: bool,
    /// Friends of `s` at termination, ascending.
    pub friends: Vec<NodeId>,
    pub rounds: usize,
}

/// The friending process on a fixed realization: starting from `H_0 = N_s`,
/// invited nodes whose selection is already a friend join each round, until
/// nothing joins or `t` joins.
pub fn forward_process2(
    instance: &Instance<'_>,
    realization: &FullRealization,
    invited: &[NodeId],
) -> Result<ProcessOutcome> {
    instance.invitation_mask(invited)?;
    let n = instance.graph().node_count();
    if realization.selection.len() != n {
        return Err(Error::Contract("realization does not cover every node".into()));
    }
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
            .filter(|&v| realization.selection[v as usize].is_some_and(|u| friend[u as usize]))
            .collect();
        if joining.is_empty() {
            break;
        }
        rounds += 1;
        for &v in &joining {
            friend[v as usize] = true;
        }
        pending.retain(|&v| !friend[v as usize]);
        if friend[instance.t() as usize] {
            break;
        }
    }
    let friends = (0..n as NodeId).filter(|&v| friend[v as usize]).collect();
    Ok(ProcessOutcome { success: friend[instance.t() as usize], friends, rounds })
}

/// Default cap on the number of realizations `enumerate_realizations` will visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Iterator over every realization with its probability.
///
/// Each node contributes `|N_v| + 1` choices (its neighbors, then `ℵ0`), so
/// the count is `Π_v (|N_v| + 1)`; zero-probability choices are included.
pub struct Realizations<'a, 'g> {
    instance: &'a Instance<'g>,
    digits: Vec<usize>,
    done: bool,
}

pub fn enumerate_realizations<'a, 'g>(
    instance: &'a Instance<'g>,
    cap: u64,
) -> Result<Realizations<'a, 'g>> {
    let g = instance.graph();
    let mut count: u128 = 1;
    for v in g.nodes() {
        count = count.saturating_mul(g.degree(v) as u128 + 1);
    }
    if count > cap as u128 {
        return Err(Error::TooLargeForEnumeration { count, cap });
    }
    Ok(Realizations { instance, digits: vec![0; g.node_count()], done: false })
}

impl Iterator for Realizations<'_, '_> {
    type Item = (FullRealization, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let g = self.instance.graph();
        let mut prob = 1.0;
        let selection = self
            .digits
            .iter()
            .enumerate()
            .map(|(v, &d)| {
                let v = v as NodeId;
                if d < g.degree(v) {
                    prob *= g.incoming_weights(v)[d];
                    Some(g.neighbors(v)[d])
                } else {
                    prob *= (1.0 - g.weight_total(v)).max(0.0);
                    None
                }
            })
            .collect();
        // Advance the mixed-radix counter.
        self.done = true;
        for (v, d) in self.digits.iter_mut().enumerate() {
            if *d < g.degree(v as NodeId) {
                *d += 1;
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some((FullRealization { selection }, prob))
    }
}
