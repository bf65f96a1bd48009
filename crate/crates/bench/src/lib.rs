//! Shared fixtures for the criterion benchmarks in `benches/`.

use friending_core::{compute_vmax, Instance, NodeId, SocialGraph, VmaxMode};

/// First pair `(0, t)` whose target is reachable and not adjacent to 0, scanning
/// `t` downwards from the last node, so benchmarks never hit degenerate cases.
pub fn busy_pair(graph: &SocialGraph) -> Instance<'_> {
    let n = graph.node_count() as NodeId;
    (1..n)
        .rev()
        .filter_map(|t| Instance::new(graph, 0, t).ok())
        .find(|inst| !compute_vmax(inst, VmaxMode::Overapprox).is_empty())
        .expect("graph has a reachable target")
}
