//! The candidate region `V_max`: candidates lying on a simple chain from the
//! initiator's friends to the target.

use std::collections::VecDeque;

use crate::graph::{Instance, NodeId, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VmaxMode {
    /// Candidates on some simple path from `N_s` to `t` whose other nodes are
    /// all candidates. One unit-capacity flow test per node.
    Exact,
    /// Candidates reachable from `N_s` that can reach `t`, both in `G - {s}`.
    /// A superset of [`VmaxMode::Exact`] computed with two searches.
    Overapprox,
}

/// Returns the region in ascending id order; empty when `t` cannot be reached
/// from `N_s` without passing through `s`.
pub fn compute_vmax(instance: &Instance<'_>, mode: VmaxMode) -> Vec<NodeId> {
    let over = overapprox(instance);
    match mode {
        VmaxMode::Overapprox => over,
        VmaxMode::Exact => exact(instance, &over),
    }
}

fn bfs_avoiding_s(instance: &Instance<'_>, sources: &[NodeId]) -> Vec<bool> {
    let g = instance.graph();
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::new();
    for &v in sources {
        if v != instance.s() && !seen[v as usize] {
            seen[v as usize] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if u != instance.s() && !seen[u as usize] {
                seen[u as usize] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

fn overapprox(instance: &Instance<'_>) -> Vec<NodeId> {
    let from_seeds = bfs_avoiding_s(instance, instance.seeds());
    if !from_seeds[instance.t() as usize] {
        return Vec::new();
    }
    let to_target = bfs_avoiding_s(instance, &[instance.t()]);
    instance
        .candidates()
        .iter()
        .copied()
        .filter(|&u| from_seeds[u as usize] && to_target[u as usize])
        .collect()
}

fn exact(instance: &Instance<'_>, superset: &[NodeId]) -> Vec<NodeId> {
    let g = instance.graph();
    let t = instance.t();
    let touches_seed = |v: NodeId| g.neighbors(v).iter().any(|&u| instance.is_seed(u));

    // t needs a candidate-only chain to a node adjacent to N_s.
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::from([t]);
    seen[t as usize] = true;
    let mut t_ok = false;
    while let Some(v) = queue.pop_front() {
        if touches_seed(v) {
            t_ok = true;
            break;
        }
        for &u in g.neighbors(v) {
            if instance.is_candidate(u) && !seen[u as usize] {
                seen[u as usize] = true;
                queue.push_back(u);
            }
        }
    }
    if !t_ok {
        return Vec::new();
    }

    let net = FlowNet::build(instance);
    superset.iter().copied().filter(|&u| u == t || net.two_disjoint_paths(u)).collect()
}

/// Vertex-split unit-capacity network over the candidates. Node `v` becomes
/// `in = 2v`, `out = 2v + 1`; all of `N_s` is merged into one super-source
/// node `sigma`, and both `sigma` and `in(t)` drain into `sink`. `t` has no
/// outgoing arcs, so a chain can only end there.
struct FlowNet {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u8>,
    sink: usize,
}

impl FlowNet {
    fn build(instance: &Instance<'_>) -> Self {
        let g = instance.graph();
        let n = g.node_count();
        let sigma = 2 * n;
        let sink = 2 * n + 1;
        let mut net = FlowNet { head: vec![Vec::new(); 2 * n + 2], to: Vec::new(), cap: Vec::new(), sink };
        let t = instance.t();
        for &c in instance.candidates() {
            if c == t {
                net.arc(2 * c as usize, sink);
                continue;
            }
            net.arc(2 * c as usize, 2 * c as usize + 1);
            let mut to_sigma = false;
            for &u in g.neighbors(c) {
                match instance.role(u) {
                    Role::Candidate => net.arc(2 * c as usize + 1, 2 * u as usize),
                    Role::Seed => to_sigma = true,
                    Role::Initiator => {}
                }
            }
            if to_sigma {
                net.arc(2 * c as usize + 1, sigma);
            }
        }
        net.arc(sigma, sink);
        net
    }

    fn arc(&mut self, from: usize, to: usize) {
        let id = self.to.len();
        self.to.push(to);
        self.cap.push(1);
        self.head[from].push(id);
        self.to.push(from);
        self.cap.push(0);
        self.head[to].push(id + 1);
    }

    /// Whether two units can flow from `out(u)`: one chain to `N_s`, one to
    /// `t`, sharing only `u`.
    fn two_disjoint_paths(&self, u: NodeId) -> bool {
        let source = 2 * u as usize + 1;
        let mut cap = self.cap.clone();
        let mut parent = vec![usize::MAX; self.head.len()];
        for _ in 0..2 {
            parent.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([source]);
            parent[source] = usize::MAX - 1;
            let mut found = false;
            'bfs: while let Some(x) = queue.pop_front() {
                for &a in &self.head[x] {
                    let y = self.to[a];
                    if cap[a] > 0 && parent[y] == usize::MAX {
                        parent[y] = a;
                        if y == self.sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                }
            }
            if !found {
                return false;
            }
            let mut y = self.sink;
            while y != source {
                let a = parent[y];
                cap[a] -= 1;
                cap[a ^ 1] += 1;
                y = self.to[a ^ 1];
            }
        }
        true
    }
}
