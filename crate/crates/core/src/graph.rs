//! Social graph data model, edge-list ingestion and problem instances.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense node id in `0..n`.
pub type NodeId = u32;

/// Slack allowed on per-node incoming weight sums read from decimal files.
pub const WEIGHT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// `w(u,v) = 1/|N_v|`.
    DegreeReciprocal,
    /// Weights read from the edge list as `u v w_uv w_vu`.
    ExplicitWeights,
}

/// Undirected friendship graph with per-ordered-pair familiarity weights.
///
/// Adjacency is stored in CSR form with neighbors sorted ascending. For a node
/// `v`, entry `k` of its slice holds neighbor `u` together with `w(u,v)`, the
/// weight `v` assigns to `u`. That is both the probability of `v` selecting `u`
/// in a realization and `u`'s contribution towards `v`'s threshold.
#[derive(Debug, Clone)]
pub struct SocialGraph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    labels: Vec<u64>,
    edges: usize,
}

impl SocialGraph {
    /// Builds a graph over `n` nodes labelled `0..n` with degree-reciprocal
    /// weights. Duplicate edges collapse; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let labels = (0..n as u64).collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::SelfLoop { line: i + 1, label: u as u64 });
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("edge ({u}, {v}) out of range for {n} nodes"),
                });
            }
            pairs.push((u.min(v), u.max(v)));
        }
        Ok(Self::reciprocal(labels, pairs))
    }

    /// Builds a graph from `(u, v, w(u,v), w(v,u))` tuples over nodes `0..n`.
    pub fn from_weighted_edges(n: usize, edges: &[(NodeId, NodeId, f64, f64)]) -> Result<Self> {
        let labels: Vec<u64> = (0..n as u64).collect();
        let mut map = BTreeMap::new();
        for (i, &(u, v, w_uv, w_vu)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::SelfLoop { line: i + 1, label: u as u64 });
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("edge ({u}, {v}) out of range for {n} nodes"),
                });
            }
            insert_weighted(&mut map, i + 1, u, v, w_uv, w_vu)?;
        }
        Self::weighted(labels, map)
    }

    fn reciprocal(labels: Vec<u64>, mut pairs: Vec<(NodeId, NodeId)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let offsets = prefix_offsets(&degree);
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; offsets[n]];
        for &(u, v) in &pairs {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        let mut weights = vec![0.0; offsets[n]];
        let mut cumulative = vec![0.0; offsets[n]];
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            neighbors[range.clone()].sort_unstable();
            let deg = degree[v] as f64;
            for (j, k) in range.enumerate() {
                weights[k] = 1.0 / deg;
                // (j+1)/deg keeps the last entry at exactly 1.0.
                cumulative[k] = (j + 1) as f64 / deg;
            }
        }
        SocialGraph { offsets, neighbors, weights, cumulative, labels, edges: pairs.len() }
    }

    fn weighted(labels: Vec<u64>, map: BTreeMap<(NodeId, NodeId), (f64, f64)>) -> Result<Self> {
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in map.keys() {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let offsets = prefix_offsets(&degree);
        let mut fill = offsets[..n].to_vec();
        let mut entries = vec![(0, 0.0); offsets[n]];
        // Key (u, v) with u < v stores (w(u,v), w(v,u)).
        for (&(u, v), &(w_uv, w_vu)) in &map {
            entries[fill[v as usize]] = (u, w_uv);
            fill[v as usize] += 1;
            entries[fill[u as usize]] = (v, w_vu);
            fill[u as usize] += 1;
        }
        let mut neighbors = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        let mut cumulative = vec![0.0; offsets[n]];
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            entries[range.clone()].sort_unstable_by_key(|e| e.0);
            let mut acc = 0.0;
            for k in range {
                neighbors[k] = entries[k].0;
                weights[k] = entries[k].1;
                acc += entries[k].1;
                cumulative[k] = acc;
            }
            if acc > 1.0 + WEIGHT_SLACK {
                return Err(Error::Normalization { label: labels[v], sum: acc });
            }
        }
        Ok(SocialGraph { offsets, neighbors, weights, cumulative, labels, edges: map.len() })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// `w(u,v)` for each `u` in `neighbors(v)`, aligned.
    pub fn incoming_weights(&self, v: NodeId) -> &[f64] {
        &self.weights[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(v).binary_search(&u).is_ok()
    }

    /// `w(u,v)`: how familiar `v` is with `u`; zero for non-edges.
    pub fn weight(&self, u: NodeId, v: NodeId) -> f64 {
        match self.neighbors(v).binary_search(&u) {
            Ok(k) => self.incoming_weights(v)[k],
            Err(_) => 0.0,
        }
    }

    /// `Σ_u w(u,v)`. Exactly 1.0 for non-isolated nodes under degree-reciprocal weights.
    pub fn weight_total(&self, v: NodeId) -> f64 {
        let (lo, hi) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        if lo == hi {
            0.0
        } else {
            self.cumulative[hi - 1]
        }
    }

    /// Maps a uniform draw `r ∈ [0,1)` to `v`'s selection: neighbor `u` with
    /// probability `w(u,v)`, `None` with the remaining mass.
    #[inline]
    pub fn select(&self, v: NodeId, r: f64) -> Option<NodeId> {
        let (lo, hi) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        let cum = &self.cumulative[lo..hi];
        let k = cum.partition_point(|&c| c <= r);
        (k < cum.len()).then(|| self.neighbors[lo + k])
    }

    /// Original label of a dense id.
    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    /// Dense id of an original label.
    pub fn id_of(&self, label: u64) -> Option<NodeId> {
        self.labels.binary_search(&label).ok().map(|i| i as NodeId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}

fn prefix_offsets(degree: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(degree.len() + 1);
    offsets.push(0);
    let mut acc = 0;
    for d in degree {
        acc += d;
        offsets.push(acc);
    }
    offsets
}

fn insert_weighted(
    map: &mut BTreeMap<(NodeId, NodeId), (f64, f64)>,
    line: usize,
    u: NodeId,
    v: NodeId,
    w_uv: f64,
    w_vu: f64,
) -> Result<()> {
    for w in [w_uv, w_vu] {
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::Parse { line, msg: format!("weight {w} outside (0, 1]") });
        }
    }
    let (key, value) = if u < v { ((u, v), (w_uv, w_vu)) } else { ((v, u), (w_vu, w_uv)) };
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(value);
        }
        Entry::Occupied(e) => {
            if *e.get() != value {
                return Err(Error::Parse {
                    line,
                    msg: "duplicate edge with conflicting weights".to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Reads a SNAP-style edge list. Lines starting with `#` and blank lines are
/// skipped; every other line holds two non-negative integer labels, followed by
/// `w_uv w_vu` under [`WeightScheme::ExplicitWeights`]. Labels are densified
/// in ascending order.
pub fn load_edge_list<R: BufRead>(reader: R, scheme: WeightScheme) -> Result<SocialGraph> {
    let columns = match scheme {
        WeightScheme::DegreeReciprocal => 2,
        WeightScheme::ExplicitWeights => 4,
    };
    let mut raw: Vec<(usize, u64, u64, f64, f64)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != columns {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {columns} fields, found {}", tokens.len()),
            });
        }
        let label = |tok: &str| {
            tok.parse::<u64>()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad node label {tok:?}") })
        };
        let weight = |tok: &str| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad weight {tok:?}") })
        };
        let (u, v) = (label(tokens[0])?, label(tokens[1])?);
        if u == v {
            return Err(Error::SelfLoop { line: lineno, label: u });
        }
        let (w_uv, w_vu) = if columns == 4 { (weight(tokens[2])?, weight(tokens[3])?) } else { (0.0, 0.0) };
        raw.push((lineno, u, v, w_uv, w_vu));
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|r| [r.1, r.2]).collect();
    labels.sort_unstable();
    labels.dedup();
    let id = |l: u64| labels.binary_search(&l).expect("label collected above") as NodeId;

    match scheme {
        WeightScheme::DegreeReciprocal => {
            let pairs = raw
                .iter()
                .map(|r| {
                    let (u, v) = (id(r.1), id(r.2));
                    (u.min(v), u.max(v))
                })
                .collect();
            Ok(SocialGraph::reciprocal(labels, pairs))
        }
        WeightScheme::ExplicitWeights => {
            let mut map = BTreeMap::new();
            for &(line, u, v, w_uv, w_vu) in &raw {
                insert_weighted(&mut map, line, id(u), id(v), w_uv, w_vu)?;
            }
            SocialGraph::weighted(labels, map)
        }
    }
}

pub fn load_edge_list_path(path: &Path, scheme: WeightScheme) -> Result<SocialGraph> {
    let file = File::open(path)?;
    load_edge_list(BufReader::new(file), scheme)
}

/// Position of a node relative to the initiator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Initiator,
    /// Current friend of the initiator (member of `N_s`).
    Seed,
    /// Any other node; the only nodes that may be invited.
    Candidate,
}

/// A friending problem: graph, initiator `s` and target `t`.
#[derive(Debug, Clone)]
pub struct Instance<'g> {
    graph: &'g SocialGraph,
    s: NodeId,
    t: NodeId,
    roles: Vec<Role>,
    seeds: Vec<NodeId>,
    candidates: Vec<NodeId>,
}

impl<'g> Instance<'g> {
    /// Fails when `s == t`, either id is out of range, or `t` is already a
    /// friend of `s`.
    pub fn new(graph: &'g SocialGraph, s: NodeId, t: NodeId) -> Result<Self> {
        let n = graph.node_count();
        if s as usize >= n || t as usize >= n {
            return Err(Error::InvalidInstance(format!("node id out of range (n = {n})")));
        }
        if s == t {
            return Err(Error::InvalidInstance("initiator and target coincide".into()));
        }
        if graph.has_edge(s, t) {
            return Err(Error::InvalidInstance("target is already a friend of the initiator".into()));
        }
        let mut roles = vec![Role::Candidate; n];
        roles[s as usize] = Role::Initiator;
        for &u in graph.neighbors(s) {
            roles[u as usize] = Role::Seed;
        }
        let seeds = graph.neighbors(s).to_vec();
        let candidates = graph.nodes().filter(|&v| roles[v as usize] == Role::Candidate).collect();
        Ok(Instance { graph, s, t, roles, seeds, candidates })
    }

    /// Builds an instance from original node labels.
    pub fn from_labels(graph: &'g SocialGraph, s: u64, t: u64) -> Result<Self> {
        let find = |l: u64| {
            graph.id_of(l).ok_or_else(|| Error::InvalidInstance(format!("unknown node label {l}")))
        };
        Self::new(graph, find(s)?, find(t)?)
    }

    pub fn graph(&self) -> &'g SocialGraph {
        self.graph
    }

    pub fn s(&self) -> NodeId {
        self.s
    }

    pub fn t(&self) -> NodeId {
        self.t
    }

    #[inline]
    pub fn role(&self, v: NodeId) -> Role {
        self.roles[v as usize]
    }

    pub fn is_seed(&self, v: NodeId) -> bool {
        self.roles[v as usize] == Role::Seed
    }

    pub fn is_candidate(&self, v: NodeId) -> bool {
        self.roles[v as usize] == Role::Candidate
    }

    /// `N_s`, ascending.
    pub fn seeds(&self) -> &[NodeId] {
        &self.seeds
    }

    /// `V \ ({s} ∪ N_s)`, ascending.
    pub fn candidates(&self) -> &[NodeId] {
        &self.candidates
    }

    /// Membership mask for an invitation set; errors if it names a
    /// non-candidate or an out-of-range id.
    pub fn invitation_mask(&self, invited: &[NodeId]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.graph.node_count()];
        for &v in invited {
            if v as usize >= mask.len() {
                return Err(Error::Contract(format!("node {v} out of range")));
            }
            if !self.is_candidate(v) {
                return Err(Error::Contract(format!(
                    "node {} is the initiator or already a friend and cannot be invited",
                    self.graph.label(v)
                )));
            }
            mask[v as usize] = true;
        }
        Ok(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, scheme: WeightScheme) -> Result<SocialGraph> {
        load_edge_list(text.as_bytes(), scheme)
    }

    #[test]
    fn reciprocal_path_weights() {
        let g = load("0 1\n1 2", WeightScheme::DegreeReciprocal).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(0, 1), 0.5);
        assert_eq!(g.weight(2, 1), 0.5);
        assert_eq!(g.weight(1, 0), 1.0);
        assert_eq!(g.weight(1, 2), 1.0);
        assert_eq!(g.weight(0, 2), 0.0);
    }

    #[test]
    fn empty_stream_gives_empty_graph() {
        let g = load("", WeightScheme::DegreeReciprocal).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        let g = load("# comment only\n\n", WeightScheme::DegreeReciprocal).unwrap();
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        match load("3 3", WeightScheme::DegreeReciprocal) {
            Err(Error::SelfLoop { line: 1, label: 3 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load("# hdr\n0 1\n1 x\n", WeightScheme::DegreeReciprocal) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0 1 2", WeightScheme::DegreeReciprocal), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("-1 2", WeightScheme::DegreeReciprocal), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn labels_are_densified_and_duplicates_collapse() {
        let g = load("10\t30\n30 10\n# x\n30 20\n", WeightScheme::DegreeReciprocal).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.id_of(20), Some(1));
        assert_eq!(g.label(2), 30);
        assert_eq!(g.id_of(11), None);
        assert_eq!(g.neighbors(2), &[0, 1]);
    }

    #[test]
    fn explicit_weights_load_and_validate() {
        let g = load("0 1 0.3 0.7\n1 2 0.2 0.1\n", WeightScheme::ExplicitWeights).unwrap();
        assert_eq!(g.weight(0, 1), 0.3);
        assert_eq!(g.weight(1, 0), 0.7);
        assert_eq!(g.weight(1, 2), 0.2);
        assert_eq!(g.weight(2, 1), 0.1);
        assert!((g.weight_total(1) - 0.4).abs() < 1e-15);

        match load("0 1 0.6 0.5\n2 1 0.5 0.5\n", WeightScheme::ExplicitWeights) {
            Err(Error::Normalization { label: 1, sum }) => assert!((sum - 1.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        // Decimal rounding within the slack is accepted.
        let g = load("0 1 0.3333333333 1\n2 1 0.3333333333 1\n3 1 0.3333333334 1\n", WeightScheme::ExplicitWeights)
            .unwrap();
        assert!(g.weight_total(1) <= 1.0 + WEIGHT_SLACK);
        assert!(load("0 1 0 0.5", WeightScheme::ExplicitWeights).is_err());
        assert!(load("0 1 0.5 0.5\n1 0 0.4 0.5", WeightScheme::ExplicitWeights).is_err());
        assert!(load("0 1 0.5 0.5\n1 0 0.5 0.5", WeightScheme::ExplicitWeights).is_ok());
    }

    #[test]
    fn reciprocal_totals_are_exactly_one() {
        let edges: Vec<_> = (1..8).map(|v| (0, v)).chain((1..7).map(|v| (v, v + 1))).collect();
        let mut g = SocialGraph::from_edges(9, &edges).unwrap();
        for v in g.nodes() {
            if g.degree(v) > 0 {
                assert_eq!(g.weight_total(v), 1.0);
            } else {
                assert_eq!(g.weight_total(v), 0.0);
            }
        }
        g = SocialGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.weight_total(0), 1.0);
    }

    #[test]
    fn select_respects_cumulative_weights() {
        let g = SocialGraph::from_weighted_edges(3, &[(0, 1, 0.25, 1.0), (2, 1, 0.5, 1.0)]).unwrap();
        assert_eq!(g.select(1, 0.0), Some(0));
        assert_eq!(g.select(1, 0.2499), Some(0));
        assert_eq!(g.select(1, 0.25), Some(2));
        assert_eq!(g.select(1, 0.7499), Some(2));
        assert_eq!(g.select(1, 0.75), None);
        assert_eq!(g.select(0, 0.9999), Some(1));
    }

    #[test]
    fn instance_validation_and_partition() {
        // s=0 - a=1 - b=2 - t=3
        let g = SocialGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = Instance::new(&g, 0, 3).unwrap();
        assert_eq!(inst.seeds(), &[1]);
        assert_eq!(inst.candidates(), &[2, 3]);
        assert!(inst.is_candidate(3));
        assert!(Instance::new(&g, 0, 0).is_err());
        assert!(Instance::new(&g, 0, 1).is_err());
        assert!(Instance::new(&g, 0, 9).is_err());
        assert!(inst.invitation_mask(&[1]).is_err());
        assert!(inst.invitation_mask(&[0]).is_err());
        assert_eq!(inst.invitation_mask(&[3]).unwrap(), vec![false, false, false, true]);
    }
}
