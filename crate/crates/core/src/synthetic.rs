//! Seeded synthetic graphs for experiments when no edge list is at hand.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::rng;

/// Preferential-attachment graph: a clique on `m + 1` nodes, then every new
/// node links to `m` distinct earlier nodes chosen proportionally to degree.
pub fn preferential_attachment_edges(n: usize, m: usize, seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    if m == 0 || n <= m {
        return Err(Error::InvalidParameter(format!("need n > m >= 1, got n = {n}, m = {m}")));
    }
    let mut rng = rng::stream(seed, 0);
    let mut edges = Vec::with_capacity((n - m) * m + m * (m + 1) / 2);
    // every edge endpoint once, so uniform picks are degree-proportional
    let mut ends: Vec<NodeId> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..=m as NodeId {
        for v in 0..u {
            edges.push((v, u));
            ends.extend([v, u]);
        }
    }
    let mut picked: Vec<NodeId> = Vec::with_capacity(m);
    for u in (m + 1) as NodeId..n as NodeId {
        picked.clear();
        while picked.len() < m {
            let v = ends[rng.random_range(0..ends.len())];
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        picked.sort_unstable();
        for &v in &picked {
            edges.push((v, u));
            ends.extend([v, u]);
        }
    }
    Ok(edges)
}

pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Result<SocialGraph> {
    SocialGraph::from_edges(n, &preferential_attachment_edges(n, m, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_count_and_simplicity() {
        let g = preferential_attachment(200, 3, 5).unwrap();
        assert_eq!(g.node_count(), 200);
        assert_eq!(g.edge_count(), 6 + 196 * 3);
        for v in g.nodes() {
            assert!(g.degree(v) >= 3);
            assert!(!g.has_edge(v, v));
        }
    }

    #[test]
    fn seeded() {
        let a = preferential_attachment_edges(300, 4, 11).unwrap();
        let b = preferential_attachment_edges(300, 4, 11).unwrap();
        let c = preferential_attachment_edges(300, 4, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn heavy_tail() {
        let g = preferential_attachment(2000, 3, 1).unwrap();
        let max = g.nodes().map(|v| g.degree(v)).max().unwrap();
        assert!(max > 50, "max degree {max}");
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(preferential_attachment_edges(3, 3, 0).is_err());
        assert!(preferential_attachment_edges(10, 0, 0).is_err());
    }
}
