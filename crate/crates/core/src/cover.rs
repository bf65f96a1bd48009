//! Minimum subset cover over families of trace node sets.
//!
//! Given a universe, a family of subsets with multiplicities and a count `p`,
//! find a small set of universe elements that contains family members of total
//! multiplicity at least `p`. An optimal answer is always a union of family
//! sets, which both solvers exploit.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::realization::RealizationBatch;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverInstance {
    /// Ascending.
    pub universe: Vec<NodeId>,
    /// Distinct sets (each ascending), ordered lexicographically, with multiplicities.
    pub family: Vec<(Vec<NodeId>, u64)>,
    pub p: u64,
    /// Total multiplicity `|U|`.
    pub family_size: u64,
}

impl CoverInstance {
    /// Validates and normalizes: sets are sorted, duplicates merged by summing
    /// multiplicities, and the family ordered lexicographically.
    pub fn new(mut universe: Vec<NodeId>, family: Vec<(Vec<NodeId>, u64)>, p: u64) -> Result<Self> {
        universe.sort_unstable();
        universe.dedup();
        let mut merged: BTreeMap<Vec<NodeId>, u64> = BTreeMap::new();
        for (mut set, mult) in family {
            if mult == 0 {
                return Err(Error::Contract("family multiplicities must be at least 1".into()));
            }
            set.sort_unstable();
            set.dedup();
            if let Some(v) = set.iter().find(|v| universe.binary_search(v).is_err()) {
                return Err(Error::Contract(format!("family element {v} is outside the universe")));
            }
            *merged.entry(set).or_default() += mult;
        }
        let family: Vec<_> = merged.into_iter().collect();
        let family_size = family.iter().map(|(_, m)| m).sum();
        if p > family_size {
            return Err(Error::InfeasibleCover { p, available: family_size });
        }
        Ok(CoverInstance { universe, family, p, family_size })
    }

    /// Total multiplicity of family sets contained in `chosen` (ascending).
    pub fn covered(&self, chosen: &[NodeId]) -> u64 {
        self.family
            .iter()
            .filter(|(set, _)| set.iter().all(|v| chosen.binary_search(v).is_ok()))
            .map(|(_, m)| m)
            .sum()
    }

    /// Same instance with a different requirement.
    pub fn with_p(&self, p: u64) -> Result<Self> {
        if p > self.family_size {
            return Err(Error::InfeasibleCover { p, available: self.family_size });
        }
        Ok(CoverInstance { p, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    /// Ascending.
    pub chosen: Vec<NodeId>,
    pub covered: u64,
    pub exact: bool,
}

/// Family of the type-1 traces in a batch over the candidate universe.
/// Type-0 traces are dropped since no invitation set covers them.
pub fn build_cover_instance(batch: &RealizationBatch, candidates: &[NodeId], p: u64) -> Result<CoverInstance> {
    if p > batch.ones {
        return Err(Error::InfeasibleCover { p, available: batch.ones });
    }
    let mut counts: BTreeMap<Vec<NodeId>, u64> = BTreeMap::new();
    for trace in batch.traces.iter().filter(|t| t.y()) {
        *counts.entry(trace.node_set()).or_default() += 1;
    }
    CoverInstance::new(candidates.to_vec(), counts.into_iter().collect(), p)
}

/// A cover solver. Implementations must return a solution covering at least `p`.
pub trait CoverSolver {
    fn solve(&self, instance: &CoverInstance) -> Result<CoverSolution>;
}

/// Greedy: repeatedly absorb the uncovered family set needing the fewest new
/// elements; ties go to higher multiplicity, then the lexicographically
/// smallest set.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedySolver;

impl CoverSolver for GreedySolver {
    fn solve(&self, instance: &CoverInstance) -> Result<CoverSolution> {
        solve_greedy(instance)
    }
}

pub fn solve_greedy(instance: &CoverInstance) -> Result<CoverSolution> {
    if instance.p > instance.family_size {
        return Err(Error::InfeasibleCover { p: instance.p, available: instance.family_size });
    }
    let family = &instance.family;
    // Which family sets contain each element.
    let mut containing: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, (set, _)) in family.iter().enumerate() {
        for &v in set {
            containing.entry(v).or_default().push(i);
        }
    }
    let mut missing: Vec<usize> = family.iter().map(|(set, _)| set.len()).collect();
    // Family index order is lexicographic order, so the key encodes the tie-break.
    let mut queue: BTreeSet<(usize, Reverse<u64>, usize)> =
        family.iter().enumerate().map(|(i, (set, m))| (set.len(), Reverse(*m), i)).collect();
    let mut chosen: BTreeSet<NodeId> = BTreeSet::new();
    let mut covered = 0u64;

    // Empty sets are covered by the empty choice.
    while let Some(&(0, Reverse(m), i)) = queue.first() {
        queue.remove(&(0, Reverse(m), i));
        covered += m;
    }
    while covered < instance.p {
        let (_, _, best) = *queue.first().expect("feasible instance keeps a set to add");
        for &v in &family[best].0 {
            if !chosen.insert(v) {
                continue;
            }
            for &j in &containing[&v] {
                let key = (missing[j], Reverse(family[j].1), j);
                if queue.remove(&key) {
                    missing[j] -= 1;
                    if missing[j] == 0 {
                        covered += family[j].1;
                    } else {
                        queue.insert((missing[j], Reverse(family[j].1), j));
                    }
                }
            }
        }
    }
    let chosen: Vec<NodeId> = chosen.into_iter().collect();
    debug_assert_eq!(instance.covered(&chosen), covered);
    Ok(CoverSolution { chosen, covered, exact: false })
}

/// Branch and bound over unions of family sets; returns a global optimum.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolver {
    /// Refuse instances with more distinct family sets than this.
    pub max_distinct_sets: usize,
    /// Refuse to continue after this many search nodes.
    pub node_budget: u64,
}

pub const DEFAULT_EXACT_MAX_SETS: usize = 25;

impl Default for ExactSolver {
    fn default() -> Self {
        ExactSolver { max_distinct_sets: DEFAULT_EXACT_MAX_SETS, node_budget: 50_000_000 }
    }
}

impl CoverSolver for ExactSolver {
    fn solve(&self, instance: &CoverInstance) -> Result<CoverSolution> {
        self.run(instance)
    }
}

pub fn solve_exact(instance: &CoverInstance) -> Result<CoverSolution> {
    ExactSolver::default().run(instance)
}

/// Fixed-width bitset over the elements that occur in the family.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(words: usize) -> Self {
        Bits(vec![0; words])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn union(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
}

struct Search<'a> {
    sets: Vec<Bits>,
    mult: Vec<u64>,
    /// Multiplicity of sets `i..` (suffix sums), for the reachability bound.
    suffix: Vec<u64>,
    p: u64,
    best: Option<(u32, Bits)>,
    nodes: u64,
    budget: u64,
    order: &'a [usize],
}

impl Search<'_> {
    fn covered(&self, union: &Bits) -> u64 {
        self.sets.iter().zip(&self.mult).filter(|(s, _)| s.is_subset_of(union)).map(|(_, m)| m).sum()
    }

    fn dfs(&mut self, depth: usize, union: Bits, size: u32) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Intractable(format!("search exceeded {} nodes", self.budget)));
        }
        if self.best.as_ref().is_some_and(|(b, _)| size >= *b) {
            return Ok(());
        }
        let covered = self.covered(&union);
        if covered >= self.p {
            self.best = Some((size, union));
            return Ok(());
        }
        if depth == self.order.len() {
            return Ok(());
        }
        // Sets before `depth` were either absorbed or skipped; skipped sets can
        // still be covered later, so bound with everything not yet inside.
        let outside: u64 = self
            .order
            .iter()
            .enumerate()
            .filter(|&(k, &i)| k < depth && !self.sets[i].is_subset_of(&union))
            .map(|(_, &i)| self.mult[i])
            .sum();
        if covered + outside + self.suffix[depth] < self.p {
            return Ok(());
        }
        let i = self.order[depth];
        if self.sets[i].is_subset_of(&union) {
            return self.dfs(depth + 1, union, size);
        }
        let grown = union.union(&self.sets[i]);
        let grown_size = grown.count();
        self.dfs(depth + 1, grown, grown_size)?;
        self.dfs(depth + 1, union, size)
    }
}

impl ExactSolver {
    fn run(&self, instance: &CoverInstance) -> Result<CoverSolution> {
        if instance.p > instance.family_size {
            return Err(Error::InfeasibleCover { p: instance.p, available: instance.family_size });
        }
        if instance.family.len() > self.max_distinct_sets {
            return Err(Error::Intractable(format!(
                "{} distinct family sets exceed the cap of {}",
                instance.family.len(),
                self.max_distinct_sets
            )));
        }
        let elements: Vec<NodeId> = {
            let all: BTreeSet<NodeId> = instance.family.iter().flat_map(|(s, _)| s.iter().copied()).collect();
            all.into_iter().collect()
        };
        let words = elements.len().div_ceil(64).max(1);
        let sets: Vec<Bits> = instance
            .family
            .iter()
            .map(|(s, _)| {
                let mut b = Bits::zero(words);
                for v in s {
                    b.set(elements.binary_search(v).unwrap());
                }
                b
            })
            .collect();
        let mult: Vec<u64> = instance.family.iter().map(|(_, m)| *m).collect();
        // Small sets first tends to find good incumbents early.
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by_key(|&i| (sets[i].count(), Reverse(mult[i]), i));
        let mut suffix = vec![0u64; order.len() + 1];
        for k in (0..order.len()).rev() {
            suffix[k] = suffix[k + 1] + mult[order[k]];
        }

        // Greedy incumbent: search only needs to beat it.
        let greedy = solve_greedy(instance)?;
        let mut search = Search { sets, mult, suffix, p: instance.p, best: None, nodes: 0, budget: self.node_budget, order: &order };
        let mut incumbent = Bits::zero(words);
        for v in &greedy.chosen {
            if let Ok(i) = elements.binary_search(v) {
                incumbent.set(i);
            }
        }
        // Greedy may hold elements outside the family only if p = 0, where both are empty.
        search.best = Some((greedy.chosen.len() as u32, incumbent));
        search.dfs(0, Bits::zero(words), 0)?;

        let (_, union) = search.best.expect("incumbent present");
        let chosen: Vec<NodeId> =
            elements.iter().enumerate().filter(|(i, _)| union.0[i / 64] >> (i % 64) & 1 == 1).map(|(_, &v)| v).collect();
        let covered = instance.covered(&chosen);
        debug_assert!(covered >= instance.p);
        Ok(CoverSolution { chosen, covered, exact: true })
    }
}
