//! Relative-error estimation of `p_max` with a sequential stopping rule.
//!
//! Type-1 indicators of independent backward traces are Bernoulli(`p_max`).
//! Sampling until `Υ` successes and returning `Υ / i` yields
//! `|p* - p_max| <= ε0 · p_max` with probability at least `1 - 1/N` when
//! `Υ = 1 + 4(e-2)(1+ε0) ln(2N) / ε0²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Instance;
use crate::realization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmaxEstimate {
    pub p_star: f64,
    /// Success target `Υ`.
    pub upsilon: u64,
    /// Traces drawn until the `Υ`-th type-1 trace.
    pub total_samples: u64,
    pub epsilon0: f64,
    /// `1/N`.
    pub failure_budget: f64,
}

/// The success target `Υ = ⌈1 + 4(e−2)(1+ε0)·ln(2N)/ε0²⌉`.
pub fn upsilon(epsilon0: f64, big_n: f64) -> u64 {
    let e = std::f64::consts::E;
    (1.0 + 4.0 * (e - 2.0) * (1.0 + epsilon0) * (2.0 * big_n).ln() / (epsilon0 * epsilon0)).ceil() as u64
}

/// Default sample budget: enough to certify `p_max >= 0.01` with margin (`100 · Υ / 0.01`).
pub fn default_max_samples(upsilon: u64) -> u64 {
    upsilon.saturating_mul(10_000)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
fn validate(epsilon0: f64, big_n: f64, max_samples: u64) -> Result<()> {
    if !(epsilon0 > 0.0 && epsilon0 <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon0 = {epsilon0} outside (0, 1]")));
    }
    if !(big_n >= 3.0) {
        return Err(Error::InvalidParameter(format!("N = {big_n} must be at least 3")));
    }
    if max_samples == 0 {
        return Err(Error::InvalidParameter("max_samples must be at least 1".into()));
    }
    Ok(())
}

/// Draws traces from stream `seed` in index order until `Υ` are type-1.
///
/// Traces are generated in parallel chunks and scanned in index order, so the
/// result equals the purely sequential rule. Fails with
/// [`Error::PMaxTooSmall`] when `max_samples` traces do not contain `Υ`
/// successes.
pub fn stopping_rule_estimate(
    instance: &Instance<'_>,
    epsilon0: f64,
    big_n: f64,
    max_samples: u64,
    seed: u64,
) -> Result<PmaxEstimate> {
    validate(epsilon0, big_n, max_samples)?;
    let target = upsilon(epsilon0, big_n);
    let chunk = target.clamp(1024, 1 << 16);
    let mut successes = 0u64;
    let mut drawn = 0u64;
    while drawn < max_samples {
        let end = (drawn + chunk).min(max_samples);
        let flags: Vec<bool> =
            (drawn..end).into_par_iter().map(|i| realization::trace_at(instance, seed, i).y()).collect();
        for (offset, y) in flags.into_iter().enumerate() {
            if y {
                successes += 1;
                if successes == target {
                    let total = drawn + offset as u64 + 1;
                    return Ok(PmaxEstimate {
                        p_star: target as f64 / total as f64,
                        upsilon: target,
                        total_samples: total,
                        epsilon0,
                        failure_budget: 1.0 / big_n,
                    });
                }
            }
        }
        drawn = end;
    }
    Err(Error::PMaxTooSmall { upper_bound: target as f64 / max_samples as f64, samples: max_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SocialGraph;

    #[test]
    fn upsilon_matches_direct_evaluation() {
        // 1 + 4(e-2)(1.5) ln(200) / 0.25 = 92.34...
        let direct = 1.0 + 4.0 * 0.718_281_828_459_045 * 1.5 * 200f64.ln() / 0.25;
        assert!((direct - 92.338).abs() < 1e-2);
        assert_eq!(upsilon(0.5, 100.0), 93);
        assert_eq!(upsilon(0.3, 10.0), 126);
    }

    #[test]
    fn certain_success_stops_at_upsilon() {
        let g = SocialGraph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let inst = Instance::new(&g, 0, 3).unwrap();
        let est = stopping_rule_estimate(&inst, 0.5, 100.0, 10_000, 1).unwrap();
        assert_eq!(est.total_samples, est.upsilon);
        assert_eq!(est.p_star, 1.0);
        assert_eq!(est.failure_budget, 0.01);
    }

    #[test]
    fn unreachable_target_is_too_small() {
        let g = SocialGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(&g, 0, 3).unwrap();
        match stopping_rule_estimate(&inst, 0.5, 100.0, 5_000, 1) {
            Err(Error::PMaxTooSmall { samples: 5_000, upper_bound }) => {
                assert!((upper_bound - 93.0 / 5000.0).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parameter_validation() {
        let g = SocialGraph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let inst = Instance::new(&g, 0, 3).unwrap();
        assert!(stopping_rule_estimate(&inst, 0.0, 100.0, 10, 1).is_err());
        assert!(stopping_rule_estimate(&inst, 1.5, 100.0, 10, 1).is_err());
        assert!(stopping_rule_estimate(&inst, 0.5, 2.0, 10, 1).is_err());
        assert!(stopping_rule_estimate(&inst, 0.5, 10.0, 0, 1).is_err());
    }

    #[test]
    fn chunking_matches_sequential_scan() {
        let g = SocialGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = Instance::new(&g, 0, 3).unwrap();
        let est = stopping_rule_estimate(&inst, 0.3, 10.0, 1_000_000, 77).unwrap();
        let mut successes = 0;
        let mut i = 0;
        while successes < est.upsilon {
            if realization::trace_at(&inst, 77, i).y() {
                successes += 1;
            }
            i += 1;
        }
        assert_eq!(i, est.total_samples);
        assert!(est.total_samples >= est.upsilon);
    }
}
