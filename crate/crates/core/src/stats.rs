//! Confidence half-widths for Bernoulli means.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Half-width of the 95% interval for `successes` out of `trials`.
///
/// Uses the normal approximation, switching to the Wilson score interval when
/// fewer than 10 successes are observed. The Wilson interval is not centred on
/// the sample mean, so the larger of its two sides is reported.
pub fn half_width(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    if successes >= 10 {
        return Z95 * (p * (1.0 - p) / n).sqrt();
    }
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let spread = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (centre + spread - p).max(p - (centre - spread))
}

/// Standard error of a Bernoulli mean estimated from `trials` draws with true mean `p`.
pub fn bernoulli_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
