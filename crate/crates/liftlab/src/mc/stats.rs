//! Statistical helpers: Wilson score intervals, two-proportion tests, and
//! log-log slope fitting.

/// Normal quantile for the 99% two-sided Wilson interval (0.995 point).
pub const Z_99: f64 = 2.575829303548901;

/// Normal quantile for two-sided tests at alpha = 0.001 (0.9995 point).
pub const Z_ALPHA_001: f64 = 3.290526731491926;

/// Wilson score interval; always contains the point estimate and behaves
/// sensibly for probabilities near 1, which is where the formulas under
/// test live.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The interval contains the point estimate mathematically; widen by
    // rounding error so it does in floating point too.
    let lo = (center - half).max(0.0).min(p);
    let hi = (center + half).min(1.0).max(p);
    (lo, hi)
}

/// Pooled two-proportion z statistic. Returns 0 when the pooled estimate
/// is degenerate (0 or 1), where the samples carry no evidence of a
/// difference.
pub fn two_proportion_z(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    assert!(n1 > 0 && n2 > 0);
    let p1 = s1 as f64 / n1 as f64;
    let p2 = s2 as f64 / n2 as f64;
    let pooled = (s1 + s2) as f64 / (n1 + n2) as f64;
    if pooled <= 0.0 || pooled >= 1.0 {
        return 0.0;
    }
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    (p1 - p2) / se
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Chi-square statistic of observed counts against the uniform
/// distribution over the cells.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_point_estimate() {
        for (s, n) in [(0u64, 10u64), (10, 10), (3, 10), (999, 1000), (1, 1)] {
            let (lo, hi) = wilson_interval(s, n, Z_99);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi, "({s}, {n}): [{lo}, {hi}] vs {p}");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn wilson_single_certain_trial() {
        let (lo, hi) = wilson_interval(1, 1, Z_99);
        assert!(lo > 0.0, "lower bound stays above 0: {lo}");
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_proportion_symmetric_and_degenerate() {
        let z = two_proportion_z(50, 100, 50, 100);
        assert!(z.abs() < 1e-12);
        assert_eq!(two_proportion_z(0, 100, 0, 100), 0.0);
        assert_eq!(two_proportion_z(100, 100, 100, 100), 0.0);
        let z = two_proportion_z(90, 100, 50, 100);
        assert!(z > 5.0);
    }

    #[test]
    fn slope_of_exact_line() {
        let xs: Vec<f64> = [10.0f64, 20.0, 40.0, 80.0].iter().map(|n| n.ln()).collect();
        let ys: Vec<f64> = [10.0f64, 20.0, 40.0, 80.0]
            .iter()
            .map(|n: &f64| (1.0 / n).ln())
            .collect();
        let slope = least_squares_slope(&xs, &ys);
        assert!((slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_of_perfectly_uniform_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
        assert!(chi_square_uniform(&[10, 0, 10, 0]) > 0.0);
    }
}
