use statrs::function::beta::inv_beta_reg;

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion at
/// confidence `1 - alpha`.
pub fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 { 0.0 } else { inv_beta_reg(x, n - x + 1.0, alpha / 2.0) };
    let hi = if successes == trials { 1.0 } else { inv_beta_reg(x + 1.0, n - x, 1.0 - alpha / 2.0) };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_quantiles() {
        // Beta quantiles from an independent implementation (scipy.stats.beta.ppf).
        let cases = [
            (0, 10, 0.0, 0.3084971078187608),
            (3, 10, 0.06673951117773447, 0.6524528500599973),
            (10, 10, 0.6915028921812392, 1.0),
            (50, 1000, 0.0373353976046618, 0.06539048791549364),
            (1, 500, 5.0634334007415215e-05, 0.011092476898968787),
            (499, 500, 0.9889075231010312, 0.9999493656659926),
        ];
        for (x, n, lo, hi) in cases {
            let (a, b) = clopper_pearson(x, n, 0.05);
            assert!((a - lo).abs() < 1e-9, "{x}/{n}: {a} vs {lo}");
            assert!((b - hi).abs() < 1e-9, "{x}/{n}: {b} vs {hi}");
        }
    }

    proptest! {
        #[test]
        fn interval_brackets_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
            let x = ((n as f64) * frac).round() as u64;
            let (lo, hi) = clopper_pearson(x, n, 0.05);
            let p = x as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }
}
