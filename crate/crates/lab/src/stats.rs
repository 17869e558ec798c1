/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials`, clamped so that
/// it always contains the point estimate.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = (center - half).clamp(0.0, 1.0).min(phat);
    let hi = (center + half).clamp(0.0, 1.0).max(phat);
    (lo, hi)
}

/// Value at quantile `q` of sorted data, nearest-rank.
pub fn quantile(sorted: &[usize], q: f64) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 8/10: centre (0.8 + 0.192)/1.384, half-width 1.96/1.384 * sqrt(0.016 + 0.0096)
        let (lo, hi) = wilson(8, 10, Z95);
        let c = (0.8 + Z95 * Z95 / 20.0) / (1.0 + Z95 * Z95 / 10.0);
        let h = Z95 / (1.0 + Z95 * Z95 / 10.0) * (0.016 + Z95 * Z95 / 400.0).sqrt();
        assert!((lo - (c - h)).abs() < 1e-12 && (hi - (c + h)).abs() < 1e-12);
        assert!((lo - 0.4902).abs() < 1e-3 && (hi - 0.9433).abs() < 1e-3);
    }

    #[test]
    fn wilson_extremes_contain_estimate() {
        let (lo, hi) = wilson(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson(50, 50, Z95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.9);
    }

    #[test]
    fn nearest_rank_quantiles() {
        let v = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        assert_eq!(quantile(&v, 0.0), 1);
        assert_eq!(quantile(&v, 0.05), 1);
        assert_eq!(quantile(&v, 0.5), 5);
        assert_eq!(quantile(&v, 1.0), 10);
    }
}
