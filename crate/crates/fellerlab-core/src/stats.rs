//! Distributional distance between an empirical sample and a reference
//! marginal law.

use alloc::vec::Vec;

use crate::math;
use crate::reference::MarginalLaw;

/// Two-sided Kolmogorov-Smirnov statistic between the empirical CDF of
/// `samples` (must be sorted ascending) and the living part of `law`,
/// both normalized to total mass 1.
///
/// Killed trajectories are excluded from `samples`; their share is compared
/// separately through [`kill_fraction_error`]. The sup runs over the sample
/// points, evaluating the empirical CDF from the left and from the right.
pub fn ks_statistic(samples: &[f64], law: &MarginalLaw) -> f64 {
    let n = samples.len();
    if n == 0 {
        return 1.0;
    }
    debug_assert!(samples.windows(2).all(|w| w[0] <= w[1]));
    let alive = law.alive_mass();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (k, &y) in samples.iter().enumerate() {
        let f = (law.cdf)(y) / alive;
        let lo = k as f64 / nf;
        let hi = (k + 1) as f64 / nf;
        d = d.max(math::fabs(f - lo)).max(math::fabs(f - hi));
    }
    d
}

/// Absolute difference between the empirical killed fraction and the
/// reference killed mass.
pub fn kill_fraction_error(killed: usize, total: usize, law: &MarginalLaw) -> f64 {
    math::fabs(killed as f64 / total as f64 - law.kill_mass)
}

/// Empirical CDF evaluated at `y` for a sorted sample (right-continuous).
pub fn ecdf(samples: &[f64], y: f64) -> f64 {
    let k = samples.partition_point(|&s| s <= y);
    k as f64 / samples.len() as f64
}

/// Sample mean and unbiased variance.
pub fn mean_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mut sum = crate::math::KahanSum::new();
    for &s in samples {
        sum.add(s);
    }
    let mean = sum.value() / n;
    let mut sq = crate::math::KahanSum::new();
    for &s in samples {
        sq.add((s - mean) * (s - mean));
    }
    (mean, sq.value() / (n - 1.0))
}

/// Sorts a sample in place, tolerating no NaNs.
pub fn sort_samples(samples: &mut Vec<f64>) {
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::reflected_marginal;

    #[test]
    fn ks_perfect_quantiles() {
        // samples at the (k - 1/2)/n quantiles of the law give D = 1/(2n)
        let law = reflected_marginal(0.0, 1.0).unwrap();
        let n = 100usize;
        let mut samples = Vec::new();
        for k in 0..n {
            let target = (k as f64 + 0.5) / n as f64;
            // invert the folded-normal CDF by bisection
            let (mut lo, mut hi) = (0.0f64, 10.0f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (law.cdf)(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            samples.push(0.5 * (lo + hi));
        }
        let d = ks_statistic(&samples, &law);
        assert!(math::fabs(d - 0.005) < 1e-9, "d = {d}");
    }

    #[test]
    fn ks_detects_shift() {
        let law = reflected_marginal(0.0, 1.0).unwrap();
        let samples: Vec<f64> = (0..100).map(|k| 3.0 + k as f64 * 0.01).collect();
        assert!(ks_statistic(&samples, &law) > 0.9);
    }

    #[test]
    fn ks_empty_sample() {
        let law = reflected_marginal(0.0, 1.0).unwrap();
        assert_eq!(ks_statistic(&[], &law), 1.0);
    }

    #[test]
    fn ecdf_examples() {
        let s = [1.0, 2.0, 2.0, 3.0];
        assert_eq!(ecdf(&s, 0.5), 0.0);
        assert_eq!(ecdf(&s, 2.0), 0.75);
        assert_eq!(ecdf(&s, 9.0), 1.0);
    }

    #[test]
    fn mean_var_examples() {
        let (m, v) = mean_var(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!(math::fabs(v - 5.0 / 3.0) < 1e-15);
    }

    #[test]
    fn kill_fraction() {
        let mut law = reflected_marginal(0.0, 1.0).unwrap();
        law.kill_mass = 0.25;
        assert!(math::fabs(kill_fraction_error(30, 100, &law) - 0.05) < 1e-15);
    }
}
