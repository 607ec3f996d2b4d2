//! Paired significance tests for comparing two evaluation runs.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

/// Two-sided paired t-test p-value over per-pair differences.
///
/// Degenerate cases: all differences zero gives 1.0; all differences equal
/// and non-zero gives 0.0.
pub fn paired_t_test(differences: &[f64]) -> f64 {
    let Some(&first) = differences.first() else {
        return 1.0;
    };
    if differences.iter().all(|&d| d == 0.0) {
        return 1.0;
    }
    if differences.iter().all(|&d| d == first) {
        return 0.0;
    }
    let n = differences.len() as f64;
    let mean = differences.iter().sum::<f64>() / n;
    let var = differences.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return if mean == 0.0 { 1.0 } else { 0.0 };
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("n >= 2 here");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Largest discordant count for which the exact binomial test is used.
pub const MCNEMAR_EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// A correct, B wrong.
    pub n01: usize,
    /// A wrong, B correct.
    pub n10: usize,
    pub p_value: f64,
    pub exact: bool,
}

/// McNemar's test on discordant counts: exact two-sided binomial when
/// `n01 + n10 <= 25`, otherwise chi-square (1 dof) with continuity correction.
pub fn mcnemar_from_counts(n01: usize, n10: usize) -> McNemarResult {
    let n = n01 + n10;
    if n == 0 {
        return McNemarResult {
            n01,
            n10,
            p_value: 1.0,
            exact: true,
        };
    }
    if n <= MCNEMAR_EXACT_LIMIT {
        let k = n01.min(n10);
        let tail: f64 = (0..=k).map(|i| binomial(n, i)).sum::<f64>() * 0.5f64.powi(n as i32);
        return McNemarResult {
            n01,
            n10,
            p_value: (2.0 * tail).min(1.0),
            exact: true,
        };
    }
    let diff = (n01 as f64 - n10 as f64).abs() - 1.0;
    let stat = diff.max(0.0).powi(2) / n as f64;
    let chi2 = ChiSquared::new(1.0).expect("1 dof");
    McNemarResult {
        n01,
        n10,
        p_value: (1.0 - chi2.cdf(stat)).clamp(0.0, 1.0),
        exact: false,
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paired_t_conventions() {
        assert_eq!(paired_t_test(&[0.0; 5]), 1.0);
        let d: Vec<f64> = (0..5).map(|_| 0.6 - 0.5).collect();
        assert_eq!(paired_t_test(&d), 0.0);
    }

    #[test]
    fn paired_t_reference_value() {
        // d = (1, 2, 3, 4, 5): mean 3, sd sqrt(2.5), t = 3 / sqrt(0.5) = 4.2426, df 4.
        // Two-sided p = 0.013236 (t-distribution table value).
        let p = paired_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!((p - 0.013236).abs() < 1e-5, "{p}");
        let sym = paired_t_test(&[1.0, -1.0, 2.0, -2.0]);
        assert_eq!(sym, 1.0);
    }

    #[test]
    fn mcnemar_examples() {
        assert_eq!(mcnemar_from_counts(0, 0).p_value, 1.0);
        let r = mcnemar_from_counts(5, 0);
        assert!(r.exact);
        assert!((r.p_value - 2.0 * 0.5f64.powi(5)).abs() < 1e-12);
        assert_eq!(mcnemar_from_counts(7, 7).p_value, 1.0);
        assert_eq!(mcnemar_from_counts(0, 5).p_value, r.p_value);
    }

    #[test]
    fn mcnemar_chi_square_branch() {
        // n = 30: statistic (|20 - 10| - 1)^2 / 30 = 2.7, p = 0.10035.
        let r = mcnemar_from_counts(20, 10);
        assert!(!r.exact);
        assert!((r.p_value - 0.100348).abs() < 1e-5, "{}", r.p_value);
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(25, 12), 5_200_300.0);
    }
}
