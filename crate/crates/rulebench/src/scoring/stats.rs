//! Projection and multi-run statistics.

use crate::scoring::{ScoreError, RHAE_LEVEL_MAX};
use serde::{Deserialize, Serialize};

/// Two-tailed 97.5% Student-t critical values for 1..=30 degrees of
/// freedom (standard table); larger samples fall back to the normal 1.96.
const T_CRITICAL_975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

pub fn t_critical_975(degrees_of_freedom: usize) -> f64 {
    if degrees_of_freedom == 0 {
        return f64::INFINITY;
    }
    T_CRITICAL_975
        .get(degrees_of_freedom - 1)
        .copied()
        .unwrap_or(1.96)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 divisor).
    pub sample_std: f64,
    pub ci95: (f64, f64),
}

/// Mean, sample standard deviation, and the t-based 95% confidence
/// interval of independent run scores.
pub fn multi_run_ci(values: &[f64]) -> Result<CiSummary, ScoreError> {
    let n = values.len();
    if n < 2 {
        return Err(ScoreError::Validation(
            "confidence interval needs at least 2 runs".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ScoreError::Validation("run scores must be finite".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let sample_std = var.sqrt();
    let half = t_critical_975(n - 1) * sample_std / (n as f64).sqrt();
    Ok(CiSummary {
        n,
        mean,
        sample_std,
        ci95: (mean - half, mean + half),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// Observed solve rate on the public set.
    pub solve_rate: f64,
    pub expected_rhae: f64,
    /// Exact binomial 95% interval on the private-set score.
    pub ci95: (f64, f64),
}

/// Project a public-set solve count onto a private set of `n_private`
/// games, assuming each solve scores `per_solve_score`: the expectation is
/// `(solves / n_public) * per_solve_score`, and the interval comes from
/// exact binomial quantiles on the private solve count.
pub fn binomial_projection(
    n_public: u32,
    solves: u32,
    n_private: u32,
    per_solve_score: f64,
) -> Result<Projection, ScoreError> {
    if n_public < 1 || n_private < 1 {
        return Err(ScoreError::Validation(
            "both game sets must be non-empty".into(),
        ));
    }
    if solves > n_public {
        return Err(ScoreError::Validation(format!(
            "solves {solves} exceeds public set size {n_public}"
        )));
    }
    if !(per_solve_score > 0.0 && per_solve_score <= RHAE_LEVEL_MAX + 1e-12) {
        return Err(ScoreError::Validation(format!(
            "per-solve score {per_solve_score} outside (0, {RHAE_LEVEL_MAX}]"
        )));
    }
    let p = solves as f64 / n_public as f64;
    let lo = binomial_quantile(n_private, p, 0.025);
    let hi = binomial_quantile(n_private, p, 0.975);
    let scale = per_solve_score / n_private as f64;
    Ok(Projection {
        solve_rate: p,
        expected_rhae: p * per_solve_score,
        ci95: (lo as f64 * scale, hi as f64 * scale),
    })
}

/// Smallest s with P(X <= s) >= q for X ~ Binomial(n, p).
fn binomial_quantile(n: u32, p: f64, q: f64) -> u32 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    let mut cdf = 0.0;
    // pmf(0) = (1-p)^n, then the multiplicative recurrence.
    let mut pmf = (1.0 - p).powi(n as i32);
    for s in 0..=n {
        cdf += pmf;
        if cdf >= q - 1e-15 {
            return s;
        }
        pmf *= (n - s) as f64 / (s + 1) as f64 * p / (1.0 - p);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_cdf_matches_closed_form() {
        // Binomial(10, 1/2): CDF(4) = 386/1024, CDF(5) = 638/1024.
        assert_eq!(binomial_quantile(10, 0.5, 386.0 / 1024.0), 4);
        assert_eq!(binomial_quantile(10, 0.5, 0.38), 5);
        assert_eq!(binomial_quantile(10, 0.5, 638.0 / 1024.0), 5);
        assert_eq!(binomial_quantile(10, 0.5, 0.63), 6);
    }

    #[test]
    fn projection_of_the_extended_run() {
        let proj = binomial_projection(25, 4, 55, RHAE_LEVEL_MAX).unwrap();
        assert!((proj.solve_rate - 0.16).abs() < 1e-12);
        assert!((proj.expected_rhae - 0.2116).abs() < 1e-9);
        assert!(proj.ci95.0 < proj.expected_rhae && proj.expected_rhae < proj.ci95.1);
        assert!(proj.ci95.0 > 0.0);
    }

    #[test]
    fn degenerate_projections() {
        let zero = binomial_projection(25, 0, 55, 1.0).unwrap();
        assert_eq!(zero.expected_rhae, 0.0);
        assert_eq!(zero.ci95, (0.0, 0.0));

        let full = binomial_projection(25, 25, 55, 1.0).unwrap();
        assert!((full.expected_rhae - 1.0).abs() < 1e-12);
        assert!((full.ci95.0 - 1.0).abs() < 1e-12);
        assert!((full.ci95.1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_validates_inputs() {
        assert!(binomial_projection(25, 26, 55, 1.0).is_err());
        assert!(binomial_projection(0, 0, 55, 1.0).is_err());
        assert!(binomial_projection(25, 4, 55, 0.0).is_err());
        assert!(binomial_projection(25, 4, 55, 2.0).is_err());
    }

    #[test]
    fn eight_run_summary() {
        // Eight independent runs; each score is solves * 1.3225 / 25.
        let runs = [
            0.2116, 0.1587, 0.2116, 0.2116, 0.0529, 0.2116, 0.1058, 0.1587,
        ];
        let s = multi_run_ci(&runs).unwrap();
        assert!((s.mean - 0.16531250).abs() < 5e-4, "mean {}", s.mean);
        assert!((s.sample_std - 0.0596).abs() < 5e-4, "std {}", s.sample_std);
        // t(0.975, 7) = 2.365.
        assert!((s.ci95.0 - 0.115).abs() < 5e-3, "lo {}", s.ci95.0);
        assert!((s.ci95.1 - 0.215).abs() < 5e-3, "hi {}", s.ci95.1);
    }

    #[test]
    fn identical_values_have_zero_spread() {
        let s = multi_run_ci(&[0.4, 0.4, 0.4]).unwrap();
        assert!(s.sample_std < 1e-12);
        assert!((s.ci95.0 - 0.4).abs() < 1e-12 && (s.ci95.1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn two_point_case() {
        let s = multi_run_ci(&[0.0, 1.0]).unwrap();
        assert!((s.mean - 0.5).abs() < 1e-12);
        assert!((s.sample_std - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn single_run_is_rejected() {
        assert!(multi_run_ci(&[0.5]).is_err());
    }

    #[test]
    fn t_table_covers_small_samples() {
        assert!((t_critical_975(7) - 2.365).abs() < 1e-9);
        assert!((t_critical_975(1) - 12.706).abs() < 1e-9);
        assert!((t_critical_975(40) - 1.96).abs() < 1e-9);
    }
}
