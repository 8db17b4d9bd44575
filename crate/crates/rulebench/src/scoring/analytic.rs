//! Closed-form speed/depth curves for the toy and uniform-information
//! families, with numerical convexity certification and the first-order
//! efficiency-loss check near the always-explore optimum.
//!
//! For the toy world with plan cost k and waste M, the expected action
//! count of the explore-with-probability-p policy is
//! `A(p) = p(1 + k - (k+M)/2) + (k+M)/2`. Parametrized by depth
//! `D = p ln 2`, this is affine: `A(D) = c0 - c1 D` with `c0 = (k+M)/2`
//! and `c1 = (M-k-2)/(2 ln 2)`, so the speed curve `S(D) = 1/A(D)` is
//! strictly convex and increasing on [0, ln 2].

use crate::scoring::ScoreError;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Analytic curve of the two-hypothesis toy world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstarCurve {
    /// k: correct-plan actions.
    pub plan_steps: u32,
    /// M: wrong-plan waste actions.
    pub waste_steps: u32,
    /// (k + M) / 2.
    pub c0: f64,
    /// (M - k - 2) / (2 ln 2).
    pub c1: f64,
}

/// Build the toy curve; requires M > k + 2 so the depth coefficient is
/// positive.
pub fn estar_curve(plan_steps: u32, waste_steps: u32) -> Result<EstarCurve, ScoreError> {
    if plan_steps < 1 {
        return Err(ScoreError::Validation("plan_steps (k) must be >= 1".into()));
    }
    if waste_steps <= plan_steps + 2 {
        return Err(ScoreError::Validation(format!(
            "waste_steps (M = {waste_steps}) must exceed plan_steps + 2 (k = {plan_steps})"
        )));
    }
    let k = plan_steps as f64;
    let m = waste_steps as f64;
    Ok(EstarCurve {
        plan_steps,
        waste_steps,
        c0: (k + m) / 2.0,
        c1: (m - k - 2.0) / (2.0 * LN_2),
    })
}

impl EstarCurve {
    /// Depth domain: [0, ln 2].
    pub fn domain(&self) -> (f64, f64) {
        (0.0, LN_2)
    }

    /// Expected action count of the explore-with-probability-p policy.
    pub fn a_of_p(&self, p: f64) -> Result<f64, ScoreError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ScoreError::Validation(format!(
                "explore probability {p} outside [0, 1]"
            )));
        }
        let k = self.plan_steps as f64;
        Ok(p * (1.0 + k - self.c0) + self.c0)
    }

    /// Expected action count at depth D: c0 - c1 D.
    pub fn a_of_d(&self, d: f64) -> Result<f64, ScoreError> {
        self.check_depth(d)?;
        Ok(self.c0 - self.c1 * d)
    }

    /// Speed at depth D: 1 / (c0 - c1 D).
    pub fn s_of_d(&self, d: f64) -> Result<f64, ScoreError> {
        Ok(1.0 / self.a_of_d(d)?)
    }

    /// Uniform (D, S) samples across the domain.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        assert!(points >= 2);
        (0..points)
            .map(|i| {
                let d = LN_2 * i as f64 / (points - 1) as f64;
                (d, self.s_of_d(d).expect("domain point"))
            })
            .collect()
    }

    fn check_depth(&self, d: f64) -> Result<(), ScoreError> {
        if !(0.0..=LN_2 + 1e-12).contains(&d) {
            return Err(ScoreError::Validation(format!(
                "depth {d} outside [0, ln 2]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub convex: bool,
    /// Minimum central second difference across the sample.
    pub min_second_difference: f64,
}

/// Certify strict convexity of uniformly spaced (x, y) samples: true iff
/// every central second difference is strictly positive.
pub fn convexity_certificate(samples: &[(f64, f64)]) -> Result<ConvexityCertificate, ScoreError> {
    if samples.len() < 3 {
        return Err(ScoreError::Validation(
            "convexity needs at least 3 samples".into(),
        ));
    }
    let h = samples[1].0 - samples[0].0;
    if h <= 0.0 {
        return Err(ScoreError::Validation(
            "sample abscissae must be strictly increasing".into(),
        ));
    }
    for pair in samples.windows(2) {
        let step = pair[1].0 - pair[0].0;
        if step <= 0.0 {
            return Err(ScoreError::Validation(
                "sample abscissae must be strictly increasing".into(),
            ));
        }
        if (step - h).abs() > 1e-9 * h.max(1.0) {
            return Err(ScoreError::Validation(format!(
                "non-uniform spacing: {step} vs {h}"
            )));
        }
    }
    let mut min_dd = f64::INFINITY;
    for w in samples.windows(3) {
        let dd = w[2].1 - 2.0 * w[1].1 + w[0].1;
        min_dd = min_dd.min(dd);
    }
    Ok(ConvexityCertificate {
        convex: min_dd > 0.0,
        min_second_difference: min_dd,
    })
}

/// Affine action-count curve of a uniform-information environment:
/// `A(D) = (1/dh + beta (k - M)) D + (M + alpha (k - M))`, written as
/// `c0 - c1 D` with both coefficients positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UisCurve {
    pub probe_gain: f64,
    pub correct_intercept: f64,
    pub correct_slope: f64,
    pub plan_steps: u32,
    pub waste_steps: u32,
    pub c0: f64,
    pub c1: f64,
    /// Depth at which the correctness probability saturates: (1 - alpha)/beta.
    pub d_max: f64,
}

pub fn uis_curve(
    probe_gain: f64,
    correct_intercept: f64,
    correct_slope: f64,
    plan_steps: u32,
    waste_steps: u32,
) -> Result<UisCurve, ScoreError> {
    if !(probe_gain > 0.0 && probe_gain.is_finite()) {
        return Err(ScoreError::Validation(
            "probe gain (delta-h) must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&correct_intercept) {
        return Err(ScoreError::Validation(
            "correct_intercept (alpha) must lie in [0, 1]".into(),
        ));
    }
    if correct_slope < 0.0 {
        return Err(ScoreError::Validation(
            "correct_slope (beta) must be nonnegative".into(),
        ));
    }
    if plan_steps < 1 || waste_steps <= plan_steps {
        return Err(ScoreError::Validation(
            "need waste_steps (M) > plan_steps (k) >= 1".into(),
        ));
    }
    let k = plan_steps as f64;
    let m = waste_steps as f64;
    // Exploration must save actions: 1/dh - beta (M - k) < 0.
    let slope = 1.0 / probe_gain - correct_slope * (m - k);
    if slope >= 0.0 {
        return Err(ScoreError::Validation(format!(
            "violated 1/delta_h - beta (M - k) < 0: got {slope}; probing never pays off"
        )));
    }
    let c0 = m + correct_intercept * (k - m);
    let c1 = -slope;
    let d_max = if correct_slope > 0.0 {
        (1.0 - correct_intercept) / correct_slope
    } else {
        0.0
    };
    Ok(UisCurve {
        probe_gain,
        correct_intercept,
        correct_slope,
        plan_steps,
        waste_steps,
        c0,
        c1,
        d_max,
    })
}

impl UisCurve {
    pub fn a_of_d(&self, d: f64) -> Result<f64, ScoreError> {
        if !(0.0..=self.d_max + 1e-12).contains(&d) {
            return Err(ScoreError::Validation(format!(
                "depth {d} outside [0, {}]",
                self.d_max
            )));
        }
        Ok(self.c0 - self.c1 * d)
    }

    pub fn s_of_d(&self, d: f64) -> Result<f64, ScoreError> {
        Ok(1.0 / self.a_of_d(d)?)
    }

    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        assert!(points >= 2);
        (0..points)
            .map(|i| {
                let d = self.d_max * i as f64 / (points - 1) as f64;
                (d, self.s_of_d(d).expect("domain point"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorLoss {
    pub exact_loss: f64,
    pub approx_loss: f64,
    pub relative_error: f64,
}

/// Efficiency loss of exploring with probability 1 - epsilon instead of 1,
/// exactly (`1 - (A*/A(1-eps))^2` with `A* = 1 + k`) and to first order
/// (`2 c1 (eps ln 2) / A*`).
pub fn taylor_loss_check(curve: &EstarCurve, epsilon: f64) -> Result<TaylorLoss, ScoreError> {
    if !(0.0..=0.01).contains(&epsilon) {
        return Err(ScoreError::Validation(format!(
            "epsilon {epsilon} outside [0, 0.01]"
        )));
    }
    if epsilon == 0.0 {
        return Ok(TaylorLoss {
            exact_loss: 0.0,
            approx_loss: 0.0,
            relative_error: 0.0,
        });
    }
    let a_star = 1.0 + curve.plan_steps as f64;
    let a = curve.a_of_p(1.0 - epsilon)?;
    let ratio = a_star / a;
    let exact_loss = 1.0 - ratio * ratio;
    let approx_loss = 2.0 * curve.c1 * (epsilon * LN_2) / a_star;
    let relative_error = (exact_loss - approx_loss).abs() / exact_loss.abs();
    Ok(TaylorLoss {
        exact_loss,
        approx_loss,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concrete() -> EstarCurve {
        estar_curve(5, 100).unwrap()
    }

    #[test]
    fn concrete_instance_coefficients() {
        let curve = concrete();
        assert!((curve.c0 - 52.5).abs() < 1e-12);
        assert!((curve.c1 - 93.0 / (2.0 * LN_2)).abs() < 1e-12);
        assert!((curve.a_of_p(1.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((curve.a_of_p(0.0).unwrap() - 52.5).abs() < 1e-12);
        assert!((curve.a_of_p(0.5).unwrap() - 29.25).abs() < 1e-12);
    }

    #[test]
    fn speed_endpoints_cross_check_action_counts() {
        let curve = concrete();
        assert!((curve.s_of_d(LN_2).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((curve.s_of_d(0.0).unwrap() - 1.0 / 52.5).abs() < 1e-12);
        // Depth parametrization agrees with the probability parametrization.
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let via_p = curve.a_of_p(p).unwrap();
            let via_d = curve.a_of_d(p * LN_2).unwrap();
            assert!((via_p - via_d).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_requires_dominant_waste() {
        assert!(estar_curve(5, 7).is_err());
        assert!(estar_curve(5, 8).is_ok());
        assert!(estar_curve(0, 100).is_err());
    }

    #[test]
    fn toy_curve_is_certified_convex() {
        let cert = convexity_certificate(&concrete().sample(101)).unwrap();
        assert!(cert.convex);
        assert!(cert.min_second_difference > 0.0);
    }

    #[test]
    fn affine_and_concave_controls_fail() {
        let line: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 2.0 + 3.0 * i as f64)).collect();
        let cert = convexity_certificate(&line).unwrap();
        assert!(!cert.convex);
        assert!(cert.min_second_difference.abs() < 1e-9);

        let concave: Vec<(f64, f64)> =
            (0..50).map(|i| (i as f64, (i as f64 + 1.0).sqrt())).collect();
        let cert = convexity_certificate(&concave).unwrap();
        assert!(!cert.convex);
        assert!(cert.min_second_difference < 0.0);
    }

    #[test]
    fn certificate_validates_spacing() {
        assert!(convexity_certificate(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(convexity_certificate(&[(0.0, 1.0), (1.0, 2.0), (3.0, 4.0)]).is_err());
        assert!(convexity_certificate(&[(0.0, 1.0), (0.0, 2.0), (0.0, 4.0)]).is_err());
    }

    #[test]
    fn uis_with_toy_parameters_reproduces_the_toy_curve() {
        // delta-h = ln 2, alpha = 1/2, beta = 1/(2 ln 2) recovers c0, c1.
        let toy = concrete();
        let uis = uis_curve(LN_2, 0.5, 1.0 / (2.0 * LN_2), 5, 100).unwrap();
        assert!((uis.c0 - toy.c0).abs() < 1e-9);
        assert!((uis.c1 - toy.c1).abs() < 1e-9);
        assert!((uis.d_max - LN_2).abs() < 1e-12);
    }

    #[test]
    fn uis_rejects_unprofitable_probing() {
        let err = uis_curve(LN_2, 0.5, 0.0, 5, 100).unwrap_err();
        assert!(err.to_string().contains("1/delta_h - beta (M - k) < 0"));
    }

    #[test]
    fn random_valid_uis_curves_are_convex() {
        use rand::Rng;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2024);
        for _ in 0..100 {
            let k: u32 = rng.random_range(1..10);
            let m: u32 = k + rng.random_range(3..200);
            let dh: f64 = rng.random_range(0.05..2.0);
            let alpha: f64 = rng.random_range(0.0..0.9);
            let beta_min = 1.0 / (dh * (m - k) as f64);
            let beta = beta_min * rng.random_range(1.1..5.0);
            let curve = uis_curve(dh, alpha, beta, k, m).expect("valid draw");
            let cert = convexity_certificate(&curve.sample(64)).unwrap();
            assert!(cert.convex, "draw k={k} m={m} dh={dh} a={alpha} b={beta}");
        }
    }

    #[test]
    fn taylor_loss_shrinks_linearly() {
        let curve = concrete();
        let loss3 = taylor_loss_check(&curve, 1e-3).unwrap();
        assert!(loss3.relative_error < 0.02, "{}", loss3.relative_error);
        let loss4 = taylor_loss_check(&curve, 1e-4).unwrap();
        assert!(loss4.relative_error < 0.002, "{}", loss4.relative_error);
        let loss2 = taylor_loss_check(&curve, 1e-2).unwrap();
        assert!(loss2.relative_error > loss3.relative_error);
        assert!(loss3.relative_error > loss4.relative_error);

        let zero = taylor_loss_check(&curve, 0.0).unwrap();
        assert_eq!(zero.exact_loss, 0.0);
        assert_eq!(zero.approx_loss, 0.0);
    }
}
