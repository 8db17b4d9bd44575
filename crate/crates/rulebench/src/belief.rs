//! Exact Bayesian belief tracking over a declared hypothesis family.
//!
//! A [`Belief`] is a probability map over hypothesis identifiers. Updates
//! are exact Bayes: posterior mass is prior times likelihood, renormalized.
//! Hypotheses driven to zero stay in the map as explicit zeros until
//! [`Belief::compact`] is called, so callers can report which rules an
//! observation eliminated. All entropies are natural-log (nats).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Tolerance for "weights sum to one" checks.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BeliefError {
    #[error("observation inconsistent with every hypothesis in support")]
    Contradiction,
    #[error("invalid belief: {0}")]
    Validation(String),
}

/// Identifier of one hypothesis in an environment's declared family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HypothesisId(pub String);

impl HypothesisId {
    pub fn new(s: impl Into<String>) -> Self {
        HypothesisId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for HypothesisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for HypothesisId {
    fn from(s: &str) -> Self {
        HypothesisId(s.to_string())
    }
}

/// Probability map over hypotheses. Immutable: updates return new values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    weights: BTreeMap<HypothesisId, f64>,
}

impl Belief {
    /// Build a belief from (hypothesis, weight) pairs. Weights must be
    /// nonnegative and sum to one within [`WEIGHT_SUM_TOL`].
    pub fn from_prior<I>(pairs: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = (HypothesisId, f64)>,
    {
        let weights: BTreeMap<HypothesisId, f64> = pairs.into_iter().collect();
        if weights.is_empty() {
            return Err(BeliefError::Validation("empty hypothesis family".into()));
        }
        let mut sum = 0.0;
        for (h, w) in &weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(BeliefError::Validation(format!(
                    "weight of {h} is {w}, expected a nonnegative finite value"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(BeliefError::Validation(format!(
                "weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        Ok(Belief { weights })
    }

    pub fn uniform<I>(ids: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = HypothesisId>,
    {
        let ids: Vec<_> = ids.into_iter().collect();
        let w = 1.0 / ids.len().max(1) as f64;
        Belief::from_prior(ids.into_iter().map(|h| (h, w)))
    }

    pub fn weight(&self, h: &HypothesisId) -> f64 {
        self.weights.get(h).copied().unwrap_or(0.0)
    }

    /// All tracked hypotheses, including explicit zeros.
    pub fn weights(&self) -> impl Iterator<Item = (&HypothesisId, f64)> {
        self.weights.iter().map(|(h, w)| (h, *w))
    }

    /// Hypotheses with strictly positive weight.
    pub fn support(&self) -> impl Iterator<Item = (&HypothesisId, f64)> {
        self.weights().filter(|(_, w)| *w > 0.0)
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    /// Shannon entropy in nats over the positive weights; 0 for a point mass.
    pub fn entropy(&self) -> f64 {
        -self
            .support()
            .map(|(_, w)| w * w.ln())
            .sum::<f64>()
    }

    /// Maximum a posteriori hypothesis; ties break toward the smallest id.
    pub fn map_hypothesis(&self) -> (&HypothesisId, f64) {
        let mut best: Option<(&HypothesisId, f64)> = None;
        for (h, w) in self.weights() {
            match best {
                Some((_, bw)) if w <= bw => {}
                _ => best = Some((h, w)),
            }
        }
        best.expect("a belief always has at least one hypothesis")
    }

    pub fn is_point_mass(&self) -> bool {
        self.support_size() == 1
    }

    /// Exact Bayes update. `likelihoods` maps each hypothesis to the
    /// probability of the observed transition under that hypothesis; a
    /// missing entry counts as zero. Hypotheses with zero posterior mass
    /// stay in the map as explicit zeros.
    pub fn update(
        &self,
        likelihoods: &BTreeMap<HypothesisId, f64>,
    ) -> Result<Belief, BeliefError> {
        let mut posterior = BTreeMap::new();
        let mut total = 0.0;
        for (h, w) in self.weights() {
            let lik = likelihoods.get(h).copied().unwrap_or(0.0);
            if !(0.0..=f64::INFINITY).contains(&lik) || !lik.is_finite() {
                return Err(BeliefError::Validation(format!(
                    "likelihood of {h} is {lik}, expected a nonnegative finite value"
                )));
            }
            let mass = w * lik;
            total += mass;
            posterior.insert(h.clone(), mass);
        }
        if total <= 0.0 {
            return Err(BeliefError::Contradiction);
        }
        for w in posterior.values_mut() {
            *w /= total;
        }
        Ok(Belief { weights: posterior })
    }

    /// Force one hypothesis to zero and renormalize the rest. Used to
    /// record a falsification that is dictated rather than observed.
    pub fn zero_out(&self, h: &HypothesisId) -> Result<Belief, BeliefError> {
        let mut likelihoods: BTreeMap<HypothesisId, f64> =
            self.weights.keys().map(|k| (k.clone(), 1.0)).collect();
        likelihoods.insert(h.clone(), 0.0);
        self.update(&likelihoods)
    }

    /// Hypotheses that have been eliminated (explicit zero weight).
    pub fn eliminated(&self) -> Vec<&HypothesisId> {
        self.weights()
            .filter(|(_, w)| *w == 0.0)
            .map(|(h, _)| h)
            .collect()
    }

    /// Drop zero-weight hypotheses from the map.
    pub fn compact(&self) -> Belief {
        Belief {
            weights: self
                .weights
                .iter()
                .filter(|(_, w)| **w > 0.0)
                .map(|(h, w)| (h.clone(), *w))
                .collect(),
        }
    }
}

/// Belief initialized to an environment's declared prior.
pub fn init_belief(spec: &crate::env::EnvironmentSpec) -> Result<Belief, BeliefError> {
    Belief::from_prior(spec.hypothesis_space().iter().cloned())
}

/// Per-hypothesis distribution over finitely many observation outcomes of
/// one candidate action. Outcomes are opaque keys; two hypotheses that map
/// to the same key are indistinguishable under that action.
pub type OutcomeModel = BTreeMap<HypothesisId, Vec<(String, f64)>>;

/// Expected entropy reduction of acting under the model:
/// `H(b) − Σ_o P(o) · H(b | o)`. Nonnegative up to floating-point error.
pub fn expected_info_gain(belief: &Belief, model: &OutcomeModel) -> Result<f64, BeliefError> {
    // Marginal probability of each outcome, and per-outcome posterior mass.
    let mut marginal: BTreeMap<&str, f64> = BTreeMap::new();
    let mut posterior_mass: BTreeMap<&str, BTreeMap<&HypothesisId, f64>> = BTreeMap::new();
    for (h, w) in belief.support() {
        let outcomes = model.get(h).ok_or_else(|| {
            BeliefError::Validation(format!("model is missing hypothesis {h} in support"))
        })?;
        for (key, p) in outcomes {
            if *p < 0.0 || !p.is_finite() {
                return Err(BeliefError::Validation(format!(
                    "outcome probability {p} under {h} is invalid"
                )));
            }
            *marginal.entry(key.as_str()).or_insert(0.0) += w * p;
            *posterior_mass
                .entry(key.as_str())
                .or_default()
                .entry(h)
                .or_insert(0.0) += w * p;
        }
    }
    let prior_entropy = belief.entropy();
    let mut expected_posterior_entropy = 0.0;
    for (key, p_o) in &marginal {
        if *p_o <= 0.0 {
            continue;
        }
        let masses = &posterior_mass[key];
        let entropy: f64 = -masses
            .values()
            .filter(|m| **m > 0.0)
            .map(|m| {
                let w = m / p_o;
                w * w.ln()
            })
            .sum::<f64>();
        expected_posterior_entropy += p_o * entropy;
    }
    Ok(prior_entropy - expected_posterior_entropy)
}

/// Convenience for deterministic dynamics: each hypothesis predicts exactly
/// one outcome key.
pub fn expected_info_gain_deterministic(
    belief: &Belief,
    predictions: &BTreeMap<HypothesisId, String>,
) -> Result<f64, BeliefError> {
    let model: OutcomeModel = predictions
        .iter()
        .map(|(h, key)| (h.clone(), vec![(key.clone(), 1.0)]))
        .collect();
    expected_info_gain(belief, &model)
}
