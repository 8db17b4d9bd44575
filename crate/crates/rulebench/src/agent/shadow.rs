//! Per-hypothesis shadow simulations.
//!
//! The agent never sees an environment's hidden hypothesis. What it does
//! know is the declared family: for each candidate hypothesis it runs a
//! forced-hypothesis copy of the environment in lockstep with the real
//! episode. Predictions from these shadows drive expected-information-gain
//! scoring, exact likelihoods (a hypothesis predicts the observation or it
//! doesn't), verification target selection, and plan synthesis.

use crate::action::Action;
use crate::belief::HypothesisId;
use crate::env::{Environment, EnvironmentSpec, Prediction, SpecError};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ShadowWorld {
    shadows: Vec<(HypothesisId, Environment)>,
}

impl ShadowWorld {
    pub fn new(spec: &EnvironmentSpec, seed: u64) -> Result<Self, SpecError> {
        let shadows = spec
            .hypothesis_space()
            .iter()
            .map(|(h, _)| {
                Environment::with_hypothesis(spec, seed, h.clone()).map(|env| (h.clone(), env))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ShadowWorld { shadows })
    }

    fn shadow(&self, h: &HypothesisId) -> Option<&Environment> {
        self.shadows
            .iter()
            .find(|(id, _)| id == h)
            .map(|(_, env)| env)
    }

    /// What hypothesis `h` predicts the next step yields.
    pub fn predict(&self, h: &HypothesisId, action: &Action) -> Prediction {
        match self.shadow(h) {
            Some(env) => env.predict(action),
            None => Prediction::Rejected,
        }
    }

    pub fn predict_key(&self, h: &HypothesisId, action: &Action) -> String {
        self.predict(h, action).key()
    }

    /// Prediction keys for every declared hypothesis.
    pub fn prediction_keys(&self, action: &Action) -> BTreeMap<HypothesisId, String> {
        self.shadows
            .iter()
            .map(|(h, env)| (h.clone(), env.predict(action).key()))
            .collect()
    }

    /// Advance every live shadow with the executed action. Shadows whose
    /// episode already diverged to a terminal state stay put; their future
    /// predictions read `finished`, which keeps them inconsistent.
    pub fn advance(&mut self, action: &Action) {
        for (_, env) in &mut self.shadows {
            if env.is_terminal() {
                continue;
            }
            let _ = env.step(action);
        }
    }

    /// Shortest winning continuation assuming `h` is the truth.
    pub fn plan_for(&self, h: &HypothesisId) -> Vec<Action> {
        self.shadow(h).map(|env| env.winning_plan()).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Move;
    use crate::env::Status;

    #[test]
    fn estar_shadows_diverge_on_the_probe() {
        let spec = EnvironmentSpec::toy_estar("e", 5, 100).unwrap();
        let shadows = ShadowWorld::new(&spec, 0).unwrap();
        let probe = Action::Move(Move::Space);
        let keys = shadows.prediction_keys(&probe);
        assert_ne!(keys[&HypothesisId::from("h1")], keys[&HypothesisId::from("h2")]);

        // Route steps are indistinguishable before termination.
        let keys = shadows.prediction_keys(&Action::Move(Move::Up));
        assert_eq!(keys[&HypothesisId::from("h1")], keys[&HypothesisId::from("h2")]);
    }

    #[test]
    fn shadows_follow_the_real_episode() {
        let spec = EnvironmentSpec::toy_estar("e", 2, 10).unwrap();
        let mut real = Environment::with_hypothesis(&spec, 0, HypothesisId::from("h1")).unwrap();
        let mut shadows = ShadowWorld::new(&spec, 0).unwrap();
        for action in [Action::Move(Move::Space), Action::Move(Move::Up)] {
            let predicted = shadows.predict_key(&HypothesisId::from("h1"), &action);
            let info = real.step(&action).unwrap();
            assert_eq!(predicted, info.prediction().key());
            shadows.advance(&action);
        }
        // One more true-route step solves under h1.
        assert_eq!(
            shadows.predict(&HypothesisId::from("h1"), &Action::Move(Move::Up)),
            Prediction::Obs {
                status: Status::Solved,
                signal: Some("rule=h1".into()),
                progress: 0
            }
        );
    }
}
