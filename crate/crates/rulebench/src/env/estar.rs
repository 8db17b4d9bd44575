//! The two-hypothesis toy world.
//!
//! One probe (`space`) perfectly reveals the hidden rule. Each hypothesis
//! owns a plan route: `up` steps toward the h1 goal, `down` toward h2.
//! Completing `plan_steps` steps on the true route solves the episode;
//! accumulating `waste_steps` steps on the wrong route fails it. Route
//! observations are indistinguishable until termination, so the only
//! informative action is the probe.

use crate::action::{Action, Move};
use crate::env::spec::{EnvironmentSpec, EstarParams, FamilyParams, SpecError};
use crate::env::StepOutcome;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstarState {
    pub revealed: bool,
    pub correct_progress: u32,
    pub wrong_steps: u32,
}

impl EstarState {
    pub fn new() -> Self {
        EstarState {
            revealed: false,
            correct_progress: 0,
            wrong_steps: 0,
        }
    }

    pub fn step(&mut self, params: &EstarParams, truth_is_h1: bool, action: &Action) -> StepOutcome {
        match action {
            Action::Move(Move::Space) => {
                self.revealed = true;
                StepOutcome::Continue { grid_changed: false }
            }
            Action::Move(Move::Up) => self.route_step(params, truth_is_h1),
            Action::Move(Move::Down) => self.route_step(params, !truth_is_h1),
            // Everything else is an accepted no-op that still costs an action.
            _ => StepOutcome::Continue { grid_changed: false },
        }
    }

    fn route_step(&mut self, params: &EstarParams, on_true_route: bool) -> StepOutcome {
        if on_true_route {
            self.correct_progress += 1;
            if self.correct_progress >= params.plan_steps {
                return StepOutcome::Solved;
            }
        } else {
            self.wrong_steps += 1;
            if self.wrong_steps >= params.waste_steps {
                return StepOutcome::Failed;
            }
        }
        StepOutcome::Continue { grid_changed: false }
    }

    /// Shortest winning continuation under the given hypothesis.
    pub fn plan(&self, params: &EstarParams, truth_is_h1: bool) -> Vec<Action> {
        let route = if truth_is_h1 { Move::Up } else { Move::Down };
        let remaining = params.plan_steps.saturating_sub(self.correct_progress).max(1);
        vec![Action::Move(route); remaining as usize]
    }
}

impl Default for EstarState {
    fn default() -> Self {
        EstarState::new()
    }
}

fn estar_params(spec: &EnvironmentSpec) -> Result<&EstarParams, SpecError> {
    match &spec.family {
        FamilyParams::Estar(p) => Ok(p),
        _ => Err(SpecError::Invalid(format!(
            "expected an estar spec, got family {}",
            spec.family.name()
        ))),
    }
}

/// Closed-form episode simulator for a randomized explore-with-probability
/// `p` policy: with probability `p` the agent pays one probe and then the
/// correct plan (1 + k actions, solved); otherwise it guesses uniformly —
/// correct guesses solve in k actions, wrong guesses fail after M.
pub fn simulate_estar_episode(
    spec: &EnvironmentSpec,
    seed: u64,
    p: f64,
) -> Result<(u32, bool), SpecError> {
    let (count, solved, _) = simulate_estar_episode_full(spec, seed, p)?;
    Ok((count, solved))
}

/// As [`simulate_estar_episode`], also reporting whether the episode
/// explored (for speed/depth bookkeeping).
pub fn simulate_estar_episode_full(
    spec: &EnvironmentSpec,
    seed: u64,
    p: f64,
) -> Result<(u32, bool, bool), SpecError> {
    let params = estar_params(spec)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(SpecError::Invalid(format!(
            "explore probability {p} outside [0, 1]"
        )));
    }
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let explores = rng.random::<f64>() < p;
    if explores {
        return Ok((1 + params.plan_steps, true, true));
    }
    let guessed_right = rng.random::<f64>() < 0.5;
    if guessed_right {
        Ok((params.plan_steps, true, false))
    } else {
        Ok((params.waste_steps, false, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> EnvironmentSpec {
        EnvironmentSpec::toy_estar("e", 5, 100).unwrap()
    }

    #[test]
    fn always_explore_costs_one_plus_k() {
        for seed in 0..20 {
            let (count, solved) = simulate_estar_episode(&spec(), seed, 1.0).unwrap();
            assert_eq!(count, 6);
            assert!(solved);
        }
    }

    #[test]
    fn never_explore_matches_half_half_mixture() {
        // A(0) = (k + M) / 2 = 52.5 for k=5, M=100.
        let n = 20_000;
        let mut total = 0u64;
        for seed in 0..n {
            let (count, _) = simulate_estar_episode(&spec(), seed, 0.0).unwrap();
            assert!(count == 5 || count == 100);
            total += count as u64;
        }
        let mean = total as f64 / n as f64;
        // Standard error of the half/half mixture is 47.5 / sqrt(n).
        let se = 47.5 / (n as f64).sqrt();
        assert!(
            (mean - 52.5).abs() < 3.0 * se,
            "mean {mean} vs 52.5 +- {}",
            3.0 * se
        );
    }

    #[test]
    fn mixed_policy_mean_approaches_formula() {
        // A(0.5) = 0.5 * 6 + 0.5 * 52.5 = 29.25.
        let n = 20_000;
        let mut counts = Vec::with_capacity(n as usize);
        for seed in 0..n {
            let (count, _) = simulate_estar_episode(&spec(), seed, 0.5).unwrap();
            counts.push(count as f64);
        }
        let mean: f64 = counts.iter().sum::<f64>() / n as f64;
        let var: f64 =
            counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - 29.25).abs() < 3.0 * se,
            "mean {mean} vs 29.25 +- {}",
            3.0 * se
        );
    }

    #[test]
    fn same_seed_same_episode() {
        let a = simulate_estar_episode(&spec(), 7, 0.3).unwrap();
        let b = simulate_estar_episode(&spec(), 7, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(simulate_estar_episode(&spec(), 0, 1.5).is_err());
    }
}
