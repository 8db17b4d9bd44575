//! Non-exploratory reference agents.
//!
//! These baselines track no belief; trace steps carry the environment's
//! prior entropy unchanged, so their measured exploration depth is zero.

use crate::action::{Action, Move};
use crate::agent::AgentError;
use crate::belief;
use crate::env::{EnvError, Environment, Status};
use crate::trace::{EpisodeTrace, Outcome, Phase, TraceStep};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn outcome_of(env: &Environment) -> Outcome {
    match (env.status(), env.crash_win()) {
        (Status::Solved, true) => Outcome::CrashWin,
        (Status::Solved, false) => Outcome::Solved,
        _ => Outcome::Unsolved,
    }
}

/// Uniformly random legal actions until the episode ends or `cap` actions
/// have been taken. Cell selection draws uniformly random in-bounds
/// coordinates. Deterministic per seed.
pub fn random_agent(env: &mut Environment, seed: u64, cap: u32) -> Result<EpisodeTrace, AgentError> {
    if env.action_count() != 0 || env.is_terminal() {
        return Err(AgentError::Env(EnvError::Protocol(
            "random_agent requires a freshly reset environment".into(),
        )));
    }
    let spec = env.spec().clone();
    let entropy = belief::init_belief(&spec)?.entropy();
    let (w, h) = spec.grid_dims;
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut steps = Vec::new();
    while !env.is_terminal() && (steps.len() as u32) < cap {
        let action = match rng.random_range(0..7u32) {
            0 => Action::Move(Move::Up),
            1 => Action::Move(Move::Down),
            2 => Action::Move(Move::Left),
            3 => Action::Move(Move::Right),
            4 => Action::Move(Move::Space),
            5 => Action::Select {
                x: rng.random_range(0..w as u32) as u16,
                y: rng.random_range(0..h as u32) as u16,
            },
            _ => Action::Undo,
        };
        env.step(&action)?;
        steps.push(TraceStep {
            phase: Phase::Explore,
            action,
            obs_digest: env.observe().digest(),
            entropy_nats: entropy,
        });
    }
    let outcome = outcome_of(env);
    Ok(EpisodeTrace::new(
        spec.id.clone(),
        env.seed(),
        format!("random:seed={seed},cap={cap}"),
        entropy,
        steps,
        vec![],
        outcome,
    ))
}

/// Emit the same action until the episode ends or `n_max` attempts are
/// spent.
pub fn repeated_action_agent(
    env: &mut Environment,
    action: &Action,
    n_max: u32,
) -> Result<EpisodeTrace, AgentError> {
    if env.action_count() != 0 || env.is_terminal() {
        return Err(AgentError::Env(EnvError::Protocol(
            "repeated_action_agent requires a freshly reset environment".into(),
        )));
    }
    if n_max < 1 {
        return Err(AgentError::Config("n_max must be at least 1".into()));
    }
    let spec = env.spec().clone();
    let entropy = belief::init_belief(&spec)?.entropy();
    let mut steps = Vec::new();
    while !env.is_terminal() && (steps.len() as u32) < n_max {
        env.step(action)?;
        steps.push(TraceStep {
            phase: Phase::Plan,
            action: action.clone(),
            obs_digest: env.observe().digest(),
            entropy_nats: entropy,
        });
    }
    let outcome = outcome_of(env);
    Ok(EpisodeTrace::new(
        spec.id.clone(),
        env.seed(),
        format!("repeat:{action},n_max={n_max}"),
        entropy,
        steps,
        vec![],
        outcome,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionKey;
    use crate::env::rules::Rule;
    use crate::env::{EnvironmentSpec, TaxonomyParams};

    fn repeated_spec(count: u32) -> EnvironmentSpec {
        EnvironmentSpec::taxonomy(
            format!("rep-{count}"),
            TaxonomyParams {
                rule: Rule::Repeated {
                    key: ActionKey::Up,
                    count,
                },
                decoys: vec![],
                seed: 1,
            },
        )
        .unwrap()
    }

    fn gated_center_spec() -> EnvironmentSpec {
        EnvironmentSpec::taxonomy(
            "gated",
            TaxonomyParams {
                rule: Rule::ProbeGated {
                    coords: Some((32, 32)),
                },
                decoys: vec![],
                seed: 3,
            },
        )
        .unwrap()
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let spec = gated_center_spec();
        let run = |seed| {
            let mut env = Environment::reset(&spec, 0).unwrap();
            random_agent(&mut env, seed, 50).unwrap()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42).steps, run(43).steps);
    }

    #[test]
    fn random_rarely_hits_a_gated_center_select() {
        // Winning needs a probe, then a select at one specific cell of 4096.
        let spec = gated_center_spec();
        let mut env = Environment::reset(&spec, 0).unwrap();
        let trace = random_agent(&mut env, 42, 200).unwrap();
        assert_eq!(trace.outcome, Outcome::Unsolved);
    }

    #[test]
    fn random_wins_blind_any_action_games_immediately() {
        // Every action kind wins; the first random action ends it.
        let spec = EnvironmentSpec::taxonomy(
            "b",
            TaxonomyParams {
                rule: Rule::Blind1 { win: ActionKey::Up },
                decoys: vec![],
                seed: 0,
            },
        )
        .unwrap();
        let mut solved = 0;
        for seed in 0..40 {
            let mut env = Environment::reset(&spec, 0).unwrap();
            let trace = random_agent(&mut env, seed, 200).unwrap();
            if trace.outcome == Outcome::Solved {
                solved += 1;
            }
        }
        assert!(solved > 0);
    }

    #[test]
    fn repeated_agent_solves_at_exactly_the_planted_count() {
        let spec = repeated_spec(50);
        let mut env = Environment::reset(&spec, 0).unwrap();
        let trace = repeated_action_agent(&mut env, &Action::Move(Move::Up), 200).unwrap();
        assert_eq!(trace.outcome, Outcome::Solved);
        assert_eq!(trace.action_count, 50);
    }

    #[test]
    fn repeated_agent_under_budget_fails() {
        let spec = repeated_spec(200);
        let mut env = Environment::reset(&spec, 0).unwrap();
        let trace = repeated_action_agent(&mut env, &Action::Move(Move::Up), 100).unwrap();
        assert_eq!(trace.outcome, Outcome::Unsolved);
        assert_eq!(trace.action_count, 100);

        let mut env = Environment::reset(&spec, 0).unwrap();
        let trace = repeated_action_agent(&mut env, &Action::Move(Move::Up), 200).unwrap();
        assert_eq!(trace.outcome, Outcome::Solved);
        assert_eq!(trace.action_count, 200);
    }

    #[test]
    fn wrong_action_never_solves() {
        let spec = repeated_spec(10);
        let mut env = Environment::reset(&spec, 0).unwrap();
        let trace = repeated_action_agent(&mut env, &Action::Move(Move::Down), 50).unwrap();
        assert_eq!(trace.outcome, Outcome::Unsolved);
        assert_eq!(trace.action_count, 50);
    }
}
