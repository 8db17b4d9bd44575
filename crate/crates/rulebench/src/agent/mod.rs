//! The three-phase explore/verify/plan agent.
//!
//! An episode runs as a state machine over belief entropy:
//!
//! - **Explore** while entropy exceeds the commitment threshold, up to the
//!   exploration budget, picking the action with maximum expected
//!   information gain (oracle-bayes source) or a scripted first-move bias.
//!   Probes already tried in an identical state are replaced by the
//!   next-best candidate (redundant-probe detection).
//! - **Verify** the MAP hypothesis with up to `verify_steps` actions chosen
//!   to maximize the probability of distinguishing it from the rest of the
//!   support; a falsifying observation zeroes it and re-enters explore.
//! - **Plan**: execute the shortest winning sequence under the MAP
//!   hypothesis, aborting back to explore on any mismatching observation.
//!
//! With a zero budget and entropy still above threshold, planning refuses
//! to act and the trace ends unsolved with zero actions.

pub mod memory;
pub mod shadow;

pub use memory::{EpisodeMemory, MEMORY_CAPACITY};
pub use shadow::ShadowWorld;

use crate::action::Action;
use crate::belief::{self, Belief, BeliefError, HypothesisId};
use crate::env::{oracle_baseline, EnvError, Environment, SpecError, Status};
use crate::trace::{EpisodeTrace, Outcome, Phase, TraceEvent, TraceStep};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent config: {0}")]
    Config(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    Fixed(u32),
    Adaptive,
    AdaptiveSmall,
}

/// Exploration budget for a game whose baseline action count is `human`.
///
/// Adaptive clamps 40% of the baseline into [5, 30]; the small variant
/// clamps 20% into [2, 5]; fixed is taken as given.
pub fn budget(human: u32, mode: BudgetMode) -> u32 {
    assert!(human >= 1, "baseline action count must be >= 1");
    match mode {
        BudgetMode::Fixed(b) => b,
        BudgetMode::Adaptive => (4 * human / 10).clamp(5, 30),
        BudgetMode::AdaptiveSmall => (2 * human / 10).clamp(2, 5),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisSource {
    /// Exact Bayes plus expected-information-gain action choice.
    OracleBayes,
    /// Always leads with the first directional action while evidence is
    /// weak, reproducing a biased action-selection failure mode.
    ScriptedBias,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub budget_mode: BudgetMode,
    /// Commitment threshold in nats.
    pub theta: f64,
    /// Maximum verification actions per commit (1..=3).
    pub verify_steps: u32,
    pub action_cap: u32,
    pub source: HypothesisSource,
    /// Force cell-select as the first explore action while the belief is
    /// still at its prior.
    pub action6_first_override: bool,
    pub seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            budget_mode: BudgetMode::Adaptive,
            theta: 0.1,
            verify_steps: 2,
            action_cap: 200,
            source: HypothesisSource::OracleBayes,
            action6_first_override: false,
            seed: 0,
        }
    }
}

impl AgentConfig {
    pub fn fixed(budget: u32) -> Self {
        AgentConfig {
            budget_mode: BudgetMode::Fixed(budget),
            ..AgentConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(format!("theta {} must be a nonnegative number", self.theta));
        }
        if !(1..=3).contains(&self.verify_steps) {
            return Err(format!("verify_steps {} outside 1..=3", self.verify_steps));
        }
        if self.action_cap == 0 {
            return Err("action_cap must be positive".into());
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        crate::env::short_digest(&serde_json::to_vec(self).expect("config serializes"))
    }

    pub fn label(&self) -> String {
        let budget = match self.budget_mode {
            BudgetMode::Fixed(b) => format!("b{b}"),
            BudgetMode::Adaptive => "adaptive".to_string(),
            BudgetMode::AdaptiveSmall => "adaptive-small".to_string(),
        };
        let source = match self.source {
            HypothesisSource::OracleBayes => "evp",
            HypothesisSource::ScriptedBias => "evp-scripted",
        };
        let override_tag = if self.action6_first_override { "+sel" } else { "" };
        format!("{source}-{budget}{override_tag}")
    }
}

/// Play one episode on a freshly reset environment.
pub fn run_episode(env: &mut Environment, config: &AgentConfig) -> Result<EpisodeTrace, AgentError> {
    config.validate().map_err(AgentError::Config)?;
    if env.action_count() != 0 || env.is_terminal() {
        return Err(AgentError::Env(EnvError::Protocol(
            "run_episode requires a freshly reset environment".into(),
        )));
    }
    let spec = env.spec().clone();
    let human = oracle_baseline(&spec)?;
    let b_max = budget(human, config.budget_mode);
    let cap = config.action_cap.min(spec.action_cap);

    let belief = belief::init_belief(&spec)?;
    let prior = belief.clone();
    let initial_entropy = belief.entropy();
    // Shadows share the real episode's seed so decoration streams align.
    let shadows = ShadowWorld::new(&spec, env.seed())?;
    let mut runner = Runner {
        env,
        belief,
        shadows,
        memory: EpisodeMemory::default(),
        steps: Vec::new(),
        events: Vec::new(),
        cap,
    };

    let candidates: Vec<Action> = Action::canonical_set(spec.grid_dims).to_vec();
    let mut explore_used = 0u32;

    let outcome = 'episode: loop {
        // EXPLORE: reduce entropy until the gate opens or the budget ends.
        while runner.belief.entropy() > config.theta {
            if explore_used >= b_max || runner.at_cap() {
                // Planning refuses to act above the threshold.
                break 'episode Outcome::Unsolved;
            }
            let first = runner.steps.is_empty();
            let action = runner.choose_explore_action(config, &candidates, &prior, first)?;
            let status = runner.execute(Phase::Explore, &action)?.status;
            explore_used += 1;
            match status {
                Status::Solved => break 'episode Outcome::Solved,
                Status::Failed => break 'episode Outcome::Unsolved,
                Status::NotFinished => {}
            }
        }

        // VERIFY: try to falsify the MAP hypothesis before committing.
        let mut falsified = false;
        let mut verify_used = 0u32;
        while verify_used < config.verify_steps {
            let (map_h, map_w) = {
                let (h, w) = runner.belief.map_hypothesis();
                (h.clone(), w)
            };
            if 1.0 - map_w <= 1e-12 {
                break; // point mass: nothing left to distinguish
            }
            let Some(action) = runner.best_verify_action(&candidates, &map_h) else {
                break; // no action separates the MAP from the rest
            };
            if runner.at_cap() {
                break 'episode Outcome::Unsolved;
            }
            let expected = runner.shadows.predict_key(&map_h, &action);
            let result = runner.execute(Phase::Verify, &action)?;
            verify_used += 1;
            match result.status {
                Status::Solved => break 'episode Outcome::Solved,
                Status::Failed => break 'episode Outcome::Unsolved,
                Status::NotFinished => {}
            }
            if result.observed_key != expected {
                runner.events.push(TraceEvent::Falsified {
                    step: runner.steps.len() as u32 - 1,
                    hypothesis: map_h,
                });
                falsified = true;
                break;
            }
        }
        if falsified {
            continue 'episode;
        }

        // PLAN: commit to the MAP hypothesis's shortest winning sequence.
        if runner.belief.entropy() > config.theta {
            break 'episode Outcome::Unsolved;
        }
        let map_h = runner.belief.map_hypothesis().0.clone();
        let plan = runner.shadows.plan_for(&map_h);
        if plan.is_empty() {
            break 'episode Outcome::Unsolved;
        }
        let mut surprised = false;
        for action in plan {
            if runner.at_cap() {
                break 'episode Outcome::Unsolved;
            }
            let expected = runner.shadows.predict_key(&map_h, &action);
            let result = runner.execute(Phase::Plan, &action)?;
            match result.status {
                Status::Solved => break 'episode Outcome::Solved,
                Status::Failed => break 'episode Outcome::Unsolved,
                Status::NotFinished => {}
            }
            if result.observed_key != expected {
                runner.events.push(TraceEvent::Surprise {
                    step: runner.steps.len() as u32 - 1,
                });
                surprised = true;
                break;
            }
        }
        if !surprised {
            // The plan ran out without the predicted win; treat as surprise.
            runner.events.push(TraceEvent::Surprise {
                step: runner.steps.len().saturating_sub(1) as u32,
            });
        }
    };

    Ok(EpisodeTrace::new(
        spec.id.clone(),
        runner.env.seed(),
        config.digest(),
        initial_entropy,
        runner.steps,
        runner.events,
        outcome,
    ))
}

struct ExecResult {
    observed_key: String,
    status: Status,
}

struct Runner<'a> {
    env: &'a mut Environment,
    belief: Belief,
    shadows: ShadowWorld,
    memory: EpisodeMemory,
    steps: Vec<TraceStep>,
    events: Vec<TraceEvent>,
    cap: u32,
}

impl Runner<'_> {
    fn at_cap(&self) -> bool {
        self.env.action_count() >= self.cap
    }

    /// Step the real environment, update the belief from exact shadow
    /// likelihoods, advance the shadows, and record the trace step.
    fn execute(&mut self, phase: Phase, action: &Action) -> Result<ExecResult, AgentError> {
        let digest_before = self.env.state_digest();
        let predictions = self.shadows.prediction_keys(action);
        let info = self.env.step(action)?;
        let observed_key = info.prediction().key();
        let likelihoods = predictions
            .iter()
            .map(|(h, key)| (h.clone(), if *key == observed_key { 1.0 } else { 0.0 }))
            .collect();
        self.belief = self.belief.update(&likelihoods)?;
        self.memory.record(digest_before, action.clone());
        self.shadows.advance(action);
        self.steps.push(TraceStep {
            phase,
            action: action.clone(),
            obs_digest: self.env.observe().digest(),
            entropy_nats: self.belief.entropy(),
        });
        Ok(ExecResult {
            observed_key,
            status: info.status,
        })
    }

    fn choose_explore_action(
        &self,
        config: &AgentConfig,
        candidates: &[Action],
        prior: &Belief,
        first: bool,
    ) -> Result<Action, AgentError> {
        if config.action6_first_override && first && self.belief == *prior {
            let (cx, cy) = Action::center(self.env.spec().grid_dims);
            return Ok(Action::Select { x: cx, y: cy });
        }
        let ranked: Vec<Action> = match config.source {
            HypothesisSource::ScriptedBias => candidates.to_vec(),
            HypothesisSource::OracleBayes => {
                let mut scored: Vec<(f64, &Action)> = Vec::with_capacity(candidates.len());
                for action in candidates {
                    let predictions = self.shadows.prediction_keys(action);
                    let gain =
                        belief::expected_info_gain_deterministic(&self.belief, &predictions)?;
                    scored.push((gain, action));
                }
                // Stable sort keeps canonical action order among ties.
                scored.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite gains"));
                scored.into_iter().map(|(_, a)| a.clone()).collect()
            }
        };
        let digest = self.env.state_digest();
        for action in &ranked {
            if !self.memory.lookup(&digest, action) {
                return Ok(action.clone());
            }
        }
        Ok(ranked[0].clone())
    }

    /// Action maximizing the probability mass of hypotheses that predict a
    /// different observation than the MAP; ties break toward the lowest
    /// action index. Returns none when no action separates anything.
    fn best_verify_action(&self, candidates: &[Action], map_h: &HypothesisId) -> Option<Action> {
        let mut best: Option<(f64, &Action)> = None;
        for action in candidates {
            let map_key = self.shadows.predict_key(map_h, action);
            let p_diff: f64 = self
                .belief
                .support()
                .filter(|(h, _)| *h != map_h)
                .map(|(h, w)| {
                    if self.shadows.predict_key(h, action) != map_key {
                        w
                    } else {
                        0.0
                    }
                })
                .sum();
            if best.map_or(true, |(bp, _)| p_diff > bp) {
                best = Some((p_diff, action));
            }
        }
        match best {
            Some((p, action)) if p > 0.0 => Some(action.clone()),
            _ => None,
        }
    }
}
