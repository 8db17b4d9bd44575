//! Deterministic, seedable hidden-rule environments.
//!
//! An [`Environment`] owns one episode: reset it from a spec and a seed,
//! drive it with [`Environment::step`], and read observations. The same
//! (spec, seed) always produces the identical episode, and replaying the
//! identical action sequence yields identical observations.
//!
//! The undo action restores the semantic state exactly one accepted step
//! back (stack semantics, bounded history) and itself counts toward the
//! action total. Episodes that reach the spec's action cap without
//! terminating fail.
//!
//! When a spec carries the null-coordinate fault, a cell selection issued
//! without coordinates trips an internal fault that this wrapper converts
//! into a solved status flagged as a crash win; with the fault off, the
//! same probe is rejected as an invalid action.

pub mod estar;
pub mod oracle;
pub mod rules;
pub mod spec;
pub mod taxonomy;
pub mod uis;

pub use estar::{simulate_estar_episode, simulate_estar_episode_full};
pub use oracle::oracle_baseline;
pub use spec::{EnvironmentSpec, EstarParams, FamilyParams, SpecError, TaxonomyParams, UisParams};

use crate::action::Action;
use crate::belief::HypothesisId;
use estar::EstarState;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rules::Rule;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use taxonomy::TaxState;
use thiserror::Error;
use uis::UisState;

/// Bound on the undo history.
const UNDO_DEPTH: usize = 32;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    NotFinished,
    Solved,
    Failed,
}

/// What an agent sees after a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub dims: (u16, u16),
    pub grid: Vec<u8>,
    pub status: Status,
    pub level: u32,
    pub step_index: u32,
    /// Distinguished reveal field: set once a probe has exposed part of
    /// the hidden rule (toy and uniform-information families).
    pub signal: Option<String>,
    /// Visible plan progress (uniform-information family).
    pub progress: u32,
    pub crash_win: bool,
}

impl Observation {
    pub fn digest(&self) -> String {
        short_digest(&serde_json::to_vec(self).expect("observation serializes"))
    }

    pub fn cells_in_range(&self) -> bool {
        self.grid.iter().all(|v| *v < 16)
    }
}

/// Cheap per-step result; the full grid is available via
/// [`Environment::observe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub status: Status,
    pub step_index: u32,
    pub signal: Option<String>,
    pub progress: u32,
    pub grid_changed: bool,
    pub crash_win: bool,
}

impl StepInfo {
    pub fn prediction(&self) -> Prediction {
        Prediction::Obs {
            status: self.status,
            signal: self.signal.clone(),
            progress: self.progress,
        }
    }
}

/// What a hypothesis predicts the next step will look like. Two
/// predictions with equal keys are indistinguishable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    Obs {
        status: Status,
        signal: Option<String>,
        progress: u32,
    },
    /// The action would be rejected.
    Rejected,
    /// The hypothesis says the episode already ended.
    Finished(Status),
}

impl Prediction {
    pub fn key(&self) -> String {
        match self {
            Prediction::Obs {
                status,
                signal,
                progress,
            } => format!(
                "{:?}|{}|{}",
                status,
                signal.as_deref().unwrap_or("-"),
                progress
            ),
            Prediction::Rejected => "rejected".to_string(),
            Prediction::Finished(s) => format!("finished|{s:?}"),
        }
    }
}

/// Outcome of one family-level dynamics step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continue { grid_changed: bool },
    Solved,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum FamilyState {
    Estar(EstarState),
    Uis(UisState),
    Tax(TaxState),
}

/// One live episode.
#[derive(Debug, Clone)]
pub struct Environment {
    spec: EnvironmentSpec,
    seed: u64,
    truth: HypothesisId,
    core: FamilyState,
    static_grid: Vec<u8>,
    status: Status,
    crash_win: bool,
    action_count: u32,
    undo_stack: Vec<FamilyState>,
}

impl Environment {
    /// Start an episode. The hidden hypothesis is sampled from the spec's
    /// prior using `seed` (taxonomy games always hide their planted rule).
    pub fn reset(spec: &EnvironmentSpec, seed: u64) -> Result<Self, SpecError> {
        spec.validate()?;
        let truth = match &spec.family {
            FamilyParams::Taxonomy(p) => HypothesisId::new(p.rule.encode()),
            _ => sample_prior(spec, seed),
        };
        Self::with_hypothesis(spec, seed, truth)
    }

    /// Start an episode with a forced hidden hypothesis. This is how
    /// belief tracking builds per-hypothesis shadow simulations.
    pub fn with_hypothesis(
        spec: &EnvironmentSpec,
        seed: u64,
        truth: HypothesisId,
    ) -> Result<Self, SpecError> {
        spec.validate()?;
        if !spec.hypothesis_ids().any(|h| *h == truth) {
            return Err(SpecError::Invalid(format!(
                "hypothesis {truth} is not in the declared family"
            )));
        }
        let core = match &spec.family {
            FamilyParams::Estar(_) => FamilyState::Estar(EstarState::new()),
            FamilyParams::Uis(_) => FamilyState::Uis(UisState::new()),
            FamilyParams::Taxonomy(p) => FamilyState::Tax(TaxState::new(p, spec.grid_dims)),
        };
        let static_grid = match &spec.family {
            FamilyParams::Taxonomy(_) => Vec::new(),
            _ => build_static_grid(seed, spec.grid_dims),
        };
        Ok(Environment {
            spec: spec.clone(),
            seed,
            truth,
            core,
            static_grid,
            status: Status::NotFinished,
            crash_win: false,
            action_count: 0,
            undo_stack: Vec::new(),
        })
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_terminal(&self) -> bool {
        self.status != Status::NotFinished
    }

    pub fn crash_win(&self) -> bool {
        self.crash_win
    }

    pub fn action_count(&self) -> u32 {
        self.action_count
    }

    fn grid(&self) -> &[u8] {
        match &self.core {
            FamilyState::Tax(s) => &s.grid,
            _ => &self.static_grid,
        }
    }

    fn signal(&self) -> Option<String> {
        match (&self.core, &self.spec.family) {
            (FamilyState::Estar(s), _) if s.revealed => Some(format!("rule={}", self.truth)),
            (FamilyState::Uis(s), FamilyParams::Uis(_)) if s.revealed_digits > 0 => {
                let digits = uis::digits_of(self.truth.as_str());
                Some(format!("digits={}", &digits[..s.revealed_digits as usize]))
            }
            _ => None,
        }
    }

    fn progress(&self) -> u32 {
        match &self.core {
            FamilyState::Uis(s) => s.commit_progress,
            _ => 0,
        }
    }

    pub fn observe(&self) -> Observation {
        Observation {
            dims: self.spec.grid_dims,
            grid: self.grid().to_vec(),
            status: self.status,
            level: 0,
            step_index: self.action_count,
            signal: self.signal(),
            progress: self.progress(),
            crash_win: self.crash_win,
        }
    }

    /// Digest of the semantic state (family state plus status); excludes
    /// the action counter so repeating a no-op is recognizable.
    pub fn state_digest(&self) -> String {
        let bytes = serde_json::to_vec(&(&self.core, &self.status)).expect("state serializes");
        short_digest(&bytes)
    }

    /// Apply one action.
    pub fn step(&mut self, action: &Action) -> Result<StepInfo, EnvError> {
        if self.status != Status::NotFinished {
            return Err(EnvError::Protocol(format!(
                "step after terminal status {:?}",
                self.status
            )));
        }
        let grid_changed = match action {
            Action::SelectNull => {
                return match self.null_select() {
                    Ok(()) => unreachable!("null select never succeeds"),
                    Err(NullCoordFault) if self.spec.null_coord_fault => {
                        // Library-level fault path: the internal error is
                        // misread as a win.
                        self.status = Status::Solved;
                        self.crash_win = true;
                        self.action_count += 1;
                        Ok(self.info(false))
                    }
                    Err(NullCoordFault) => Err(EnvError::InvalidAction(
                        "cell-select requires coordinates".into(),
                    )),
                };
            }
            Action::Select { x, y } => {
                let (w, h) = self.spec.grid_dims;
                if *x >= w || *y >= h {
                    return Err(EnvError::InvalidAction(format!(
                        "coordinates ({x},{y}) out of bounds for {w}x{h} grid"
                    )));
                }
                self.apply(action)
            }
            Action::Undo => {
                let before = self.tax_grid_snapshot();
                let restored = self.undo_stack.pop();
                if let Some(prev) = restored {
                    self.core = prev;
                }
                before.map(|b| self.tax_grid_snapshot() != Some(b)).unwrap_or(false)
            }
            Action::Move(_) => self.apply(action),
        };
        self.action_count += 1;
        if self.status == Status::NotFinished && self.action_count >= self.spec.action_cap {
            self.status = Status::Failed;
        }
        Ok(self.info(grid_changed))
    }

    /// What the next observation would look like, without advancing.
    pub fn predict(&self, action: &Action) -> Prediction {
        if self.status != Status::NotFinished {
            return Prediction::Finished(self.status);
        }
        let mut copy = self.clone();
        match copy.step(action) {
            Ok(info) => info.prediction(),
            Err(_) => Prediction::Rejected,
        }
    }

    /// Shortest winning continuation under this episode's own hypothesis,
    /// per the family's declared dynamics.
    pub fn winning_plan(&self) -> Vec<Action> {
        match (&self.core, &self.spec.family) {
            (FamilyState::Estar(s), FamilyParams::Estar(p)) => {
                s.plan(p, self.truth.as_str() == "h1")
            }
            (FamilyState::Uis(s), FamilyParams::Uis(p)) => {
                s.plan(p, self.truth.as_str(), self.spec.grid_dims)
            }
            (FamilyState::Tax(s), FamilyParams::Taxonomy(_)) => {
                let rule = Rule::parse(self.truth.as_str()).expect("truth ids decode");
                rule.plan(&s.progress, self.action_count, self.spec.grid_dims)
            }
            _ => unreachable!("family state matches family params"),
        }
    }

    /// Salient coordinates visible on the reset grid (marker cells).
    pub fn salient_cells(&self) -> Vec<(u16, u16)> {
        taxonomy::salient_cells(self.grid(), self.spec.grid_dims)
    }

    fn apply(&mut self, action: &Action) -> bool {
        self.undo_stack.push(self.core.clone());
        if self.undo_stack.len() > UNDO_DEPTH {
            self.undo_stack.remove(0);
        }
        let outcome = match (&mut self.core, &self.spec.family) {
            (FamilyState::Estar(s), FamilyParams::Estar(p)) => {
                s.step(p, self.truth.as_str() == "h1", action)
            }
            (FamilyState::Uis(s), FamilyParams::Uis(p)) => {
                s.step(p, self.truth.as_str(), self.spec.grid_dims, action)
            }
            (FamilyState::Tax(s), FamilyParams::Taxonomy(p)) => {
                let rule = Rule::parse(self.truth.as_str()).expect("truth ids decode");
                s.step(&rule, self.spec.grid_dims, p.seed, self.action_count, action)
            }
            _ => unreachable!("family state matches family params"),
        };
        match outcome {
            StepOutcome::Continue { grid_changed } => grid_changed,
            StepOutcome::Solved => {
                self.status = Status::Solved;
                false
            }
            StepOutcome::Failed => {
                self.status = Status::Failed;
                false
            }
        }
    }

    fn null_select(&self) -> Result<(), NullCoordFault> {
        // Stand-in for the downstream coordinate computation that a null
        // coordinate crashes.
        Err(NullCoordFault)
    }

    fn tax_grid_snapshot(&self) -> Option<Vec<u8>> {
        match &self.core {
            FamilyState::Tax(s) => Some(s.grid.clone()),
            _ => None,
        }
    }

    fn info(&self, grid_changed: bool) -> StepInfo {
        StepInfo {
            status: self.status,
            step_index: self.action_count,
            signal: self.signal(),
            progress: self.progress(),
            grid_changed,
            crash_win: self.crash_win,
        }
    }
}

/// Internal fault raised by a coordinate-less cell selection.
#[derive(Debug)]
struct NullCoordFault;

fn sample_prior(spec: &EnvironmentSpec, seed: u64) -> HypothesisId {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (h, w) in spec.hypothesis_space() {
        acc += w;
        if u < acc {
            return h.clone();
        }
    }
    spec.hypothesis_space()
        .last()
        .map(|(h, _)| h.clone())
        .expect("validated specs have hypotheses")
}

fn build_static_grid(seed: u64, dims: (u16, u16)) -> Vec<u8> {
    let cells = dims.0 as usize * dims.1 as usize;
    let mut grid = vec![0u8; cells];
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..(cells / 64).max(4) {
        let pos = rng.random_range(0..cells);
        grid[pos] = rng.random_range(1..8);
    }
    grid
}

/// First 16 hex chars of a SHA-256 digest.
pub fn short_digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hex::encode(&hash[..8])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{ActionKey, Move};

    fn estar_spec() -> EnvironmentSpec {
        EnvironmentSpec::toy_estar("e", 5, 100).unwrap()
    }

    fn blind_select_spec() -> EnvironmentSpec {
        EnvironmentSpec::taxonomy(
            "t",
            TaxonomyParams {
                rule: Rule::Blind1 {
                    win: ActionKey::Select,
                },
                decoys: vec![Rule::Blind1 { win: ActionKey::Up }],
                seed: 7,
            },
        )
        .unwrap()
    }

    #[test]
    fn reset_is_deterministic() {
        let spec = estar_spec();
        let a = Environment::reset(&spec, 0).unwrap();
        let b = Environment::reset(&spec, 0).unwrap();
        assert_eq!(a.observe(), b.observe());
        assert_eq!(a.state_digest(), b.state_digest());
        assert_eq!(a.action_count(), 0);
        assert!(["h1", "h2"].contains(&a.truth.as_str()));
    }

    #[test]
    fn replaying_actions_replays_observations() {
        let spec = blind_select_spec();
        let actions = [
            Action::Move(Move::Up),
            Action::Move(Move::Left),
            Action::Undo,
            Action::Move(Move::Down),
        ];
        let run = |mut env: Environment| -> Vec<String> {
            actions
                .iter()
                .map(|a| {
                    env.step(a).unwrap();
                    env.observe().digest()
                })
                .collect()
        };
        let a = run(Environment::reset(&spec, 3).unwrap());
        let b = run(Environment::reset(&spec, 3).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn blind_select_wins_at_any_cell_in_one_action() {
        let spec = blind_select_spec();
        for coords in [(0, 0), (63, 63), (17, 5)] {
            let mut env = Environment::reset(&spec, 1).unwrap();
            let info = env
                .step(&Action::Select {
                    x: coords.0,
                    y: coords.1,
                })
                .unwrap();
            assert_eq!(info.status, Status::Solved);
            assert_eq!(env.action_count(), 1);
            assert!(!info.crash_win);
        }
    }

    #[test]
    fn repeated_rule_solves_at_exactly_n() {
        let spec = EnvironmentSpec::taxonomy(
            "r",
            TaxonomyParams {
                rule: Rule::Repeated {
                    key: ActionKey::Up,
                    count: 50,
                },
                decoys: vec![],
                seed: 2,
            },
        )
        .unwrap();
        let mut env = Environment::reset(&spec, 0).unwrap();
        for i in 1..=50 {
            let info = env.step(&Action::Move(Move::Up)).unwrap();
            if i < 50 {
                assert_eq!(info.status, Status::NotFinished, "step {i}");
            } else {
                assert_eq!(info.status, Status::Solved);
            }
        }
        assert_eq!(env.action_count(), 50);
    }

    #[test]
    fn step_after_terminal_is_a_protocol_error() {
        let spec = blind_select_spec();
        let mut env = Environment::reset(&spec, 1).unwrap();
        env.step(&Action::Select { x: 0, y: 0 }).unwrap();
        let err = env.step(&Action::Move(Move::Up)).unwrap_err();
        assert!(matches!(err, EnvError::Protocol(_)));
    }

    #[test]
    fn out_of_bounds_select_is_invalid() {
        let spec = blind_select_spec();
        let mut env = Environment::reset(&spec, 1).unwrap();
        let err = env.step(&Action::Select { x: 64, y: 0 }).unwrap_err();
        assert!(matches!(err, EnvError::InvalidAction(_)));
        assert_eq!(env.action_count(), 0);
    }

    #[test]
    fn null_probe_crash_wins_only_with_the_fault() {
        let faulty = blind_select_spec().with_fault(true);
        let mut env = Environment::reset(&faulty, 1).unwrap();
        let info = env.step(&Action::SelectNull).unwrap();
        assert_eq!(info.status, Status::Solved);
        assert!(info.crash_win);
        assert_eq!(env.action_count(), 1);

        let clean = blind_select_spec();
        let mut env = Environment::reset(&clean, 1).unwrap();
        let err = env.step(&Action::SelectNull).unwrap_err();
        assert!(matches!(err, EnvError::InvalidAction(_)));
        assert!(!env.crash_win());
    }

    #[test]
    fn undo_restores_one_step_and_counts() {
        let spec = estar_spec();
        let mut env = Environment::reset(&spec, 0).unwrap();
        let fresh = env.state_digest();
        env.step(&Action::Move(Move::Space)).unwrap();
        assert_ne!(env.state_digest(), fresh);
        env.step(&Action::Undo).unwrap();
        assert_eq!(env.state_digest(), fresh);
        assert_eq!(env.action_count(), 2);
    }

    #[test]
    fn undo_on_empty_history_is_a_counted_noop() {
        let spec = estar_spec();
        let mut env = Environment::reset(&spec, 0).unwrap();
        let fresh = env.state_digest();
        env.step(&Action::Undo).unwrap();
        assert_eq!(env.state_digest(), fresh);
        assert_eq!(env.action_count(), 1);
    }

    #[test]
    fn episode_fails_at_the_action_cap() {
        let spec = blind_select_spec().with_action_cap(5).unwrap();
        let mut env = Environment::reset(&spec, 1).unwrap();
        for i in 1..=5 {
            let info = env.step(&Action::Move(Move::Up)).unwrap();
            if i < 5 {
                assert_eq!(info.status, Status::NotFinished);
            } else {
                assert_eq!(info.status, Status::Failed);
            }
        }
    }

    #[test]
    fn estar_probe_reveals_the_rule_and_routes_hide_it() {
        let spec = estar_spec();
        let mut env = Environment::with_hypothesis(&spec, 0, HypothesisId::from("h1")).unwrap();
        let info = env.step(&Action::Move(Move::Up)).unwrap();
        assert_eq!(info.signal, None);
        let info = env.step(&Action::Move(Move::Space)).unwrap();
        assert_eq!(info.signal.as_deref(), Some("rule=h1"));
        // Remaining plan: 4 more ups after the 1 already taken.
        assert_eq!(env.winning_plan(), vec![Action::Move(Move::Up); 4]);
    }

    #[test]
    fn estar_wrong_route_fails_after_waste_budget() {
        let spec = EnvironmentSpec::toy_estar("e", 2, 4).unwrap();
        let mut env = Environment::with_hypothesis(&spec, 0, HypothesisId::from("h1")).unwrap();
        for i in 1..=4 {
            let info = env.step(&Action::Move(Move::Down)).unwrap();
            if i < 4 {
                assert_eq!(info.status, Status::NotFinished);
            } else {
                assert_eq!(info.status, Status::Failed);
            }
        }
    }

    #[test]
    fn predictions_match_actual_steps() {
        let spec = blind_select_spec();
        let env = Environment::reset(&spec, 5).unwrap();
        let action = Action::Move(Move::Up);
        let predicted = env.predict(&action);
        let mut live = env.clone();
        let info = live.step(&action).unwrap();
        assert_eq!(predicted.key(), info.prediction().key());
    }

    #[test]
    fn observation_cells_stay_in_range() {
        let spec = blind_select_spec();
        let mut env = Environment::reset(&spec, 9).unwrap();
        assert!(env.observe().cells_in_range());
        for _ in 0..20 {
            env.step(&Action::Move(Move::Right)).unwrap();
        }
        assert!(env.observe().cells_in_range());
    }
}
