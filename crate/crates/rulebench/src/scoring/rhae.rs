//! Relative human action efficiency: per-level `min(H/A, 1.15)^2`,
//! averaged over levels. Unsolved levels contribute zero; crash wins are
//! excluded entirely, and a level set that is empty after exclusion has no
//! defined score.

use crate::scoring::ScoreError;
use crate::trace::{EpisodeTrace, Outcome};
use serde::{Deserialize, Serialize};

/// Efficiency ratios are capped here before squaring.
pub const RHAE_CAP_RATIO: f64 = 1.15;
/// Maximum per-level score: 1.15^2.
pub const RHAE_LEVEL_MAX: f64 = RHAE_CAP_RATIO * RHAE_CAP_RATIO;

/// One level's outcome, ready for aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub game_id: String,
    /// H: baseline action count for the level.
    pub baseline: u32,
    /// A: agent action count; absent when unsolved.
    pub actions: Option<u32>,
    pub solved: bool,
    pub crash_win: bool,
}

impl LevelResult {
    pub fn validate(&self) -> Result<(), ScoreError> {
        if self.baseline < 1 {
            return Err(ScoreError::Validation(format!(
                "{}: baseline must be >= 1",
                self.game_id
            )));
        }
        if let Some(a) = self.actions {
            if a < 1 {
                return Err(ScoreError::Validation(format!(
                    "{}: recorded action count must be >= 1",
                    self.game_id
                )));
            }
        }
        if self.solved && !self.crash_win && self.actions.is_none() {
            return Err(ScoreError::Validation(format!(
                "{}: solved level without an action count",
                self.game_id
            )));
        }
        Ok(())
    }

    pub fn from_trace(trace: &EpisodeTrace, baseline: u32) -> Self {
        LevelResult {
            game_id: trace.env_id.clone(),
            baseline,
            actions: match trace.outcome {
                Outcome::Unsolved => None,
                _ => Some(trace.action_count.max(1)),
            },
            solved: trace.outcome == Outcome::Solved,
            crash_win: trace.outcome == Outcome::CrashWin,
        }
    }

    /// Per-level score: 0 when unsolved.
    pub fn score(&self) -> f64 {
        match (self.solved, self.actions) {
            (true, Some(a)) => rhae_level(self.baseline, a),
            _ => 0.0,
        }
    }
}

/// `min(H/A, 1.15)^2` for one level.
pub fn rhae_level(baseline: u32, actions: u32) -> f64 {
    assert!(baseline >= 1 && actions >= 1, "H and A must be >= 1");
    let ratio = (baseline as f64 / actions as f64).min(RHAE_CAP_RATIO);
    ratio * ratio
}

/// Mean per-level score over the crash-free levels. Unsolved levels score
/// zero. Errors when nothing scoreable remains: the metric is undefined
/// for crash wins.
pub fn rhae_aggregate(levels: &[LevelResult]) -> Result<f64, ScoreError> {
    for level in levels {
        level.validate()?;
    }
    let scoreable: Vec<&LevelResult> = levels.iter().filter(|l| !l.crash_win).collect();
    if scoreable.is_empty() {
        return Err(ScoreError::Undefined);
    }
    let total: f64 = scoreable.iter().map(|l| l.score()).sum();
    Ok(total / scoreable.len() as f64)
}
