//! Speed/depth coordinates of a policy and the non-dominated frontier.
//!
//! Speed is the mean reciprocal action count (unsolved episodes count at
//! the action cap). Depth averages, per episode, the explore-phase entropy
//! reduction divided by the number of explore actions; an episode without
//! exploration contributes zero, so no-explore policies sit at depth zero
//! by convention. A per-episode normalization (total explore reduction per
//! episode, not divided by the action count) is available as a flagged
//! mode; the two differ by the exploration rate.

use crate::scoring::ScoreError;
use crate::trace::{EpisodeTrace, Outcome};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMode {
    /// Mean over episodes of (explore entropy reduction / explore actions).
    PerExploreAction,
    /// Mean over episodes of the total explore entropy reduction.
    PerEpisode,
}

/// The minimal per-episode record speed/depth needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub actions: u32,
    pub solved: bool,
    /// (total explore-phase entropy reduction, explore action count).
    pub explore: (f64, u32),
}

impl EpisodeOutcome {
    pub fn from_trace(trace: &EpisodeTrace) -> Option<Self> {
        if trace.outcome == Outcome::CrashWin {
            return None; // crash wins never reach efficiency metrics
        }
        Some(EpisodeOutcome {
            actions: trace.action_count,
            solved: trace.outcome == Outcome::Solved,
            explore: trace.explore_stats(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub label: String,
    /// Mean reciprocal action count (dimensionless, per action).
    pub speed: f64,
    /// Nats per exploration action (or per episode, per `mode`).
    pub depth: f64,
    pub mode: DepthMode,
}

/// Aggregate traces into one (speed, depth) point.
pub fn speed_depth(
    label: impl Into<String>,
    traces: &[EpisodeTrace],
    cap: u32,
    mode: DepthMode,
) -> Result<FrontierPoint, ScoreError> {
    let outcomes: Vec<EpisodeOutcome> =
        traces.iter().filter_map(EpisodeOutcome::from_trace).collect();
    speed_depth_from_outcomes(label, &outcomes, cap, mode)
}

/// As [`speed_depth`], from pre-extracted episode outcomes.
pub fn speed_depth_from_outcomes(
    label: impl Into<String>,
    outcomes: &[EpisodeOutcome],
    cap: u32,
    mode: DepthMode,
) -> Result<FrontierPoint, ScoreError> {
    if outcomes.is_empty() {
        return Err(ScoreError::Validation(
            "speed/depth needs at least one episode".into(),
        ));
    }
    if cap < 1 {
        return Err(ScoreError::Validation("action cap must be >= 1".into()));
    }
    let n = outcomes.len() as f64;
    let speed = outcomes
        .iter()
        .map(|o| {
            let effective = if o.solved { o.actions.max(1) } else { cap };
            1.0 / effective as f64
        })
        .sum::<f64>()
        / n;
    let depth = outcomes
        .iter()
        .map(|o| {
            let (reduction, count) = o.explore;
            if count == 0 {
                0.0
            } else {
                match mode {
                    DepthMode::PerExploreAction => reduction.max(0.0) / count as f64,
                    DepthMode::PerEpisode => reduction.max(0.0),
                }
            }
        })
        .sum::<f64>()
        / n;
    Ok(FrontierPoint {
        label: label.into(),
        speed,
        depth,
        mode,
    })
}

/// Does `a` dominate `b`: at least as good in both coordinates, strictly
/// better in one?
fn dominates(a: &FrontierPoint, b: &FrontierPoint) -> bool {
    a.speed >= b.speed && a.depth >= b.depth && (a.speed > b.speed || a.depth > b.depth)
}

/// The maximal set under componentwise dominance, ordered by speed
/// descending (stable for ties).
pub fn pareto_frontier(points: &[FrontierPoint]) -> Vec<FrontierPoint> {
    let mut frontier: Vec<FrontierPoint> = points
        .iter()
        .filter(|p| !points.iter().any(|q| dominates(q, p)))
        .cloned()
        .collect();
    frontier.sort_by(|a, b| b.speed.partial_cmp(&a.speed).expect("finite speeds"));
    frontier
}
