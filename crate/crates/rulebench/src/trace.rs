//! Episode traces: the unit of scoring.
//!
//! A trace is an ordered record of (phase, action, observation digest,
//! belief entropy) steps plus an outcome. Traces serialize to
//! line-delimited JSON: one `step` record per line, interleaved `event`
//! records for explore re-entries, and a final `summary` record. Entropy
//! is always in nats and is the value *after* the step's belief update.

use crate::action::Action;
use crate::belief::HypothesisId;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed trace line: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Explore,
    Verify,
    Plan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    Unsolved,
    CrashWin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub phase: Phase,
    pub action: Action,
    pub obs_digest: String,
    /// Belief entropy in nats after this step's update.
    pub entropy_nats: f64,
}

/// Why an episode re-entered the explore phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEvent {
    /// A plan-phase observation did not match the MAP hypothesis's prediction.
    Surprise { step: u32 },
    /// A verify-phase observation falsified the MAP hypothesis.
    Falsified { step: u32, hypothesis: HypothesisId },
}

impl TraceEvent {
    pub fn step(&self) -> u32 {
        match self {
            TraceEvent::Surprise { step } => *step,
            TraceEvent::Falsified { step, .. } => *step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub env_id: String,
    pub seed: u64,
    pub config_digest: String,
    /// Prior entropy before any action, in nats.
    pub initial_entropy_nats: f64,
    pub steps: Vec<TraceStep>,
    pub events: Vec<TraceEvent>,
    pub outcome: Outcome,
    /// Always equals `steps.len()`.
    pub action_count: u32,
}

impl EpisodeTrace {
    pub fn new(
        env_id: impl Into<String>,
        seed: u64,
        config_digest: impl Into<String>,
        initial_entropy_nats: f64,
        steps: Vec<TraceStep>,
        events: Vec<TraceEvent>,
        outcome: Outcome,
    ) -> Self {
        let action_count = steps.len() as u32;
        EpisodeTrace {
            env_id: env_id.into(),
            seed,
            config_digest: config_digest.into(),
            initial_entropy_nats,
            steps,
            events,
            outcome,
            action_count,
        }
    }

    pub fn solved(&self) -> bool {
        self.outcome == Outcome::Solved
    }

    /// Check the phase grammar `explore* verify* plan*`, where a transition
    /// back to explore is legal only when a surprise or falsification event
    /// is recorded at the step that triggered it.
    pub fn phase_grammar_ok(&self) -> bool {
        let order = |p: Phase| match p {
            Phase::Explore => 0,
            Phase::Verify => 1,
            Phase::Plan => 2,
        };
        for (i, pair) in self.steps.windows(2).enumerate() {
            let (a, b) = (pair[0].phase, pair[1].phase);
            if order(b) >= order(a) {
                continue;
            }
            // Going backwards is only allowed into explore, justified by an
            // event recorded at the preceding step.
            let justified = b == Phase::Explore
                && self.events.iter().any(|e| e.step() as usize == i);
            if !justified {
                return false;
            }
        }
        true
    }

    /// Total entropy reduction over explore-phase segments (clamped at
    /// zero) and the number of explore actions taken.
    pub fn explore_stats(&self) -> (f64, u32) {
        let mut reduction = 0.0;
        let mut count = 0u32;
        let mut prev_entropy = self.initial_entropy_nats;
        for step in &self.steps {
            if step.phase == Phase::Explore {
                reduction += prev_entropy - step.entropy_nats;
                count += 1;
            }
            prev_entropy = step.entropy_nats;
        }
        (reduction.max(0.0), count)
    }

    pub fn explore_steps(&self) -> u32 {
        self.explore_stats().1
    }

    /// Serialize as line-delimited JSON records.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), TraceError> {
        for (i, step) in self.steps.iter().enumerate() {
            let line = serde_json::to_string(&TraceLine::Step {
                index: i as u32,
                phase: step.phase,
                action: step.action.clone(),
                obs_digest: step.obs_digest.clone(),
                entropy_nats: step.entropy_nats,
            })
            .expect("trace steps serialize");
            writeln!(w, "{line}")?;
        }
        for event in &self.events {
            let line = serde_json::to_string(&TraceLine::Event(event.clone()))
                .expect("trace events serialize");
            writeln!(w, "{line}")?;
        }
        let summary = serde_json::to_string(&TraceLine::Summary {
            env_id: self.env_id.clone(),
            seed: self.seed,
            config_digest: self.config_digest.clone(),
            initial_entropy_nats: self.initial_entropy_nats,
            outcome: self.outcome,
            action_count: self.action_count,
        })
        .expect("trace summary serializes");
        writeln!(w, "{summary}")?;
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<EpisodeTrace, TraceError> {
        let mut steps = Vec::new();
        let mut events = Vec::new();
        let mut summary = None;
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: TraceLine = serde_json::from_str(&line)
                .map_err(|e| TraceError::Malformed(format!("{e}: {line}")))?;
            match record {
                TraceLine::Step {
                    phase,
                    action,
                    obs_digest,
                    entropy_nats,
                    ..
                } => steps.push(TraceStep {
                    phase,
                    action,
                    obs_digest,
                    entropy_nats,
                }),
                TraceLine::Event(e) => events.push(e),
                TraceLine::Summary {
                    env_id,
                    seed,
                    config_digest,
                    initial_entropy_nats,
                    outcome,
                    action_count,
                } => {
                    summary = Some((
                        env_id,
                        seed,
                        config_digest,
                        initial_entropy_nats,
                        outcome,
                        action_count,
                    ));
                }
            }
        }
        let (env_id, seed, config_digest, initial_entropy_nats, outcome, action_count) =
            summary.ok_or_else(|| TraceError::Malformed("missing summary record".into()))?;
        if action_count as usize != steps.len() {
            return Err(TraceError::Malformed(format!(
                "summary action_count {action_count} does not match {} step records",
                steps.len()
            )));
        }
        Ok(EpisodeTrace::new(
            env_id,
            seed,
            config_digest,
            initial_entropy_nats,
            steps,
            events,
            outcome,
        ))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
enum TraceLine {
    Step {
        index: u32,
        phase: Phase,
        action: Action,
        obs_digest: String,
        entropy_nats: f64,
    },
    Event(TraceEvent),
    Summary {
        env_id: String,
        seed: u64,
        config_digest: String,
        initial_entropy_nats: f64,
        outcome: Outcome,
        action_count: u32,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Move;

    fn step(phase: Phase, entropy: f64) -> TraceStep {
        TraceStep {
            phase,
            action: Action::Move(Move::Up),
            obs_digest: "d".into(),
            entropy_nats: entropy,
        }
    }

    #[test]
    fn grammar_accepts_ordered_phases() {
        let t = EpisodeTrace::new(
            "e",
            0,
            "c",
            0.7,
            vec![
                step(Phase::Explore, 0.3),
                step(Phase::Verify, 0.0),
                step(Phase::Plan, 0.0),
                step(Phase::Plan, 0.0),
            ],
            vec![],
            Outcome::Solved,
        );
        assert!(t.phase_grammar_ok());
        assert_eq!(t.action_count, 4);
    }

    #[test]
    fn grammar_rejects_unjustified_reentry() {
        let t = EpisodeTrace::new(
            "e",
            0,
            "c",
            0.7,
            vec![step(Phase::Plan, 0.0), step(Phase::Explore, 0.7)],
            vec![],
            Outcome::Unsolved,
        );
        assert!(!t.phase_grammar_ok());
    }

    #[test]
    fn grammar_accepts_reentry_with_event() {
        let t = EpisodeTrace::new(
            "e",
            0,
            "c",
            0.7,
            vec![
                step(Phase::Explore, 0.05),
                step(Phase::Plan, 0.05),
                step(Phase::Explore, 0.7),
            ],
            vec![TraceEvent::Surprise { step: 1 }],
            Outcome::Unsolved,
        );
        assert!(t.phase_grammar_ok());
    }

    #[test]
    fn explore_stats_sum_segment_reductions() {
        let t = EpisodeTrace::new(
            "e",
            0,
            "c",
            1.0,
            vec![
                step(Phase::Explore, 0.4),
                step(Phase::Plan, 0.4),
                step(Phase::Explore, 0.1),
            ],
            vec![TraceEvent::Surprise { step: 1 }],
            Outcome::Unsolved,
        );
        let (reduction, count) = t.explore_stats();
        assert_eq!(count, 2);
        assert!((reduction - 0.9).abs() < 1e-12);
    }

    #[test]
    fn jsonl_round_trip() {
        let t = EpisodeTrace::new(
            "game-1",
            42,
            "cfg",
            2f64.ln(),
            vec![step(Phase::Explore, 0.0), step(Phase::Plan, 0.0)],
            vec![TraceEvent::Falsified {
                step: 0,
                hypothesis: HypothesisId::from("h2"),
            }],
            Outcome::Solved,
        );
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        let back = EpisodeTrace::read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }
}
