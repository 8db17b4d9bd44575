//! # rulebench
//!
//! A deterministic arena of hidden-rule games, agents that play them, and a
//! scoring toolkit for action efficiency.
//!
//! The crate has four layers:
//!
//! - [`env`] — seedable environments where the win condition is hidden:
//!   a two-hypothesis toy world, a uniform-information family where every
//!   probe gains a fixed number of nats, and procedurally generated grid
//!   games with planted winning rules (single-action wins, probe-gated
//!   wins, repeated-action wins, coordinate clicks). Environments can
//!   carry an injected null-coordinate fault for vulnerability studies.
//! - [`belief`] — exact Bayesian tracking over an environment's declared
//!   hypothesis family: updates, entropy, and expected information gain.
//! - [`agent`] + [`baselines`] + [`search`] — a three-phase
//!   explore/verify/plan agent gated on belief entropy, plus random,
//!   repeated-action, and breadth-first-search reference strategies,
//!   exhaustive action-sequence enumeration, a game taxonomy classifier,
//!   and a crash-win vulnerability scanner.
//! - [`scoring`] + [`harness`] — the relative human action efficiency
//!   (RHAE) metric, speed/depth frontier computation with analytic curve
//!   cross-checks, convexity certification, projection and multi-run
//!   statistics, and an experiment runner with persisted, reproducible
//!   reports.
//!
//! Start with the runnable examples (`cargo run --example <name>`); each
//! one demonstrates a single capability end to end. The `rulebench` binary
//! exposes the experiment harness as subcommands.

pub mod action;
pub mod agent;
pub mod baselines;
pub mod belief;
pub mod env;
pub mod harness;
pub mod scoring;
pub mod search;
pub mod trace;

pub use action::{Action, ActionKey, Move};
pub use belief::{Belief, HypothesisId};
pub use env::{EnvironmentSpec, Environment, Observation, Status};
pub use trace::{EpisodeTrace, Outcome, Phase};
