//! Scoring: the relative human action efficiency metric, speed/depth
//! frontier computation, analytic curves with convexity certification, and
//! projection/confidence statistics.

pub mod analytic;
pub mod frontier;
pub mod rhae;
pub mod stats;

pub use analytic::{
    convexity_certificate, estar_curve, taylor_loss_check, uis_curve, ConvexityCertificate,
    EstarCurve, TaylorLoss, UisCurve,
};
pub use frontier::{pareto_frontier, speed_depth, DepthMode, EpisodeOutcome, FrontierPoint};
pub use rhae::{rhae_aggregate, rhae_level, LevelResult, RHAE_CAP_RATIO, RHAE_LEVEL_MAX};
pub use stats::{binomial_projection, multi_run_ci, CiSummary, Projection};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("metric undefined: no scoreable levels remain after crash-win exclusion")]
    Undefined,
    #[error("invalid scoring input: {0}")]
    Validation(String),
}
