//! Diagnostic searches over a game's action space.
//!
//! - [`exhaustive_search`] enumerates every action sequence up to a depth
//!   over the canonical seven actions (cell selection pinned to the grid
//!   center), replaying each from a fresh reset. At depth 3 that is
//!   7 + 49 + 343 = 399 sequences per game; depth 4 adds 2401 more.
//! - [`bfs_presolve`] runs breadth-first search with a state-digest cache,
//!   returning the shortest winning sequence within its limits. Besides
//!   the canonical actions it tries selections at the grid's salient
//!   marker cells.
//! - [`vuln_scan`] issues the null-coordinate probe and reports whether a
//!   crash win is reachable.
//! - [`taxonomy_classify`] runs a fixed ladder of behavioral probes and
//!   labels the game by the weakest strategy class that wins it.

use crate::action::{Action, Move};
use crate::env::{EnvError, Environment, EnvironmentSpec, SpecError, Status};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub game_id: String,
    /// Total sequences enumerated: the sum of 7^d over the requested depths.
    pub sequences_enumerated: u64,
    /// New sequences per depth (7, 49, 343, 2401, ...).
    pub per_depth: Vec<u64>,
    /// Minimal winning prefixes found, deduplicated.
    pub winning_sequences: Vec<Vec<Action>>,
    pub max_depth: u32,
    pub wall_time_secs: f64,
}

/// Enumerate all action sequences of length 1..=`max_depth` over the
/// canonical action set, replaying each from a fresh reset. A sequence
/// whose prefix already wins is recorded by that winning prefix.
pub fn exhaustive_search(
    spec: &EnvironmentSpec,
    max_depth: u32,
) -> Result<SearchResult, SearchError> {
    if !(1..=4).contains(&max_depth) {
        return Err(SearchError::Invalid(format!(
            "max_depth {max_depth} outside 1..=4"
        )));
    }
    spec.validate()?;
    let start = Instant::now();
    let actions = Action::canonical_set(spec.grid_dims);
    let mut winners: BTreeSet<Vec<Action>> = BTreeSet::new();
    let mut per_depth = Vec::new();
    let mut total = 0u64;
    for depth in 1..=max_depth {
        let count = 7u64.pow(depth);
        per_depth.push(count);
        total += count;
        // Base-7 counter over the canonical actions.
        let mut index = vec![0usize; depth as usize];
        loop {
            let mut env = Environment::reset(spec, 0)?;
            let mut winning_prefix: Option<Vec<Action>> = None;
            let mut taken = Vec::with_capacity(depth as usize);
            for &i in &index {
                let action = actions[i].clone();
                taken.push(action.clone());
                let info = env.step(&action)?;
                match info.status {
                    Status::Solved => {
                        winning_prefix = Some(taken.clone());
                        break;
                    }
                    Status::Failed => break,
                    Status::NotFinished => {}
                }
            }
            if let Some(prefix) = winning_prefix {
                winners.insert(prefix);
            }
            // Advance the counter; stop after the last combination.
            let mut pos = index.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < actions.len() {
                    break;
                }
                index[pos] = 0;
            }
            if index.iter().all(|i| *i == 0) {
                break;
            }
        }
    }
    Ok(SearchResult {
        game_id: spec.id.clone(),
        sequences_enumerated: total,
        per_depth,
        winning_sequences: winners.into_iter().collect(),
        max_depth,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CachedOutcome {
    Open,
    Solved,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BfsResult {
    /// Shortest winning sequence within the limits, if any.
    pub winning: Option<Vec<Action>>,
    /// State digest -> outcome, for every state visited.
    pub cache: BTreeMap<String, CachedOutcome>,
    /// Set when the time limit cut the search short.
    pub truncated: bool,
    pub states_expanded: u64,
}

/// Breadth-first search over action sequences using environment replays.
/// Deterministic given the spec; the cache deduplicates revisited states.
pub fn bfs_presolve(
    spec: &EnvironmentSpec,
    depth_limit: u32,
    time_limit_secs: f64,
) -> Result<BfsResult, SearchError> {
    if depth_limit < 1 {
        return Err(SearchError::Invalid("depth_limit must be >= 1".into()));
    }
    spec.validate()?;
    let start = Instant::now();

    // Canonical actions plus selections at salient marker cells.
    let root = Environment::reset(spec, 0)?;
    let mut actions: Vec<Action> = Action::canonical_set(spec.grid_dims).to_vec();
    for (x, y) in root.salient_cells().into_iter().take(4) {
        let select = Action::Select { x, y };
        if !actions.contains(&select) {
            actions.push(select);
        }
    }

    let mut cache: BTreeMap<String, CachedOutcome> = BTreeMap::new();
    cache.insert(root.state_digest(), CachedOutcome::Open);
    let mut queue: VecDeque<(Environment, Vec<Action>)> = VecDeque::new();
    queue.push_back((root, Vec::new()));
    let mut expanded = 0u64;

    while let Some((env, prefix)) = queue.pop_front() {
        if prefix.len() as u32 >= depth_limit {
            continue;
        }
        if start.elapsed().as_secs_f64() > time_limit_secs {
            return Ok(BfsResult {
                winning: None,
                cache,
                truncated: true,
                states_expanded: expanded,
            });
        }
        expanded += 1;
        for action in &actions {
            let mut child = env.clone();
            let info = match child.step(action) {
                Ok(info) => info,
                Err(EnvError::InvalidAction(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let mut seq = prefix.clone();
            seq.push(action.clone());
            match info.status {
                Status::Solved => {
                    cache.insert(child.state_digest(), CachedOutcome::Solved);
                    return Ok(BfsResult {
                        winning: Some(seq),
                        cache,
                        truncated: false,
                        states_expanded: expanded,
                    });
                }
                Status::Failed => {
                    cache.insert(child.state_digest(), CachedOutcome::Failed);
                }
                Status::NotFinished => {
                    let digest = child.state_digest();
                    if !cache.contains_key(&digest) {
                        cache.insert(digest, CachedOutcome::Open);
                        queue.push_back((child, seq));
                    }
                }
            }
        }
    }
    Ok(BfsResult {
        winning: None,
        cache,
        truncated: false,
        states_expanded: expanded,
    })
}

/// Issue the null-coordinate probe at reset. Returns whether a crash win
/// resulted and in how many steps (always 1 when reachable).
pub fn vuln_scan(spec: &EnvironmentSpec) -> Result<(bool, Option<u32>), SearchError> {
    spec.validate()?;
    let mut env = Environment::reset(spec, 0)?;
    match env.step(&Action::SelectNull) {
        Ok(info) if info.crash_win => Ok((true, Some(1))),
        Ok(_) => Ok((false, None)),
        Err(EnvError::InvalidAction(_)) => Ok((false, None)),
        Err(e) => Err(e.into()),
    }
}

/// The weakest strategy class that wins a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TierLabel {
    Blind1,
    ProbeGated,
    RepeatedAction,
    CoordinateClick,
    BudgetConstrained,
    Unclassified,
}

impl TierLabel {
    pub fn name(&self) -> &'static str {
        match self {
            TierLabel::Blind1 => "blind-1",
            TierLabel::ProbeGated => "probe-gated",
            TierLabel::RepeatedAction => "repeated-action",
            TierLabel::CoordinateClick => "coordinate-click",
            TierLabel::BudgetConstrained => "budget-constrained",
            TierLabel::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Human-readable description of the winning strategy.
    pub strategy: String,
    pub steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyLabel {
    pub tier: TierLabel,
    pub evidence: Option<Evidence>,
    pub crash_win_reachable: bool,
}

impl TaxonomyLabel {
    /// Census view of this label: strategies that need more steps than
    /// `budget_threshold` count as budget-constrained rather than by their
    /// mechanical tier.
    pub fn census_tier(&self, budget_threshold: u32) -> TierLabel {
        match (self.tier, &self.evidence) {
            (TierLabel::RepeatedAction | TierLabel::CoordinateClick, Some(e))
                if e.steps > budget_threshold =>
            {
                TierLabel::BudgetConstrained
            }
            _ => self.tier,
        }
    }
}

/// Run the probe ladder and label the game by the first strategy that wins:
/// (1) each single action once, (2) exhaustive search to depth 3 (with a
/// replay check separating probe-gated wins from coordinate clicks),
/// (3) each action repeated to the budget, (4) probe-then-select, (5)
/// selections repeated at salient cells. The crash-win scan is reported
/// independently of the tier.
pub fn taxonomy_classify(
    spec: &EnvironmentSpec,
    budget: u32,
) -> Result<TaxonomyLabel, SearchError> {
    spec.validate()?;
    let crash = vuln_scan(spec)?.0;
    let label = |tier, evidence| TaxonomyLabel {
        tier,
        evidence,
        crash_win_reachable: crash,
    };
    let dims = spec.grid_dims;
    let canonical = Action::canonical_set(dims);

    // (1) Each single action once.
    for action in &canonical {
        if replay_wins(spec, std::slice::from_ref(action))? {
            return Ok(label(
                TierLabel::Blind1,
                Some(Evidence {
                    strategy: action.to_string(),
                    steps: 1,
                }),
            ));
        }
    }

    // (2) Exhaustive to depth 3; analyze the shortest winner's shape.
    let exhaustive = exhaustive_search(spec, 3)?;
    let shortest = exhaustive
        .winning_sequences
        .iter()
        .min_by_key(|s| s.len())
        .cloned();
    if let Some(seq) = shortest {
        if let Some(found) = classify_short_win(spec, &seq, crash)? {
            return Ok(found);
        }
    }

    // (3) Each action repeated to the budget.
    for action in &canonical {
        if let Some(steps) = repeat_until_win(spec, action, budget)? {
            return Ok(label(
                TierLabel::RepeatedAction,
                Some(Evidence {
                    strategy: format!("{action} x{steps}"),
                    steps,
                }),
            ));
        }
    }

    // (4) Probe, then select at the center.
    let (cx, cy) = Action::center(dims);
    let probe_then_select = [Action::Move(Move::Up), Action::Select { x: cx, y: cy }];
    if replay_wins(spec, &probe_then_select)? {
        return Ok(label(
            TierLabel::ProbeGated,
            Some(Evidence {
                strategy: format!("up, select@{cx},{cy}"),
                steps: 2,
            }),
        ));
    }

    // (5) Selections repeated at salient marker cells.
    let root = Environment::reset(spec, 0)?;
    for (x, y) in root.salient_cells().into_iter().take(6) {
        let select = Action::Select { x, y };
        if let Some(steps) = repeat_until_win(spec, &select, budget)? {
            return Ok(label(
                TierLabel::CoordinateClick,
                Some(Evidence {
                    strategy: format!("{select} x{steps}"),
                    steps,
                }),
            ));
        }
    }

    Ok(label(TierLabel::Unclassified, None))
}

/// Interpret a short (depth <= 3) winning sequence found by enumeration.
fn classify_short_win(
    spec: &EnvironmentSpec,
    seq: &[Action],
    crash: bool,
) -> Result<Option<TaxonomyLabel>, SearchError> {
    let label = |tier, strategy: String, steps| {
        Some(TaxonomyLabel {
            tier,
            evidence: Some(Evidence { strategy, steps }),
            crash_win_reachable: crash,
        })
    };
    let steps = seq.len() as u32;
    let strategy = seq
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    if steps == 1 {
        return Ok(label(TierLabel::Blind1, strategy, 1));
    }
    let first_key = seq[0].key();
    if seq.iter().all(|a| a.key() == first_key) && !matches!(seq[0], Action::Select { .. }) {
        return Ok(label(TierLabel::RepeatedAction, strategy, steps));
    }
    if let Some(Action::Select { x, y }) = seq.last() {
        // Distinguish a gate (needs a distinct earlier probe) from a click
        // count (any earlier actions do): replay with the lead-in replaced
        // by selections, which never arm a gate.
        let mut select_only: Vec<Action> =
            vec![Action::Select { x: *x, y: *y }; seq.len() - 1];
        select_only.push(Action::Select { x: *x, y: *y });
        if replay_wins(spec, &select_only)? {
            return Ok(label(TierLabel::CoordinateClick, strategy, steps));
        }
        return Ok(label(TierLabel::ProbeGated, strategy, steps));
    }
    Ok(label(TierLabel::Unclassified, strategy, steps))
}

fn replay_wins(spec: &EnvironmentSpec, actions: &[Action]) -> Result<bool, SearchError> {
    let mut env = Environment::reset(spec, 0)?;
    for action in actions {
        let info = match env.step(action) {
            Ok(info) => info,
            Err(EnvError::InvalidAction(_)) => return Ok(false),
            Err(e) => return Err(e.into()),
        };
        match info.status {
            Status::Solved => return Ok(!info.crash_win),
            Status::Failed => return Ok(false),
            Status::NotFinished => {}
        }
    }
    Ok(false)
}

fn repeat_until_win(
    spec: &EnvironmentSpec,
    action: &Action,
    budget: u32,
) -> Result<Option<u32>, SearchError> {
    let mut env = Environment::reset(spec, 0)?;
    for step in 1..=budget {
        let info = match env.step(action) {
            Ok(info) => info,
            Err(EnvError::InvalidAction(_)) => return Ok(None),
            Err(_) => return Ok(None),
        };
        match info.status {
            Status::Solved if !info.crash_win => return Ok(Some(step)),
            Status::Solved | Status::Failed => return Ok(None),
            Status::NotFinished => {}
        }
    }
    Ok(None)
}
