//! Planted winning rules for generated grid games.
//!
//! Every taxonomy game hides one [`Rule`]; the declared hypothesis family
//! is the planted rule plus decoy rules. Rules encode to compact strings
//! (`blind:up`, `rep:up:50`, `click:12,40:100`, ...) that double as
//! hypothesis identifiers.

use crate::action::{Action, ActionKey, Move};
use crate::env::spec::SpecError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A hidden win condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// The single action wins immediately, regardless of game state.
    /// Selection wins at any in-bounds cell.
    Blind1 { win: ActionKey },
    /// Cell selection wins only after a distinct (non-select) action has
    /// already produced a grid change this episode. `coords`, when set,
    /// restricts the winning selection to one cell.
    ProbeGated { coords: Option<(u16, u16)> },
    /// The action wins once it has been taken `count` times in a row.
    Repeated { key: ActionKey, count: u32 },
    /// Selecting exactly `(x, y)` wins once at least `min_steps` actions
    /// have already been taken.
    CoordClick { x: u16, y: u16, min_steps: u32 },
    /// Selection wins after at least `distinct_moves` different plain
    /// moves have been used this episode.
    Diverse { distinct_moves: u32 },
}

impl Rule {
    /// Encode as a hypothesis identifier string.
    pub fn encode(&self) -> String {
        match self {
            Rule::Blind1 { win } => format!("blind:{win}"),
            Rule::ProbeGated { coords: None } => "gated".to_string(),
            Rule::ProbeGated {
                coords: Some((x, y)),
            } => format!("gated@{x},{y}"),
            Rule::Repeated { key, count } => format!("rep:{key}:{count}"),
            Rule::CoordClick { x, y, min_steps } => format!("click:{x},{y}:{min_steps}"),
            Rule::Diverse { distinct_moves } => format!("div:{distinct_moves}"),
        }
    }

    pub fn parse(s: &str) -> Result<Rule, SpecError> {
        let bad = || SpecError::Invalid(format!("unrecognized rule {s:?}"));
        let parse_coords = |s: &str| -> Result<(u16, u16), SpecError> {
            let (x, y) = s.split_once(',').ok_or_else(bad)?;
            Ok((
                x.parse().map_err(|_| bad())?,
                y.parse().map_err(|_| bad())?,
            ))
        };
        if let Some(rest) = s.strip_prefix("blind:") {
            let win = rest.parse::<ActionKey>().map_err(SpecError::Invalid)?;
            return Ok(Rule::Blind1 { win });
        }
        if s == "gated" {
            return Ok(Rule::ProbeGated { coords: None });
        }
        if let Some(rest) = s.strip_prefix("gated@") {
            let (x, y) = parse_coords(rest)?;
            return Ok(Rule::ProbeGated { coords: Some((x, y)) });
        }
        if let Some(rest) = s.strip_prefix("rep:") {
            let (key, count) = rest.split_once(':').ok_or_else(bad)?;
            return Ok(Rule::Repeated {
                key: key.parse::<ActionKey>().map_err(SpecError::Invalid)?,
                count: count.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("click:") {
            let (coords, steps) = rest.split_once(':').ok_or_else(bad)?;
            let (x, y) = parse_coords(coords)?;
            return Ok(Rule::CoordClick {
                x,
                y,
                min_steps: steps.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("div:") {
            return Ok(Rule::Diverse {
                distinct_moves: rest.parse().map_err(|_| bad())?,
            });
        }
        Err(bad())
    }

    pub fn validate(&self, dims: (u16, u16)) -> Result<(), SpecError> {
        match self {
            Rule::Blind1 { .. } => Ok(()),
            Rule::ProbeGated { coords } => {
                if let Some((x, y)) = coords {
                    check_bounds(*x, *y, dims)?;
                }
                Ok(())
            }
            Rule::Repeated { count, .. } => {
                if *count == 0 {
                    return Err(SpecError::Invalid("repeated rule needs count >= 1".into()));
                }
                Ok(())
            }
            Rule::CoordClick { x, y, .. } => check_bounds(*x, *y, dims),
            Rule::Diverse { distinct_moves } => {
                if !(1..=5).contains(distinct_moves) {
                    return Err(SpecError::Invalid(
                        "diverse rule needs 1..=5 distinct moves".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Length of the intended winning strategy from a fresh reset.
    pub fn planted_len(&self) -> u32 {
        match self {
            Rule::Blind1 { .. } => 1,
            Rule::ProbeGated { .. } => 2,
            Rule::Repeated { count, .. } => *count,
            Rule::CoordClick { min_steps, .. } => min_steps + 1,
            Rule::Diverse { distinct_moves } => distinct_moves + 1,
        }
    }

    /// Does taking `action` now win under this rule? `progress` reflects
    /// the episode before the action; `actions_before` is the number of
    /// accepted actions so far.
    pub fn check_win(&self, progress: &TaxProgress, actions_before: u32, action: &Action) -> bool {
        match self {
            Rule::Blind1 { win } => action.key() == *win,
            Rule::ProbeGated { coords } => {
                if !progress.gate_armed {
                    return false;
                }
                match (action, coords) {
                    (Action::Select { .. }, None) => true,
                    (Action::Select { x, y }, Some((cx, cy))) => x == cx && y == cy,
                    _ => false,
                }
            }
            Rule::Repeated { key, count } => {
                action.key() == *key && progress.consecutive(*key) + 1 >= *count
            }
            Rule::CoordClick { x, y, min_steps } => {
                matches!(action, Action::Select { x: ax, y: ay } if ax == x && ay == y)
                    && actions_before >= *min_steps
            }
            Rule::Diverse { distinct_moves } => {
                matches!(action, Action::Select { .. })
                    && progress.distinct_moves.len() >= *distinct_moves as usize
            }
        }
    }

    /// Shortest winning action sequence from the given progress, assuming
    /// this rule is the truth.
    pub fn plan(&self, progress: &TaxProgress, actions_before: u32, dims: (u16, u16)) -> Vec<Action> {
        let center = Action::center(dims);
        match self {
            Rule::Blind1 { win } => vec![Action::from_key(*win, dims)],
            Rule::ProbeGated { coords } => {
                let (tx, ty) = coords.unwrap_or(center);
                let select = Action::Select { x: tx, y: ty };
                if progress.gate_armed {
                    vec![select]
                } else {
                    vec![Action::Move(Move::Up), select]
                }
            }
            Rule::Repeated { key, count } => {
                let remaining = count.saturating_sub(progress.consecutive(*key)).max(1);
                vec![Action::from_key(*key, dims); remaining as usize]
            }
            Rule::CoordClick { x, y, min_steps } => {
                let fillers = min_steps.saturating_sub(actions_before);
                let mut plan = vec![Action::Move(Move::Up); fillers as usize];
                plan.push(Action::Select { x: *x, y: *y });
                plan
            }
            Rule::Diverse { distinct_moves } => {
                let mut plan = Vec::new();
                let mut have = progress.distinct_moves.len() as u32;
                for m in Move::ALL {
                    if have >= *distinct_moves {
                        break;
                    }
                    if !progress.distinct_moves.contains(&m) {
                        plan.push(Action::Move(m));
                        have += 1;
                    }
                }
                plan.push(Action::Select {
                    x: center.0,
                    y: center.1,
                });
                plan
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn check_bounds(x: u16, y: u16, dims: (u16, u16)) -> Result<(), SpecError> {
    if x >= dims.0 || y >= dims.1 {
        return Err(SpecError::Invalid(format!(
            "coordinates ({x},{y}) out of bounds for {}x{} grid",
            dims.0, dims.1
        )));
    }
    Ok(())
}

/// Rule-agnostic episode counters a taxonomy game tracks. These evolve
/// identically under every candidate rule, so shadow simulations stay
/// aligned with the real episode.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxProgress {
    /// Set once any non-select action has produced a grid change.
    pub gate_armed: bool,
    pub last_key: Option<ActionKey>,
    pub run_length: u32,
    pub distinct_moves: BTreeSet<Move>,
}

impl TaxProgress {
    /// Current run of consecutive occurrences of `key`.
    pub fn consecutive(&self, key: ActionKey) -> u32 {
        if self.last_key == Some(key) {
            self.run_length
        } else {
            0
        }
    }

    pub fn advance(&mut self, action: &Action, grid_changed: bool) {
        let key = action.key();
        if self.last_key == Some(key) {
            self.run_length += 1;
        } else {
            self.last_key = Some(key);
            self.run_length = 1;
        }
        if let Action::Move(m) = action {
            self.distinct_moves.insert(*m);
        }
        if grid_changed && key != ActionKey::Select {
            self.gate_armed = true;
        }
    }
}
