//! The seven-action input vocabulary shared by every environment.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The five plain directional/control inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
    Space,
}

impl Move {
    pub const ALL: [Move; 5] = [Move::Up, Move::Down, Move::Left, Move::Right, Move::Space];

    pub fn name(self) -> &'static str {
        match self {
            Move::Up => "up",
            Move::Down => "down",
            Move::Left => "left",
            Move::Right => "right",
            Move::Space => "space",
        }
    }
}

/// One of the seven legal inputs an environment accepts.
///
/// Cell selection normally carries coordinates; [`Action::SelectNull`] is a
/// selection issued with the coordinates deliberately left out — the probe
/// used by the vulnerability scanner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Move(Move),
    Select { x: u16, y: u16 },
    SelectNull,
    Undo,
}

/// Action kind without coordinates, used when a rule or config names an
/// action ("the winning action is `up`") rather than a concrete input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKey {
    Up,
    Down,
    Left,
    Right,
    Space,
    Select,
    Undo,
}

impl ActionKey {
    pub const ALL: [ActionKey; 7] = [
        ActionKey::Up,
        ActionKey::Down,
        ActionKey::Left,
        ActionKey::Right,
        ActionKey::Space,
        ActionKey::Select,
        ActionKey::Undo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKey::Up => "up",
            ActionKey::Down => "down",
            ActionKey::Left => "left",
            ActionKey::Right => "right",
            ActionKey::Space => "space",
            ActionKey::Select => "select",
            ActionKey::Undo => "undo",
        }
    }

    /// Canonical position in the action vocabulary (0..=6). Ties in action
    /// scoring break toward the lowest index.
    pub fn index(self) -> usize {
        match self {
            ActionKey::Up => 0,
            ActionKey::Down => 1,
            ActionKey::Left => 2,
            ActionKey::Right => 3,
            ActionKey::Space => 4,
            ActionKey::Select => 5,
            ActionKey::Undo => 6,
        }
    }
}

impl FromStr for ActionKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown action kind {s:?} (expected one of up/down/left/right/space/select/undo)"))
    }
}

impl fmt::Display for ActionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Action {
    pub fn key(&self) -> ActionKey {
        match self {
            Action::Move(Move::Up) => ActionKey::Up,
            Action::Move(Move::Down) => ActionKey::Down,
            Action::Move(Move::Left) => ActionKey::Left,
            Action::Move(Move::Right) => ActionKey::Right,
            Action::Move(Move::Space) => ActionKey::Space,
            Action::Select { .. } | Action::SelectNull => ActionKey::Select,
            Action::Undo => ActionKey::Undo,
        }
    }

    pub fn kind_index(&self) -> usize {
        self.key().index()
    }

    /// Center cell of a grid, the canonical coordinate used when a search
    /// enumerates cell selection without knowing which cell matters.
    pub fn center(dims: (u16, u16)) -> (u16, u16) {
        (dims.0 / 2, dims.1 / 2)
    }

    /// The canonical seven-action set for a grid of the given dimensions:
    /// the five moves, one cell selection at the grid center, and undo.
    pub fn canonical_set(dims: (u16, u16)) -> [Action; 7] {
        let (cx, cy) = Action::center(dims);
        [
            Action::Move(Move::Up),
            Action::Move(Move::Down),
            Action::Move(Move::Left),
            Action::Move(Move::Right),
            Action::Move(Move::Space),
            Action::Select { x: cx, y: cy },
            Action::Undo,
        ]
    }

    /// Realize an [`ActionKey`] as a concrete action, placing selection at
    /// the grid center.
    pub fn from_key(key: ActionKey, dims: (u16, u16)) -> Action {
        let (cx, cy) = Action::center(dims);
        match key {
            ActionKey::Up => Action::Move(Move::Up),
            ActionKey::Down => Action::Move(Move::Down),
            ActionKey::Left => Action::Move(Move::Left),
            ActionKey::Right => Action::Move(Move::Right),
            ActionKey::Space => Action::Move(Move::Space),
            ActionKey::Select => Action::Select { x: cx, y: cy },
            ActionKey::Undo => Action::Undo,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move(m) => f.write_str(m.name()),
            Action::Select { x, y } => write!(f, "select@{x},{y}"),
            Action::SelectNull => f.write_str("select@null"),
            Action::Undo => f.write_str("undo"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_seven_canonical_actions_in_index_order() {
        let set = Action::canonical_set((64, 64));
        assert_eq!(set.len(), 7);
        for (i, a) in set.iter().enumerate() {
            assert_eq!(a.kind_index(), i);
        }
        assert_eq!(set[5], Action::Select { x: 32, y: 32 });
    }

    #[test]
    fn action_key_round_trips_through_names() {
        for key in ActionKey::ALL {
            assert_eq!(key.name().parse::<ActionKey>().unwrap(), key);
        }
        assert!("action8".parse::<ActionKey>().is_err());
    }

    #[test]
    fn select_null_shares_the_select_kind() {
        assert_eq!(Action::SelectNull.key(), ActionKey::Select);
        assert_eq!(Action::Select { x: 0, y: 0 }.key(), ActionKey::Select);
    }
}
