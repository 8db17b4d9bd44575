//! Uniform-information environments.
//!
//! The hidden hypothesis is a string of independent binary digits. Each
//! probe (`space`) reveals the next digit, gaining exactly the configured
//! number of nats. To win, the agent selects the grid cell encoding the
//! true hypothesis `plan_steps` times; selections elsewhere count toward
//! the waste budget and eventually fail the episode.

use crate::action::{Action, Move};
use crate::env::spec::UisParams;
use crate::env::StepOutcome;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UisState {
    pub revealed_digits: u32,
    pub commit_progress: u32,
    pub wrong_commits: u32,
}

impl UisState {
    pub fn new() -> Self {
        UisState {
            revealed_digits: 0,
            commit_progress: 0,
            wrong_commits: 0,
        }
    }

    pub fn step(
        &mut self,
        params: &UisParams,
        truth_digits: &str,
        dims: (u16, u16),
        action: &Action,
    ) -> StepOutcome {
        match action {
            Action::Move(Move::Space) => {
                if self.revealed_digits < params.probes {
                    self.revealed_digits += 1;
                }
                StepOutcome::Continue { grid_changed: false }
            }
            Action::Select { x, y } => {
                let target = cell_of_digits(truth_digits, dims);
                if (*x, *y) == target {
                    self.commit_progress += 1;
                    if self.commit_progress >= params.plan_steps {
                        return StepOutcome::Solved;
                    }
                } else {
                    self.wrong_commits += 1;
                    if self.wrong_commits >= params.waste_steps {
                        return StepOutcome::Failed;
                    }
                }
                StepOutcome::Continue { grid_changed: false }
            }
            _ => StepOutcome::Continue { grid_changed: false },
        }
    }

    /// Shortest winning continuation assuming `digits` is the truth.
    pub fn plan(&self, params: &UisParams, digits: &str, dims: (u16, u16)) -> Vec<Action> {
        let (x, y) = cell_of_digits(digits, dims);
        let remaining = params.plan_steps.saturating_sub(self.commit_progress).max(1);
        vec![Action::Select { x, y }; remaining as usize]
    }
}

impl Default for UisState {
    fn default() -> Self {
        UisState::new()
    }
}

/// Digits of a hypothesis id of the form `b0101`.
pub fn digits_of(id: &str) -> &str {
    id.strip_prefix('b').unwrap_or(id)
}

/// The grid cell encoding a hypothesis: its binary index, row-major.
pub fn cell_of_digits(digits: &str, dims: (u16, u16)) -> (u16, u16) {
    let idx = usize::from_str_radix(digits_of(digits), 2).unwrap_or(0);
    let w = dims.0 as usize;
    ((idx % w) as u16, (idx / w) as u16)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_are_distinct_per_hypothesis() {
        let dims = (64, 64);
        let mut seen = std::collections::BTreeSet::new();
        for idx in 0..8 {
            let digits = format!("{idx:03b}");
            assert!(seen.insert(cell_of_digits(&digits, dims)));
        }
    }

    #[test]
    fn probes_reveal_in_order_and_saturate() {
        let params = UisParams {
            probe_gain: std::f64::consts::LN_2,
            correct_intercept: 0.5,
            correct_slope: 1.0,
            plan_steps: 2,
            waste_steps: 10,
            probes: 2,
        };
        let mut state = UisState::new();
        for expected in [1, 2, 2] {
            state.step(&params, "01", (64, 64), &Action::Move(Move::Space));
            assert_eq!(state.revealed_digits, expected);
        }
    }

    #[test]
    fn correct_selects_win_and_wrong_selects_waste() {
        let params = UisParams {
            probe_gain: std::f64::consts::LN_2,
            correct_intercept: 0.5,
            correct_slope: 1.0,
            plan_steps: 2,
            waste_steps: 2,
            probes: 2,
        };
        let dims = (64, 64);
        let (tx, ty) = cell_of_digits("01", dims);

        let mut state = UisState::new();
        let hit = Action::Select { x: tx, y: ty };
        assert_eq!(
            state.step(&params, "01", dims, &hit),
            StepOutcome::Continue { grid_changed: false }
        );
        assert_eq!(state.step(&params, "01", dims, &hit), StepOutcome::Solved);

        let mut state = UisState::new();
        let miss = Action::Select { x: tx + 1, y: ty };
        state.step(&params, "01", dims, &miss);
        assert_eq!(state.step(&params, "01", dims, &miss), StepOutcome::Failed);
    }
}
