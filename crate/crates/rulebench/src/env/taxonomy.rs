//! Generated grid games with planted rules.
//!
//! Grid content is procedural decoration: every accepted non-terminal move
//! or selection perturbs a few cells so probes have visible effects, and a
//! handful of marker-valued cells give searches salient coordinates to
//! try. Only the planted rule decides outcomes.

use crate::action::{Action, ActionKey};
use crate::env::rules::{Rule, TaxProgress};
use crate::env::spec::TaxonomyParams;
use crate::env::StepOutcome;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Cell value reserved for salient markers; decoration never overwrites it.
pub const MARKER_VALUE: u8 = 13;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxState {
    pub grid: Vec<u8>,
    pub progress: TaxProgress,
}

impl TaxState {
    pub fn new(params: &TaxonomyParams, dims: (u16, u16)) -> Self {
        TaxState {
            grid: initial_grid(params, dims),
            progress: TaxProgress::default(),
        }
    }

    pub fn step(
        &mut self,
        rule: &Rule,
        dims: (u16, u16),
        seed: u64,
        actions_before: u32,
        action: &Action,
    ) -> StepOutcome {
        if rule.check_win(&self.progress, actions_before, action) {
            return StepOutcome::Solved;
        }
        let grid_changed = match action.key() {
            ActionKey::Undo => false,
            _ => decorate(&mut self.grid, dims, seed, actions_before, action),
        };
        self.progress.advance(action, grid_changed);
        StepOutcome::Continue { grid_changed }
    }
}

/// Salient coordinates a spec's games expose: every marker-valued cell of
/// the reset grid, in row-major order.
pub fn salient_cells(grid: &[u8], dims: (u16, u16)) -> Vec<(u16, u16)> {
    let w = dims.0 as usize;
    grid.iter()
        .enumerate()
        .filter(|(_, v)| **v == MARKER_VALUE)
        .map(|(i, _)| ((i % w) as u16, (i / w) as u16))
        .collect()
}

fn initial_grid(params: &TaxonomyParams, dims: (u16, u16)) -> Vec<u8> {
    let cells = dims.0 as usize * dims.1 as usize;
    let mut grid = vec![0u8; cells];
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(params.seed);
    // Background noise.
    let sprinkles = (cells / 64).max(8);
    for _ in 0..sprinkles {
        let pos = rng.random_range(0..cells);
        grid[pos] = rng.random_range(1..8);
    }
    // Markers: the coordinates any candidate rule cares about, plus decoys.
    let mut markers: Vec<(u16, u16)> = Vec::new();
    let push = |c: (u16, u16), markers: &mut Vec<(u16, u16)>| {
        if !markers.contains(&c) {
            markers.push(c);
        }
    };
    for rule in std::iter::once(&params.rule).chain(params.decoys.iter()) {
        match rule {
            Rule::CoordClick { x, y, .. } => push((*x, *y), &mut markers),
            Rule::ProbeGated { coords: Some(c) } => push(*c, &mut markers),
            _ => {}
        }
    }
    while markers.len() < 3 {
        let c = (
            rng.random_range(0..dims.0 as u32) as u16,
            rng.random_range(0..dims.1 as u32) as u16,
        );
        push(c, &mut markers);
    }
    for (x, y) in markers {
        grid[y as usize * dims.0 as usize + x as usize] = MARKER_VALUE;
    }
    grid
}

/// Deterministically perturb a few cells. Always changes at least one cell
/// so a probe's effect is observable; marker cells are left intact.
fn decorate(grid: &mut [u8], dims: (u16, u16), seed: u64, step: u32, action: &Action) -> bool {
    let cells = dims.0 as usize * dims.1 as usize;
    let stamp = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(step as u64)
        .wrapping_mul(7)
        .wrapping_add(action.kind_index() as u64);
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(stamp);
    let mut changed = false;
    for _ in 0..4 {
        let pos = rng.random_range(0..cells);
        if grid[pos] == MARKER_VALUE {
            continue;
        }
        let value = rng.random_range(1..8);
        changed |= grid[pos] != value;
        grid[pos] = value;
    }
    if !changed {
        // Guarantee a visible effect: bump the first non-marker cell.
        for pos in 0..cells {
            if grid[pos] != MARKER_VALUE {
                grid[pos] = grid[pos].wrapping_add(1) % 8;
                changed = true;
                break;
            }
        }
    }
    changed
}
