//! Reference baselines: the fewest actions a policy that knows the game
//! family (but not the sampled hypothesis) needs.

use crate::env::spec::{EnvironmentSpec, FamilyParams, SpecError};
use crate::env::spec::split_prob_for_gain;
use crate::env::rules::Rule;

/// Baseline action count for a spec, used as the efficiency normalizer.
///
/// Honors `human_baseline_override` when set. Otherwise: for the toy and
/// uniform-information families, exhaustively evaluates the
/// probe-then-commit policy class and returns the best expected action
/// count (rounded up); for generated games, the planted strategy length.
pub fn oracle_baseline(spec: &EnvironmentSpec) -> Result<u32, SpecError> {
    spec.validate()?;
    if let Some(h) = spec.human_baseline_override {
        return Ok(h.max(1));
    }
    let baseline = match &spec.family {
        FamilyParams::Estar(p) => {
            // Either always probe first (1 + k, deterministic) or commit to
            // a uniform guess (expected (k + M) / 2).
            let explore = 1.0 + p.plan_steps as f64;
            let guess = (p.plan_steps as f64 + p.waste_steps as f64) / 2.0;
            explore.min(guess).ceil() as u32
        }
        FamilyParams::Uis(p) => {
            // Probe j digits, then commit to the MAP hypothesis: the MAP
            // is right with probability y^(probes - j), y the larger digit
            // mass.
            let x = split_prob_for_gain(p.probe_gain)?;
            let y = x.max(1.0 - x);
            let mut best = f64::INFINITY;
            for j in 0..=p.probes {
                let p_correct = y.powi((p.probes - j) as i32);
                let expected = j as f64
                    + p_correct * p.plan_steps as f64
                    + (1.0 - p_correct) * p.waste_steps as f64;
                best = best.min(expected);
            }
            best.ceil() as u32
        }
        FamilyParams::Taxonomy(p) => p.rule.planted_len(),
    };
    Ok(baseline.max(1))
}

/// Expose the planted strategy length of a rule; the oracle for taxonomy
/// games.
pub fn planted_length(rule: &Rule) -> u32 {
    rule.planted_len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionKey;
    use crate::env::spec::{TaxonomyParams, UisParams};

    #[test]
    fn estar_oracle_always_explores_when_waste_dominates() {
        let spec = EnvironmentSpec::toy_estar("e", 5, 100).unwrap();
        assert_eq!(oracle_baseline(&spec).unwrap(), 6);
    }

    #[test]
    fn blind_game_oracle_is_one_action() {
        let spec = EnvironmentSpec::taxonomy(
            "t",
            TaxonomyParams {
                rule: Rule::Blind1 {
                    win: ActionKey::Select,
                },
                decoys: vec![],
                seed: 0,
            },
        )
        .unwrap();
        assert_eq!(oracle_baseline(&spec).unwrap(), 1);
    }

    #[test]
    fn repeated_game_oracle_is_the_planted_length() {
        let spec = EnvironmentSpec::taxonomy(
            "t",
            TaxonomyParams {
                rule: Rule::Repeated {
                    key: ActionKey::Up,
                    count: 50,
                },
                decoys: vec![],
                seed: 0,
            },
        )
        .unwrap();
        assert_eq!(oracle_baseline(&spec).unwrap(), 50);
    }

    #[test]
    fn uis_oracle_probes_everything_when_waste_dominates() {
        let spec = EnvironmentSpec::uis(
            "u",
            UisParams {
                probe_gain: std::f64::consts::LN_2,
                correct_intercept: 0.5,
                correct_slope: 1.0 / (2.0 * std::f64::consts::LN_2),
                plan_steps: 5,
                waste_steps: 100,
                probes: 3,
            },
        )
        .unwrap();
        // 3 probes + 5 commits.
        assert_eq!(oracle_baseline(&spec).unwrap(), 8);
    }

    #[test]
    fn override_wins() {
        let spec = EnvironmentSpec::toy_estar("e", 5, 100)
            .unwrap()
            .with_human_baseline(42);
        assert_eq!(oracle_baseline(&spec).unwrap(), 42);
    }
}
