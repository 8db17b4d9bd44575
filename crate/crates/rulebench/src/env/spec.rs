//! Declarative game descriptions and their on-disk format.
//!
//! A spec names the game family, its numeric parameters, the grid
//! dimensions, the fault flag, and (derived from those) the hypothesis
//! family an agent reasons over. Specs serialize to a small TOML document,
//! one game per file; see the crate README for the field-by-field schema.

use crate::belief::{HypothesisId, WEIGHT_SUM_TOL};
use crate::env::rules::Rule;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("spec io: {0}")]
    Io(#[from] std::io::Error),
    #[error("spec parse: {0}")]
    Parse(String),
}

pub const DEFAULT_GRID: (u16, u16) = (64, 64);
pub const DEFAULT_ACTION_CAP: u32 = 200;

/// Two-hypothesis toy world: one probe action perfectly reveals the hidden
/// rule; the correct plan costs `plan_steps` actions, a wrong commitment
/// wastes `waste_steps` before failing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstarParams {
    /// k: actions a correct plan needs.
    pub plan_steps: u32,
    /// M: actions a wrong plan wastes before the episode fails.
    pub waste_steps: u32,
}

/// Uniform-information family: every probe reveals one independent digit
/// of the hidden hypothesis and gains exactly `probe_gain` nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UisParams {
    /// Delta-h: expected nats gained per probe, in (0, ln 2].
    pub probe_gain: f64,
    /// alpha: correctness-probability intercept of the analytic curve.
    pub correct_intercept: f64,
    /// beta: correctness-probability slope of the analytic curve.
    pub correct_slope: f64,
    /// k: selections at the correct cell needed to win.
    pub plan_steps: u32,
    /// M: wrong selections tolerated before the episode fails.
    pub waste_steps: u32,
    /// Number of hidden digits; the hypothesis family has 2^probes members.
    pub probes: u32,
}

/// A generated grid game with a planted rule and decoy candidate rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyParams {
    pub rule: Rule,
    pub decoys: Vec<Rule>,
    /// Seeds the procedural grid decoration (not the hidden rule).
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FamilyParams {
    Estar(EstarParams),
    Uis(UisParams),
    Taxonomy(TaxonomyParams),
}

impl FamilyParams {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::Estar(_) => "estar",
            FamilyParams::Uis(_) => "uis",
            FamilyParams::Taxonomy(_) => "taxonomy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub id: String,
    pub family: FamilyParams,
    pub grid_dims: (u16, u16),
    pub null_coord_fault: bool,
    pub human_baseline_override: Option<u32>,
    /// Unsolved episodes terminate (as failed) at this many actions.
    pub action_cap: u32,
    hypothesis_space: Vec<(HypothesisId, f64)>,
}

impl EnvironmentSpec {
    pub fn toy_estar(id: impl Into<String>, plan_steps: u32, waste_steps: u32) -> Result<Self, SpecError> {
        let spec = EnvironmentSpec {
            id: id.into(),
            family: FamilyParams::Estar(EstarParams {
                plan_steps,
                waste_steps,
            }),
            grid_dims: DEFAULT_GRID,
            null_coord_fault: false,
            human_baseline_override: None,
            action_cap: DEFAULT_ACTION_CAP,
            hypothesis_space: vec![
                (HypothesisId::from("h1"), 0.5),
                (HypothesisId::from("h2"), 0.5),
            ],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn uis(id: impl Into<String>, params: UisParams) -> Result<Self, SpecError> {
        let split = split_prob_for_gain(params.probe_gain)?;
        let n = 1u32
            .checked_shl(params.probes)
            .ok_or_else(|| SpecError::Invalid("too many probes".into()))? as usize;
        let mut space = Vec::with_capacity(n);
        for idx in 0..n {
            let digits: String = (0..params.probes)
                .map(|d| {
                    if idx >> (params.probes - 1 - d) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect();
            let weight: f64 = digits
                .chars()
                .map(|c| if c == '1' { split } else { 1.0 - split })
                .product();
            space.push((HypothesisId::new(format!("b{digits}")), weight));
        }
        let spec = EnvironmentSpec {
            id: id.into(),
            family: FamilyParams::Uis(params),
            grid_dims: DEFAULT_GRID,
            null_coord_fault: false,
            human_baseline_override: None,
            action_cap: DEFAULT_ACTION_CAP,
            hypothesis_space: space,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn taxonomy(id: impl Into<String>, params: TaxonomyParams) -> Result<Self, SpecError> {
        let mut rules: Vec<Rule> = Vec::with_capacity(params.decoys.len() + 1);
        rules.push(params.rule.clone());
        for d in &params.decoys {
            if !rules.contains(d) {
                rules.push(d.clone());
            }
        }
        rules.sort();
        let w = 1.0 / rules.len() as f64;
        let space = rules
            .into_iter()
            .map(|r| (HypothesisId::new(r.encode()), w))
            .collect();
        let spec = EnvironmentSpec {
            id: id.into(),
            family: FamilyParams::Taxonomy(params),
            grid_dims: DEFAULT_GRID,
            null_coord_fault: false,
            human_baseline_override: None,
            action_cap: DEFAULT_ACTION_CAP,
            hypothesis_space: space,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_fault(mut self, fault: bool) -> Self {
        self.null_coord_fault = fault;
        self
    }

    pub fn with_human_baseline(mut self, h: u32) -> Self {
        self.human_baseline_override = Some(h);
        self
    }

    pub fn with_action_cap(mut self, cap: u32) -> Result<Self, SpecError> {
        self.action_cap = cap;
        self.validate()?;
        Ok(self)
    }

    pub fn hypothesis_space(&self) -> &[(HypothesisId, f64)] {
        &self.hypothesis_space
    }

    pub fn hypothesis_ids(&self) -> impl Iterator<Item = &HypothesisId> {
        self.hypothesis_space.iter().map(|(h, _)| h)
    }

    /// The planted rule of a taxonomy game, decoded from a hypothesis id.
    pub fn rule_for(&self, h: &HypothesisId) -> Result<Rule, SpecError> {
        Rule::parse(h.as_str())
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.id.is_empty() {
            return Err(SpecError::Invalid("empty game id".into()));
        }
        if self.grid_dims.0 == 0 || self.grid_dims.1 == 0 {
            return Err(SpecError::Invalid("grid dimensions must be positive".into()));
        }
        if self.action_cap == 0 {
            return Err(SpecError::Invalid("action cap must be positive".into()));
        }
        if self.hypothesis_space.is_empty() {
            return Err(SpecError::Invalid("empty hypothesis space".into()));
        }
        let mut sum = 0.0;
        for (h, w) in &self.hypothesis_space {
            if !w.is_finite() || *w < 0.0 {
                return Err(SpecError::Invalid(format!(
                    "prior weight of {h} is {w}, expected nonnegative"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(SpecError::Invalid(format!(
                "prior weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        match &self.family {
            FamilyParams::Estar(p) => {
                if p.plan_steps < 1 {
                    return Err(SpecError::Invalid("estar needs plan_steps (k) >= 1".into()));
                }
                if p.waste_steps <= p.plan_steps {
                    return Err(SpecError::Invalid(
                        "estar needs waste_steps (M) > plan_steps (k)".into(),
                    ));
                }
                if self.hypothesis_space.len() != 2
                    || self
                        .hypothesis_space
                        .iter()
                        .any(|(_, w)| (*w - 0.5).abs() > WEIGHT_SUM_TOL)
                {
                    return Err(SpecError::Invalid(
                        "estar hypothesis space must be exactly {h1: 1/2, h2: 1/2}".into(),
                    ));
                }
            }
            FamilyParams::Uis(p) => {
                split_prob_for_gain(p.probe_gain)?;
                if p.plan_steps < 1 || p.waste_steps <= p.plan_steps {
                    return Err(SpecError::Invalid(
                        "uis needs waste_steps (M) > plan_steps (k) >= 1".into(),
                    ));
                }
                if !(0.0..=1.0).contains(&p.correct_intercept) || p.correct_slope < 0.0 {
                    return Err(SpecError::Invalid(
                        "uis needs correct_intercept (alpha) in [0,1] and correct_slope (beta) >= 0"
                            .into(),
                    ));
                }
                if p.probes == 0 || p.probes > 12 {
                    return Err(SpecError::Invalid("uis needs 1..=12 probes".into()));
                }
                let cells = self.grid_dims.0 as usize * self.grid_dims.1 as usize;
                if (1usize << p.probes) > cells {
                    return Err(SpecError::Invalid(
                        "uis hypothesis family does not fit on the grid".into(),
                    ));
                }
                if self.hypothesis_space.len() != 1usize << p.probes {
                    return Err(SpecError::Invalid(
                        "uis hypothesis space must have 2^probes members".into(),
                    ));
                }
            }
            FamilyParams::Taxonomy(p) => {
                p.rule.validate(self.grid_dims)?;
                for d in &p.decoys {
                    d.validate(self.grid_dims)?;
                }
                let planted = HypothesisId::new(p.rule.encode());
                if !self.hypothesis_space.iter().any(|(h, _)| *h == planted) {
                    return Err(SpecError::Invalid(
                        "planted rule missing from hypothesis space".into(),
                    ));
                }
                for (h, _) in &self.hypothesis_space {
                    Rule::parse(h.as_str())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(&SpecFile::from(self)).expect("spec serializes")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, SpecError> {
        let file: SpecFile = toml::from_str(s).map_err(|e| SpecError::Parse(e.to_string()))?;
        file.build()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SpecError> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(&path)?;
        Self::from_toml_str(&text)
    }

    pub fn digest(&self) -> String {
        crate::env::short_digest(self.to_toml_string().as_bytes())
    }
}

/// Solve H2(x) = gain for x in (0, 1/2], where H2 is the binary entropy in
/// nats. Used to construct a digit prior with an exact per-probe gain.
pub fn split_prob_for_gain(gain: f64) -> Result<f64, SpecError> {
    let ln2 = std::f64::consts::LN_2;
    if !(gain > 0.0 && gain <= ln2 + 1e-12) {
        return Err(SpecError::Invalid(format!(
            "probe gain {gain} outside (0, ln 2]"
        )));
    }
    if (gain - ln2).abs() <= 1e-12 {
        return Ok(0.5);
    }
    let h2 = |x: f64| -x * x.ln() - (1.0 - x) * (1.0 - x).ln();
    let (mut lo, mut hi) = (1e-15, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < gain {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// On-disk mirror of [`EnvironmentSpec`]; the hypothesis space is derived,
/// not stored.
#[derive(Serialize, Deserialize)]
struct SpecFile {
    id: String,
    family: String,
    grid: (u16, u16),
    #[serde(default)]
    null_coord_fault: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    human_baseline: Option<u32>,
    #[serde(default = "default_cap")]
    action_cap: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    estar: Option<EstarParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uis: Option<UisParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    taxonomy: Option<TaxonomyFile>,
}

#[derive(Serialize, Deserialize)]
struct TaxonomyFile {
    rule: String,
    #[serde(default)]
    decoys: Vec<String>,
    #[serde(default)]
    seed: u64,
}

fn default_cap() -> u32 {
    DEFAULT_ACTION_CAP
}

impl From<&EnvironmentSpec> for SpecFile {
    fn from(spec: &EnvironmentSpec) -> Self {
        let mut file = SpecFile {
            id: spec.id.clone(),
            family: spec.family.name().to_string(),
            grid: spec.grid_dims,
            null_coord_fault: spec.null_coord_fault,
            human_baseline: spec.human_baseline_override,
            action_cap: spec.action_cap,
            estar: None,
            uis: None,
            taxonomy: None,
        };
        match &spec.family {
            FamilyParams::Estar(p) => file.estar = Some(*p),
            FamilyParams::Uis(p) => file.uis = Some(*p),
            FamilyParams::Taxonomy(p) => {
                file.taxonomy = Some(TaxonomyFile {
                    rule: p.rule.encode(),
                    decoys: p.decoys.iter().map(Rule::encode).collect(),
                    seed: p.seed,
                })
            }
        }
        file
    }
}

impl SpecFile {
    fn build(self) -> Result<EnvironmentSpec, SpecError> {
        let mut spec = match self.family.as_str() {
            "estar" => {
                let p = self
                    .estar
                    .ok_or_else(|| SpecError::Parse("missing [estar] table".into()))?;
                EnvironmentSpec::toy_estar(self.id, p.plan_steps, p.waste_steps)?
            }
            "uis" => {
                let p = self
                    .uis
                    .ok_or_else(|| SpecError::Parse("missing [uis] table".into()))?;
                EnvironmentSpec::uis(self.id, p)?
            }
            "taxonomy" => {
                let t = self
                    .taxonomy
                    .ok_or_else(|| SpecError::Parse("missing [taxonomy] table".into()))?;
                let rule = Rule::parse(&t.rule)?;
                let decoys = t
                    .decoys
                    .iter()
                    .map(|d| Rule::parse(d))
                    .collect::<Result<Vec<_>, _>>()?;
                EnvironmentSpec::taxonomy(
                    self.id,
                    TaxonomyParams {
                        rule,
                        decoys,
                        seed: t.seed,
                    },
                )?
            }
            other => {
                return Err(SpecError::Parse(format!(
                    "unknown family {other:?} (expected estar, uis, or taxonomy)"
                )))
            }
        };
        spec.grid_dims = self.grid;
        spec.null_coord_fault = self.null_coord_fault;
        spec.human_baseline_override = self.human_baseline;
        spec.action_cap = self.action_cap;
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionKey;

    #[test]
    fn estar_prior_is_half_half() {
        let spec = EnvironmentSpec::toy_estar("e", 5, 100).unwrap();
        assert_eq!(spec.hypothesis_space().len(), 2);
        for (_, w) in spec.hypothesis_space() {
            assert_eq!(*w, 0.5);
        }
    }

    #[test]
    fn estar_rejects_waste_not_exceeding_plan() {
        assert!(EnvironmentSpec::toy_estar("e", 5, 5).is_err());
        assert!(EnvironmentSpec::toy_estar("e", 0, 5).is_err());
    }

    #[test]
    fn uis_space_is_a_product_prior() {
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
        assert_eq!(spec.hypothesis_space().len(), 8);
        let total: f64 = spec.hypothesis_space().iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (_, w) in spec.hypothesis_space() {
            assert!((*w - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn split_prob_inverts_binary_entropy() {
        for gain in [0.05, 0.3, 0.5, 0.6931471805599453] {
            let x = split_prob_for_gain(gain).unwrap();
            let h2 = -x * x.ln() - (1.0 - x) * (1.0 - x).ln();
            assert!((h2 - gain).abs() < 1e-9, "gain {gain}: H2({x})={h2}");
        }
        assert!(split_prob_for_gain(0.0).is_err());
        assert!(split_prob_for_gain(0.8).is_err());
    }

    #[test]
    fn taxonomy_space_contains_planted_rule() {
        let spec = EnvironmentSpec::taxonomy(
            "t",
            TaxonomyParams {
                rule: Rule::Blind1 {
                    win: ActionKey::Select,
                },
                decoys: vec![
                    Rule::Blind1 { win: ActionKey::Up },
                    Rule::ProbeGated { coords: None },
                ],
                seed: 7,
            },
        )
        .unwrap();
        assert_eq!(spec.hypothesis_space().len(), 3);
        assert!(spec
            .hypothesis_ids()
            .any(|h| h.as_str() == "blind:select"));
    }

    #[test]
    fn toml_round_trip() {
        let spec = EnvironmentSpec::taxonomy(
            "g07",
            TaxonomyParams {
                rule: Rule::Repeated {
                    key: ActionKey::Up,
                    count: 50,
                },
                decoys: vec![Rule::Blind1 { win: ActionKey::Up }],
                seed: 3,
            },
        )
        .unwrap()
        .with_fault(true)
        .with_human_baseline(50);
        let text = spec.to_toml_string();
        let back = EnvironmentSpec::from_toml_str(&text).unwrap();
        assert_eq!(back, spec);

        let estar = EnvironmentSpec::toy_estar("e1", 5, 100).unwrap();
        assert_eq!(
            EnvironmentSpec::from_toml_str(&estar.to_toml_string()).unwrap(),
            estar
        );
    }
}
