//! Next-frame predictors.
//!
//! A [`Predictor`] maps `k` input frames, oldest first, to a predicted next
//! frame of the same dimensions. Baselines here ignore all but the newest
//! frame.

mod convnet;

pub use convnet::{build_constructed_net, triangle, ConstructedConvNet};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::step_packed;
use crate::grid::{Boundary, Grid};
use crate::rules::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("predictor received no input frames")]
    NoInputs,
    #[error("input frames differ in shape")]
    RaggedInputs,
}

pub trait Predictor: Send + Sync {
    fn name(&self) -> &str;

    fn predict(&self, inputs: &[Grid]) -> Result<Grid, PredictError>;
}

fn newest(inputs: &[Grid]) -> Result<&Grid, PredictError> {
    let last = inputs.last().ok_or(PredictError::NoInputs)?;
    if inputs.iter().any(|g| g.dims() != last.dims()) {
        return Err(PredictError::RaggedInputs);
    }
    Ok(last)
}

/// Applies the true rule to the newest frame.
#[derive(Debug, Clone)]
pub struct OraclePredictor {
    rule: Rule,
    boundary: Boundary,
}

pub fn oracle_predictor(rule: Rule, boundary: Boundary) -> OraclePredictor {
    OraclePredictor { rule, boundary }
}

impl Predictor for OraclePredictor {
    fn name(&self) -> &str {
        "oracle"
    }

    fn predict(&self, inputs: &[Grid]) -> Result<Grid, PredictError> {
        Ok(step_packed(&self.rule, newest(inputs)?, self.boundary))
    }
}

/// Returns the newest frame unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct CopyLast;

pub fn copy_last() -> CopyLast {
    CopyLast
}

impl Predictor for CopyLast {
    fn name(&self) -> &str {
        "copy-last"
    }

    fn predict(&self, inputs: &[Grid]) -> Result<Grid, PredictError> {
        newest(inputs).cloned()
    }
}

/// Returns the cellwise complement of the newest frame.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlipAll;

pub fn flip_all() -> FlipAll {
    FlipAll
}

impl Predictor for FlipAll {
    fn name(&self) -> &str {
        "flip-all"
    }

    fn predict(&self, inputs: &[Grid]) -> Result<Grid, PredictError> {
        Ok(newest(inputs)?.complement())
    }
}

/// Predicts the majority class everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConstantMajority {
    alive: bool,
}

/// All-alive when `live_fraction >= 0.5`, all-dead otherwise.
pub fn constant_majority(live_fraction: f64) -> ConstantMajority {
    ConstantMajority {
        alive: live_fraction >= 0.5,
    }
}

impl ConstantMajority {
    pub fn predicts_alive(&self) -> bool {
        self.alive
    }
}

impl Predictor for ConstantMajority {
    fn name(&self) -> &str {
        "constant"
    }

    fn predict(&self, inputs: &[Grid]) -> Result<Grid, PredictError> {
        let g = newest(inputs)?;
        Ok(Grid::filled(g.height(), g.width(), self.alive))
    }
}

/// The constructed network paired with the boundary it pads with.
#[derive(Debug, Clone)]
pub struct ConvNetPredictor {
    net: ConstructedConvNet,
    boundary: Boundary,
}

impl ConvNetPredictor {
    pub fn new(rule: &Rule, boundary: Boundary) -> Self {
        Self {
            net: build_constructed_net(rule),
            boundary,
        }
    }

    pub fn net(&self) -> &ConstructedConvNet {
        &self.net
    }
}

impl Predictor for ConvNetPredictor {
    fn name(&self) -> &str {
        "convnet"
    }

    fn predict(&self, inputs: &[Grid]) -> Result<Grid, PredictError> {
        Ok(self.net.forward_with(newest(inputs)?, self.boundary))
    }
}

/// Predictor names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorKind {
    Oracle,
    CopyLast,
    FlipAll,
    Constant,
    ConvNet,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 5] = [
        PredictorKind::Oracle,
        PredictorKind::CopyLast,
        PredictorKind::FlipAll,
        PredictorKind::Constant,
        PredictorKind::ConvNet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PredictorKind::Oracle => "oracle",
            PredictorKind::CopyLast => "copy-last",
            PredictorKind::FlipAll => "flip-all",
            PredictorKind::Constant => "constant",
            PredictorKind::ConvNet => "convnet",
        }
    }

    /// Whether the predictor needs the generating rule.
    pub fn needs_rule(self) -> bool {
        matches!(self, PredictorKind::Oracle | PredictorKind::ConvNet)
    }

    /// Instantiates the predictor for one rule. `live_fraction` feeds the
    /// constant predictor and is ignored by the others.
    pub fn instantiate(self, rule: &Rule, boundary: Boundary, live_fraction: f64) -> Box<dyn Predictor> {
        match self {
            PredictorKind::Oracle => Box::new(oracle_predictor(rule.clone(), boundary)),
            PredictorKind::CopyLast => Box::new(CopyLast),
            PredictorKind::FlipAll => Box::new(FlipAll),
            PredictorKind::Constant => Box::new(constant_majority(live_fraction)),
            PredictorKind::ConvNet => Box::new(ConvNetPredictor::new(rule, boundary)),
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredictorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PredictorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                format!("unknown predictor `{s}` (expected oracle|copy-last|flip-all|constant|convnet)")
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, step};
    use crate::rules::sample_rules;

    fn agreement(a: &Grid, b: &Grid) -> f64 {
        let same = a.cells().iter().zip(b.cells()).filter(|(x, y)| x == y).count();
        same as f64 / a.len() as f64
    }

    #[test]
    fn oracle_reads_only_last_frame() {
        let rule = Rule::game_of_life();
        let g = Grid::random(10, 10, 0.5, 1);
        let p = oracle_predictor(rule.clone(), Boundary::Dead);
        assert_eq!(p.predict(std::slice::from_ref(&g)).unwrap(), step(&rule, &g, Boundary::Dead));
        let noise = Grid::random(10, 10, 0.5, 2);
        assert_eq!(
            p.predict(&[noise, g.clone()]).unwrap(),
            step(&rule, &g, Boundary::Dead)
        );
    }

    #[test]
    fn oracle_for_wrong_rule_is_imperfect() {
        let rules = sample_rules(2, 1, 77).unwrap().rules;
        let g = Grid::random(32, 32, 0.5, 5);
        let truth = step(&rules[0], &g, Boundary::Dead);
        let wrong = oracle_predictor(rules[1].clone(), Boundary::Dead)
            .predict(&[g])
            .unwrap();
        assert!(agreement(&wrong, &truth) < 1.0);
    }

    #[test]
    fn copy_last_is_exact_on_fixed_points() {
        let block = Grid::from_rows(&["....", ".##.", ".##.", "...."]);
        let next = step(&Rule::game_of_life(), &block, Boundary::Dead);
        assert_eq!(CopyLast.predict(&[block]).unwrap(), next);
    }

    #[test]
    fn flip_all_tracks_alternating_rule_away_from_isolated_cells() {
        let rule = Rule::parse("B1,2,3,4,5,6,7,8/S").unwrap();
        let t = simulate(&rule, &Grid::random(16, 16, 0.5, 8), 6, Boundary::Toroidal);
        for pair in t.states.windows(2) {
            let predicted = FlipAll.predict(&pair[..1]).unwrap();
            let counts = crate::engine::neighbor_counts(&pair[0], 1, Boundary::Toroidal);
            for r in 0..16 {
                for c in 0..16 {
                    if pair[0].get(r, c) || counts[r * 16 + c] >= 1 {
                        assert_eq!(predicted.get(r, c), pair[1].get(r, c));
                    }
                }
            }
        }
    }

    #[test]
    fn constant_threshold() {
        let g = Grid::random(5, 5, 0.5, 1);
        assert_eq!(
            constant_majority(0.49).predict(std::slice::from_ref(&g)).unwrap(),
            Grid::new(5, 5)
        );
        assert_eq!(
            constant_majority(0.5).predict(&[g]).unwrap(),
            Grid::filled(5, 5, true)
        );
    }

    #[test]
    fn empty_input_is_an_error() {
        for kind in PredictorKind::ALL {
            let p = kind.instantiate(&Rule::game_of_life(), Boundary::Dead, 0.3);
            assert_eq!(p.predict(&[]).unwrap_err(), PredictError::NoInputs);
            assert_eq!(p.name(), kind.as_str());
            assert_eq!(kind.as_str().parse::<PredictorKind>().unwrap(), kind);
        }
    }

    #[test]
    fn predictors_preserve_shape_and_binarity() {
        let rule = sample_rules(1, 2, 3).unwrap().rules.remove(0);
        for seed in 0..10u64 {
            let h = 1 + (seed as usize * 7) % 19;
            let w = 1 + (seed as usize * 5) % 23;
            let frames: Vec<Grid> = (0..3).map(|i| Grid::random(h, w, 0.5, seed * 10 + i)).collect();
            for kind in PredictorKind::ALL {
                for boundary in [Boundary::Dead, Boundary::Toroidal] {
                    let out = kind.instantiate(&rule, boundary, 0.7).predict(&frames).unwrap();
                    assert_eq!(out.dims(), (h, w));
                    assert!(out.cells().iter().all(|&c| c <= 1));
                }
            }
        }
    }
}
