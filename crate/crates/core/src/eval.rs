//! Cell-wise scoring of predictors against dataset targets.
//!
//! All accuracies are kept as integer (correct, total) tallies and divided
//! only when reported, so results do not depend on reduction order.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::Sample;
use crate::grid::{Boundary, Grid, ShapeError};
use crate::io::capr::{self, PredictionFile};
use crate::predictors::{constant_majority, copy_last, flip_all, PredictError, Predictor, PredictorKind};
use crate::rules::RuleSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("sample {index}: predictor failed: {source}")]
    Predict { index: usize, source: PredictError },
    #[error("sample {index}: prediction violates the predictor contract: {source}")]
    Contract { index: usize, source: ShapeError },
    #[error("sample {index}: rule id {rule_id} is not in the rule set")]
    UnknownRule { index: usize, rule_id: u32 },
    #[error("prediction file does not match the split at byte {offset}: {reason}")]
    PredictionFile { offset: u64, reason: String },
}

/// Integer (correct, total) cell tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub correct: u64,
    pub total: u64,
}

impl Tally {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    fn add(&mut self, other: Tally) {
        self.correct += other.correct;
        self.total += other.total;
    }
}

fn compare(predicted: &Grid, target: &Grid) -> Result<Tally, ShapeError> {
    target.check_same_shape(predicted)?;
    let correct = predicted
        .cells()
        .iter()
        .zip(target.cells())
        .filter(|(p, t)| p == t)
        .count() as u64;
    Ok(Tally {
        correct,
        total: target.len() as u64,
    })
}

/// Fraction of cells where `predicted` agrees with `target`.
pub fn accuracy(predicted: &Grid, target: &Grid) -> Result<f64, ShapeError> {
    compare(predicted, target).map(|t| t.accuracy())
}

/// Cellwise XOR; 1 marks a misprediction.
pub fn error_map(predicted: &Grid, target: &Grid) -> Result<Grid, ShapeError> {
    target.check_same_shape(predicted)?;
    let cells = predicted
        .cells()
        .iter()
        .zip(target.cells())
        .map(|(p, t)| p ^ t)
        .collect();
    Ok(Grid::from_cells(target.height(), target.width(), cells).expect("same shape"))
}

/// Supplies a prediction for each sample of a split.
pub trait PredictionSource: Sync {
    fn name(&self) -> String;

    fn predict_sample(&self, index: usize, sample: &Sample) -> Result<Grid, PredictError>;
}

/// One predictor applied to every sample.
pub struct Uniform<P>(pub P);

impl<P: Predictor> PredictionSource for Uniform<P> {
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn predict_sample(&self, _index: usize, sample: &Sample) -> Result<Grid, PredictError> {
        self.0.predict(&sample.inputs)
    }
}

/// One predictor per rule id, e.g. oracles or constructed nets.
pub struct PerRule {
    name: String,
    predictors: Vec<Box<dyn Predictor>>,
}

impl PerRule {
    pub fn new(kind: PredictorKind, rules: &RuleSet, boundary: Boundary, live_fraction: f64) -> Self {
        Self {
            name: kind.as_str().to_string(),
            predictors: rules
                .rules
                .iter()
                .map(|r| kind.instantiate(r, boundary, live_fraction))
                .collect(),
        }
    }
}

impl PredictionSource for PerRule {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn predict_sample(&self, _index: usize, sample: &Sample) -> Result<Grid, PredictError> {
        // rule ids are checked by `evaluate` before this is called
        self.predictors[sample.rule_id as usize].predict(&sample.inputs)
    }
}

/// Precomputed frames, one per sample in split order.
pub struct FramePredictions<'a> {
    pub name: String,
    pub frames: &'a [Grid],
}

impl PredictionSource for FramePredictions<'_> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn predict_sample(&self, index: usize, _sample: &Sample) -> Result<Grid, PredictError> {
        self.frames.get(index).cloned().ok_or(PredictError::NoInputs)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Also score constant-majority, copy-last and flip-all on the split.
    pub baselines: bool,
    /// Keep one error map per sample.
    pub error_maps: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleScore {
    pub radius: u32,
    pub cells: Tally,
    pub samples: u64,
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        Self {
            mean,
            std: var.sqrt(),
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub predictor: String,
    pub samples: usize,
    pub overall: Tally,
    pub per_rule: BTreeMap<u32, RuleScore>,
    pub per_radius: BTreeMap<u32, Tally>,
    /// Spread of per-sample accuracies.
    pub sample_spread: Spread,
    /// Spread of per-rule accuracies.
    pub rule_spread: Spread,
    pub baselines: BTreeMap<String, Tally>,
    /// Fraction of live cells among the targets.
    pub target_live_fraction: f64,
    pub error_maps: Option<Vec<Grid>>,
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        self.overall.accuracy()
    }

    /// Text table: overall, per radius, spreads and baselines.
    pub fn to_table(&self, per_rule: bool, rules: Option<&RuleSet>) -> String {
        let mut out = String::new();
        let pct = |t: &Tally| format!("{:>6.2}%", 100.0 * t.accuracy());
        let _ = writeln!(out, "predictor        {}", self.predictor);
        let _ = writeln!(out, "samples          {}", self.samples);
        let _ = writeln!(out, "cells            {}", self.overall.total);
        let _ = writeln!(out, "accuracy         {}", pct(&self.overall));
        let _ = writeln!(
            out,
            "per-sample       {:.2} ± {:.2}%",
            100.0 * self.sample_spread.mean,
            100.0 * self.sample_spread.std
        );
        let _ = writeln!(
            out,
            "per-rule         {:.2} ± {:.2}%",
            100.0 * self.rule_spread.mean,
            100.0 * self.rule_spread.std
        );
        for (radius, tally) in &self.per_radius {
            let side = 2 * radius + 1;
            let _ = writeln!(out, "  {side}x{side}{:<10} {}", "", pct(tally));
        }
        if !self.baselines.is_empty() {
            let _ = writeln!(out, "baselines");
            for (name, tally) in &self.baselines {
                let _ = writeln!(out, "  {name:<14} {}", pct(tally));
            }
        }
        if per_rule {
            let _ = writeln!(out, "per rule");
            for (id, score) in &self.per_rule {
                let notation = rules
                    .and_then(|r| r.get(*id))
                    .map(|r| r.notation())
                    .unwrap_or_default();
                let _ = writeln!(out, "  {id:>5} {} {notation}", pct(&score.cells));
            }
        }
        out
    }

    /// Machine-readable `key=value` lines.
    pub fn to_key_values(&self, per_rule: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "predictor={}", self.predictor);
        let _ = writeln!(out, "samples={}", self.samples);
        let _ = writeln!(out, "correct={}", self.overall.correct);
        let _ = writeln!(out, "total={}", self.overall.total);
        let _ = writeln!(out, "accuracy={:.6}", self.overall.accuracy());
        let _ = writeln!(out, "target_live_fraction={:.6}", self.target_live_fraction);
        let _ = writeln!(out, "sample_mean={:.6}", self.sample_spread.mean);
        let _ = writeln!(out, "sample_std={:.6}", self.sample_spread.std);
        let _ = writeln!(out, "rule_mean={:.6}", self.rule_spread.mean);
        let _ = writeln!(out, "rule_std={:.6}", self.rule_spread.std);
        for (radius, t) in &self.per_radius {
            let _ = writeln!(out, "radius.{radius}.accuracy={:.6}", t.accuracy());
            let _ = writeln!(out, "radius.{radius}.correct={}", t.correct);
            let _ = writeln!(out, "radius.{radius}.total={}", t.total);
        }
        for (name, t) in &self.baselines {
            let _ = writeln!(out, "baseline.{name}={:.6}", t.accuracy());
        }
        if per_rule {
            for (id, s) in &self.per_rule {
                let _ = writeln!(out, "rule.{id}.radius={}", s.radius);
                let _ = writeln!(out, "rule.{id}.samples={}", s.samples);
                let _ = writeln!(out, "rule.{id}.accuracy={:.6}", s.cells.accuracy());
            }
        }
        out
    }

    /// Per-rule CSV table.
    pub fn to_csv(&self, rules: Option<&RuleSet>) -> String {
        let mut out = String::from("rule_id,radius,notation,samples,correct,total,accuracy\n");
        for (id, s) in &self.per_rule {
            let notation = rules
                .and_then(|r| r.get(*id))
                .map(|r| r.notation())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{id},{},{notation},{},{},{},{:.6}",
                s.radius,
                s.samples,
                s.cells.correct,
                s.cells.total,
                s.cells.accuracy()
            );
        }
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table(false, None))
    }
}

fn score<S: PredictionSource + ?Sized>(
    source: &S,
    samples: &[Sample],
    rules: &RuleSet,
    keep_maps: bool,
) -> Result<Vec<(Tally, Option<Grid>)>, EvalError> {
    samples
        .par_iter()
        .enumerate()
        .map(|(index, sample)| {
            if rules.get(sample.rule_id).is_none() {
                return Err(EvalError::UnknownRule {
                    index,
                    rule_id: sample.rule_id,
                });
            }
            let predicted = source
                .predict_sample(index, sample)
                .map_err(|source| EvalError::Predict { index, source })?;
            let tally = compare(&predicted, &sample.target)
                .map_err(|source| EvalError::Contract { index, source })?;
            let map = keep_maps.then(|| error_map(&predicted, &sample.target).expect("shape checked"));
            Ok((tally, map))
        })
        .collect()
}

/// Scores `source` on `samples`, whose rule ids index into `rules`.
pub fn evaluate<S: PredictionSource + ?Sized>(
    source: &S,
    samples: &[Sample],
    rules: &RuleSet,
    options: EvalOptions,
) -> Result<EvalReport, EvalError> {
    let scored = score(source, samples, rules, options.error_maps)?;

    let mut overall = Tally::default();
    let mut per_rule: BTreeMap<u32, RuleScore> = BTreeMap::new();
    let mut per_radius: BTreeMap<u32, Tally> = BTreeMap::new();
    for (sample, (tally, _)) in samples.iter().zip(&scored) {
        let radius = rules.get(sample.rule_id).expect("checked").radius();
        overall.add(*tally);
        let entry = per_rule.entry(sample.rule_id).or_insert(RuleScore {
            radius,
            ..RuleScore::default()
        });
        entry.cells.add(*tally);
        entry.samples += 1;
        per_radius.entry(radius).or_default().add(*tally);
    }

    let live: u64 = samples.iter().map(|s| s.target.live_count() as u64).sum();
    let target_live_fraction = if overall.total == 0 {
        0.0
    } else {
        live as f64 / overall.total as f64
    };

    let mut baselines = BTreeMap::new();
    if options.baselines {
        let plain = EvalOptions::default();
        let constant = evaluate(
            &Uniform(constant_majority(target_live_fraction)),
            samples,
            rules,
            plain,
        )?;
        baselines.insert("constant".to_string(), constant.overall);
        let copy = evaluate(&Uniform(copy_last()), samples, rules, plain)?;
        baselines.insert("copy-last".to_string(), copy.overall);
        let flip = evaluate(&Uniform(flip_all()), samples, rules, plain)?;
        baselines.insert("flip-all".to_string(), flip.overall);
    }

    let sample_spread = Spread::of(scored.iter().map(|(t, _)| t.accuracy()));
    let rule_spread = Spread::of(per_rule.values().map(|s| s.cells.accuracy()));
    let error_maps = options.error_maps.then(|| {
        scored
            .into_iter()
            .map(|(_, m)| m.expect("maps requested"))
            .collect()
    });

    Ok(EvalReport {
        predictor: source.name(),
        samples: samples.len(),
        overall,
        per_rule,
        per_radius,
        sample_spread,
        rule_spread,
        baselines,
        target_live_fraction,
        error_maps,
    })
}

/// Scores a prediction file whose frames follow the split's sample order.
pub fn score_prediction_file(
    file: &PredictionFile,
    samples: &[Sample],
    rules: &RuleSet,
    options: EvalOptions,
) -> Result<EvalReport, EvalError> {
    if file.len() != samples.len() {
        return Err(EvalError::PredictionFile {
            offset: capr::COUNT_OFFSET,
            reason: format!("{} frames for {} samples", file.len(), samples.len()),
        });
    }
    if let Some(first) = samples.first() {
        let (h, w) = first.target.dims();
        if file.height != h {
            return Err(EvalError::PredictionFile {
                offset: capr::HEIGHT_OFFSET,
                reason: format!("frame height {} but targets are {h} high", file.height),
            });
        }
        if file.width != w {
            return Err(EvalError::PredictionFile {
                offset: capr::WIDTH_OFFSET,
                reason: format!("frame width {} but targets are {w} wide", file.width),
            });
        }
    }
    let frames = file.to_grids();
    let source = FramePredictions {
        name: "predictions".to_string(),
        frames: &frames,
    };
    evaluate(&source, samples, rules, options)
}
