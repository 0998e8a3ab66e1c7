//! Born/Stay cellular automaton rule space: rule sampling, exact and
//! bit-packed simulation, generalization datasets, rule inference, and
//! predictor evaluation.

pub mod dataset;
pub mod engine;
pub mod eval;
pub mod grid;
pub mod inference;
pub mod io;
pub mod predictors;
pub mod rules;

pub use dataset::{Dataset, DatasetSpec, Level, Sample, Split};
pub use engine::{simulate, step, step_packed, Trajectory};
pub use eval::{evaluate, EvalOptions, EvalReport};
pub use grid::{Boundary, Grid, ShapeError};
pub use inference::{infer_rule, IdentifiabilityReport, RuleConstraints};
pub use predictors::{Predictor, PredictorKind};
pub use rules::{Rule, RuleError, RuleSet};
