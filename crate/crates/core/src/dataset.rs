//! Generalization datasets: rule sets per level, trajectories per rule and
//! split, sliced into (k inputs → next frame) samples.
//!
//! | level  | train radii | test radii | test rules        |
//! |--------|-------------|------------|-------------------|
//! | simple | 1           | 1          | same as train     |
//! | l1     | 1, 2, 3     | 1, 2, 3    | same as train     |
//! | l2     | 1, 2, 3     | 1, 2, 3    | disjoint from train |
//! | l3x    | 1, 2, 3     | 4          | new               |
//! | l3i    | 1, 2, 4     | 3          | new               |
//!
//! Every trajectory draws its initial configuration from its own RNG stream
//! keyed by (config seed, split, rule id, config index), so output does not
//! depend on how work is scheduled across threads.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{simulate, step_packed, Trajectory};
use crate::grid::{Boundary, Grid};
use crate::rules::{sample_rules, sample_rules_excluding, Rule, RuleError, RuleSet};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid dataset spec: {0}")]
    Spec(String),
    #[error("trajectory has {steps} steps but k = {k} needs at least k")]
    InsufficientLength { steps: usize, k: usize },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Simple,
    Level1,
    Level2,
    Level3Extrapolation,
    Level3Interpolation,
}

impl Level {
    pub const ALL: [Level; 5] = [
        Level::Simple,
        Level::Level1,
        Level::Level2,
        Level::Level3Extrapolation,
        Level::Level3Interpolation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Simple => "simple",
            Level::Level1 => "level1",
            Level::Level2 => "level2",
            Level::Level3Extrapolation => "level3_extrapolation",
            Level::Level3Interpolation => "level3_interpolation",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Level::Simple => "simple",
            Level::Level1 => "l1",
            Level::Level2 => "l2",
            Level::Level3Extrapolation => "l3x",
            Level::Level3Interpolation => "l3i",
        }
    }

    pub fn train_radii(self) -> &'static [u32] {
        match self {
            Level::Simple => &[1],
            Level::Level1 | Level::Level2 | Level::Level3Extrapolation => &[1, 2, 3],
            Level::Level3Interpolation => &[1, 2, 4],
        }
    }

    pub fn test_radii(self) -> &'static [u32] {
        match self {
            Level::Simple => &[1],
            Level::Level1 | Level::Level2 => &[1, 2, 3],
            Level::Level3Extrapolation => &[4],
            Level::Level3Interpolation => &[3],
        }
    }

    /// Whether the test split is generated from the training rules.
    pub fn tests_on_train_rules(self) -> bool {
        matches!(self, Level::Simple | Level::Level1)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .into_iter()
            .find(|l| l.as_str() == s || l.short_name() == s)
            .ok_or_else(|| format!("unknown level `{s}` (expected simple|l1|l2|l3x|l3i)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    fn stream_tag(self) -> u64 {
        match self {
            Split::Train => 0x7472_6169_6e00_0001,
            Split::Val => 0x7661_6c00_0000_0002,
            Split::Test => 0x7465_7374_0000_0003,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" | "validation" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}` (expected train|val|test)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub level: Level,
    pub grid_height: usize,
    pub grid_width: usize,
    /// Input window length.
    pub k: usize,
    pub steps_per_trajectory: usize,
    pub configs_per_rule: SplitCounts,
    /// Initial live-cell probability.
    pub density: f64,
    pub boundary: Boundary,
    pub master_seed: u64,
    /// Training rules, spread evenly over the level's train radii.
    pub train_rules: usize,
    /// Unseen test rules for levels 2 and 3.
    pub test_rules: usize,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            level: Level::Simple,
            grid_height: 32,
            grid_width: 32,
            k: 3,
            steps_per_trajectory: 12,
            configs_per_rule: SplitCounts {
                train: 4,
                val: 1,
                test: 2,
            },
            density: 0.5,
            boundary: Boundary::Dead,
            master_seed: 0,
            train_rules: 300,
            test_rules: 30,
        }
    }
}

impl DatasetSpec {
    pub fn for_level(level: Level) -> Self {
        Self {
            level,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |msg: String| Err(DatasetError::Spec(msg));
        if self.grid_height == 0 || self.grid_width == 0 {
            return fail("grid dimensions must be positive".into());
        }
        if self.grid_height > u32::MAX as usize || self.grid_width > u32::MAX as usize {
            return fail("grid dimensions must fit in 32 bits".into());
        }
        if self.k == 0 || self.k > u8::MAX as usize {
            return fail(format!("k = {} must be in 1..=255", self.k));
        }
        if self.steps_per_trajectory < self.k {
            return fail(format!(
                "steps_per_trajectory = {} must be at least k = {}",
                self.steps_per_trajectory, self.k
            ));
        }
        if !(self.density > 0.0 && self.density < 1.0) {
            return fail(format!(
                "density = {} must lie strictly between 0 and 1",
                self.density
            ));
        }
        if self.train_rules < self.level.train_radii().len() {
            return fail(format!(
                "train_rules = {} leaves some of the radii {:?} without rules",
                self.train_rules,
                self.level.train_radii()
            ));
        }
        if !self.level.tests_on_train_rules() && self.test_rules < self.level.test_radii().len() {
            return fail(format!(
                "test_rules = {} leaves some of the radii {:?} without rules",
                self.test_rules,
                self.level.test_radii()
            ));
        }
        Ok(())
    }

    /// Flat `key = value` text, one entry per line.
    pub fn to_config_string(&self) -> String {
        format!(
            "level = {}\ngrid_height = {}\ngrid_width = {}\nk = {}\nsteps_per_trajectory = {}\n\
             configs_train = {}\nconfigs_val = {}\nconfigs_test = {}\ndensity = {}\nboundary = {}\n\
             master_seed = {}\ntrain_rules = {}\ntest_rules = {}\n",
            self.level.short_name(),
            self.grid_height,
            self.grid_width,
            self.k,
            self.steps_per_trajectory,
            self.configs_per_rule.train,
            self.configs_per_rule.val,
            self.configs_per_rule.test,
            self.density,
            self.boundary,
            self.master_seed,
            self.train_rules,
            self.test_rules,
        )
    }

    /// Parses config text. Missing keys keep their defaults; `#` starts a comment line.
    pub fn from_config_str(text: &str) -> Result<Self, DatasetError> {
        let mut spec = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| DatasetError::Config { line: i + 1, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = || value.parse::<usize>().map_err(|e| err(format!("{key}: {e}")));
            match key {
                "level" => spec.level = value.parse().map_err(err)?,
                "grid_height" => spec.grid_height = int()?,
                "grid_width" => spec.grid_width = int()?,
                "k" => spec.k = int()?,
                "steps_per_trajectory" => spec.steps_per_trajectory = int()?,
                "configs_train" => spec.configs_per_rule.train = int()?,
                "configs_val" => spec.configs_per_rule.val = int()?,
                "configs_test" => spec.configs_per_rule.test = int()?,
                "density" => spec.density = value.parse().map_err(|e| err(format!("density: {e}")))?,
                "boundary" => spec.boundary = value.parse().map_err(err)?,
                "master_seed" => {
                    spec.master_seed = value.parse().map_err(|e| err(format!("master_seed: {e}")))?
                }
                "train_rules" => spec.train_rules = int()?,
                "test_rules" => spec.test_rules = int()?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(spec)
    }
}

/// `k` consecutive frames and the frame that follows them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub rule_id: u32,
    /// Oldest first.
    pub inputs: Vec<Grid>,
    pub target: Grid,
}

impl Sample {
    pub fn last_input(&self) -> &Grid {
        self.inputs.last().expect("samples hold at least one input")
    }

    /// Inputs followed by the target.
    pub fn frames(&self) -> impl Iterator<Item = &Grid> {
        self.inputs.iter().chain(std::iter::once(&self.target))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub spec: DatasetSpec,
    pub train_rules: RuleSet,
    pub test_rules: RuleSet,
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
    pub test: Vec<Sample>,
}

impl Dataset {
    pub fn samples(&self, split: Split) -> &[Sample] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    pub fn samples_mut(&mut self, split: Split) -> &mut Vec<Sample> {
        match split {
            Split::Train => &mut self.train,
            Split::Val => &mut self.val,
            Split::Test => &mut self.test,
        }
    }

    /// Rules referenced by `rule_id` in the given split.
    pub fn rules(&self, split: Split) -> &RuleSet {
        match split {
            Split::Train | Split::Val => &self.train_rules,
            Split::Test => &self.test_rules,
        }
    }
}

/// Build-time statistics that are not part of the stored dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub trajectories: usize,
    /// Trajectories whose state at t = k is all dead or all alive.
    pub uniform_by_k: usize,
}

impl BuildStats {
    pub fn uniform_fraction(&self) -> f64 {
        if self.trajectories == 0 {
            0.0
        } else {
            self.uniform_by_k as f64 / self.trajectories as f64
        }
    }
}

/// Cells alive independently with probability `density`.
pub fn sample_initial(height: usize, width: usize, density: f64, seed: u64) -> Grid {
    Grid::random(height, width, density, seed)
}

/// Sliding windows of stride 1: `inputs = states[t..t+k]`, `target = states[t+k]`.
pub fn slice_trajectory(
    trajectory: &Trajectory,
    k: usize,
    rule_id: u32,
) -> Result<Vec<Sample>, DatasetError> {
    let steps = trajectory.steps();
    if k == 0 || steps < k {
        return Err(DatasetError::InsufficientLength { steps, k });
    }
    Ok(trajectory
        .states
        .windows(k + 1)
        .map(|w| Sample {
            rule_id,
            inputs: w[..k].to_vec(),
            target: w[k].clone(),
        })
        .collect())
}

/// SplitMix64 finalizer folded over `parts`; used to key RNG substreams.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        state = state.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    }
    state
}

/// Splits `total` as evenly as possible, earlier parts taking the remainder.
fn spread(total: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| total / parts + usize::from(i < total % parts))
        .collect()
}

const TRAIN_RULES_TAG: u64 = 1;
const TEST_RULES_TAG: u64 = 2;

fn rule_sets(spec: &DatasetSpec, rule_seed: u64) -> Result<(RuleSet, RuleSet), DatasetError> {
    let level = spec.level;
    let mut train = Vec::with_capacity(spec.train_rules);
    let radii = level.train_radii();
    for (&radius, count) in radii.iter().zip(spread(spec.train_rules, radii.len())) {
        let seed = derive_seed(&[rule_seed, TRAIN_RULES_TAG, u64::from(radius)]);
        train.extend(sample_rules(count, radius, seed)?.rules);
    }
    let train = RuleSet::new("train", train);

    let test = if level.tests_on_train_rules() {
        RuleSet::new("test", train.rules.clone())
    } else {
        let mut test = Vec::with_capacity(spec.test_rules);
        let radii = level.test_radii();
        for (&radius, count) in radii.iter().zip(spread(spec.test_rules, radii.len())) {
            let seed = derive_seed(&[rule_seed, TEST_RULES_TAG, u64::from(radius)]);
            test.extend(sample_rules_excluding(count, radius, seed, &train.rules)?.rules);
        }
        RuleSet::new("test", test)
    };
    Ok((train, test))
}

struct Job<'a> {
    split: Split,
    rule_id: u32,
    rule: &'a Rule,
    config: usize,
}

/// Builds all three splits on the current rayon pool.
pub fn build(spec: &DatasetSpec, rule_seed: u64, config_seed: u64) -> Result<Dataset, DatasetError> {
    build_with_stats(spec, rule_seed, config_seed).map(|(d, _)| d)
}

/// Builds on a dedicated pool of `workers` threads.
pub fn build_with_workers(
    spec: &DatasetSpec,
    rule_seed: u64,
    config_seed: u64,
    workers: usize,
) -> Result<(Dataset, BuildStats), DatasetError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| DatasetError::Spec(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| build_with_stats(spec, rule_seed, config_seed))
}

pub fn build_with_stats(
    spec: &DatasetSpec,
    rule_seed: u64,
    config_seed: u64,
) -> Result<(Dataset, BuildStats), DatasetError> {
    spec.validate()?;
    let (train_rules, test_rules) = rule_sets(spec, rule_seed)?;

    let mut jobs = Vec::new();
    for split in Split::ALL {
        let rules = if split == Split::Test {
            &test_rules
        } else {
            &train_rules
        };
        for (rule_id, rule) in rules.rules.iter().enumerate() {
            for config in 0..spec.configs_per_rule.get(split) {
                jobs.push(Job {
                    split,
                    rule_id: rule_id as u32,
                    rule,
                    config,
                });
            }
        }
    }

    let results: Vec<(Split, Vec<Sample>, bool)> = jobs
        .par_iter()
        .map(|job| {
            let seed = derive_seed(&[
                config_seed,
                job.split.stream_tag(),
                u64::from(job.rule_id),
                job.config as u64,
            ]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let initial = Grid::random_with(spec.grid_height, spec.grid_width, spec.density, &mut rng);
            let trajectory = simulate(job.rule, &initial, spec.steps_per_trajectory, spec.boundary);
            let uniform = trajectory.states[spec.k].is_uniform();
            let samples = slice_trajectory(&trajectory, spec.k, job.rule_id)
                .expect("validated steps_per_trajectory >= k");
            (job.split, samples, uniform)
        })
        .collect();

    let mut dataset = Dataset {
        spec: spec.clone(),
        train_rules,
        test_rules,
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    let mut stats = BuildStats::default();
    for (split, samples, uniform) in results {
        stats.trajectories += 1;
        stats.uniform_by_k += usize::from(uniform);
        dataset.samples_mut(split).extend(samples);
    }
    Ok((dataset, stats))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    /// Samples whose target is not the successor of their last input.
    pub target_mismatches: Vec<(Split, usize)>,
    /// Samples whose input frames are not consecutive states.
    pub window_mismatches: Vec<(Split, usize)>,
    /// Samples with a bad rule id, wrong frame count or wrong frame shape.
    pub malformed: Vec<(Split, usize)>,
    pub train_radii: BTreeSet<u32>,
    pub test_radii: BTreeSet<u32>,
    pub radii_match_level: bool,
    /// `None` for levels that test on their training rules.
    pub rules_disjoint: Option<bool>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.target_mismatches.is_empty()
            && self.window_mismatches.is_empty()
            && self.malformed.is_empty()
            && self.radii_match_level
            && self.rules_disjoint != Some(false)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target mismatches: {}", self.target_mismatches.len())?;
        writeln!(f, "window mismatches: {}", self.window_mismatches.len())?;
        writeln!(f, "malformed samples: {}", self.malformed.len())?;
        writeln!(f, "train radii: {:?}", self.train_radii)?;
        writeln!(f, "test radii: {:?}", self.test_radii)?;
        writeln!(f, "radii match level: {}", self.radii_match_level)?;
        match self.rules_disjoint {
            Some(d) => write!(f, "test rules disjoint from train: {d}"),
            None => write!(f, "test rules disjoint from train: n/a"),
        }
    }
}

/// Re-simulates every sample and checks split composition.
pub fn verify(dataset: &Dataset) -> VerifyReport {
    let spec = &dataset.spec;
    let boundary = spec.boundary;
    let dims = (spec.grid_height, spec.grid_width);
    let mut report = VerifyReport::default();

    for split in Split::ALL {
        let rules = dataset.rules(split);
        let checked: Vec<(usize, Option<(bool, bool)>)> = dataset
            .samples(split)
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let rule = match rules.get(s.rule_id) {
                    Some(r) if s.inputs.len() == spec.k && s.frames().all(|g| g.dims() == dims) => r,
                    _ => return (i, None),
                };
                let target_ok = step_packed(rule, s.last_input(), boundary) == s.target;
                let window_ok = s
                    .inputs
                    .windows(2)
                    .all(|w| step_packed(rule, &w[0], boundary) == w[1]);
                (i, Some((target_ok, window_ok)))
            })
            .collect();
        for (i, outcome) in checked {
            match outcome {
                None => report.malformed.push((split, i)),
                Some((target_ok, window_ok)) => {
                    if !target_ok {
                        report.target_mismatches.push((split, i));
                    }
                    if !window_ok {
                        report.window_mismatches.push((split, i));
                    }
                }
            }
        }
    }

    report.train_radii = dataset.train_rules.radii();
    report.test_radii = dataset.test_rules.radii();
    let level = spec.level;
    report.radii_match_level =
        report.train_radii.iter().eq(level.train_radii()) && report.test_radii.iter().eq(level.test_radii());
    if !level.tests_on_train_rules() {
        let train: BTreeSet<String> = dataset.train_rules.rules.iter().map(Rule::notation).collect();
        report.rules_disjoint = Some(
            dataset
                .test_rules
                .rules
                .iter()
                .all(|r| !train.contains(&r.notation())),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(level: Level) -> DatasetSpec {
        DatasetSpec {
            level,
            grid_height: 12,
            grid_width: 10,
            steps_per_trajectory: 5,
            train_rules: 9,
            test_rules: 6,
            configs_per_rule: SplitCounts {
                train: 2,
                val: 1,
                test: 1,
            },
            ..DatasetSpec::default()
        }
    }

    #[test]
    fn slicing_counts() {
        let t = simulate(
            &Rule::game_of_life(),
            &Grid::random(8, 8, 0.5, 1),
            10,
            Boundary::Dead,
        );
        assert_eq!(slice_trajectory(&t, 4, 0).unwrap().len(), 7);
        assert_eq!(slice_trajectory(&t, 10, 0).unwrap().len(), 1);
        assert!(matches!(
            slice_trajectory(&t, 11, 0),
            Err(DatasetError::InsufficientLength { steps: 10, k: 11 })
        ));
        for s in slice_trajectory(&t, 3, 0).unwrap() {
            assert_eq!(step_packed(&t.rule, s.last_input(), Boundary::Dead), s.target);
        }
    }

    #[test]
    fn level_names() {
        for level in Level::ALL {
            assert_eq!(level.short_name().parse::<Level>().unwrap(), level);
            assert_eq!(level.as_str().parse::<Level>().unwrap(), level);
        }
    }

    #[test]
    fn config_round_trip() {
        let spec = DatasetSpec {
            level: Level::Level3Interpolation,
            density: 0.35,
            boundary: Boundary::Toroidal,
            master_seed: 99,
            ..DatasetSpec::default()
        };
        assert_eq!(
            DatasetSpec::from_config_str(&spec.to_config_string()).unwrap(),
            spec
        );
    }

    #[test]
    fn config_errors_name_the_line() {
        let err = DatasetSpec::from_config_str("# c\nk = 3\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, DatasetError::Config { line: 3, .. }));
        assert!(DatasetSpec::from_config_str("k 3").is_err());
        assert!(DatasetSpec::from_config_str("k = x").is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = DatasetSpec {
            steps_per_trajectory: 2,
            ..DatasetSpec::default()
        };
        assert!(spec.validate().is_err());
        spec = DatasetSpec::default();
        spec.density = 1.0;
        assert!(spec.validate().is_err());
        spec = DatasetSpec::for_level(Level::Level1);
        spec.train_rules = 2;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn simple_level_shares_rules() {
        let d = build(&small(Level::Simple), 1, 2).unwrap();
        assert_eq!(d.train_rules.rules, d.test_rules.rules);
        assert!(d.train_rules.rules.iter().all(|r| r.radius() == 1));
        // 9 rules x 2 configs x (5 - 3 + 1) windows
        assert_eq!(d.train.len(), 9 * 2 * 3);
        assert_eq!(d.val.len(), 9 * 3);
        assert!(verify(&d).is_ok());
        let first_inputs: Vec<&Grid> = d.train.iter().step_by(3).map(|s| &s.inputs[0]).collect();
        for s in d.val.iter().chain(&d.test).step_by(3) {
            assert!(!first_inputs.contains(&&s.inputs[0]));
        }
    }

    #[test]
    fn level_two_rules_are_disjoint() {
        let d = build(&small(Level::Level2), 3, 4).unwrap();
        let report = verify(&d);
        assert_eq!(report.rules_disjoint, Some(true));
        assert_eq!(report.test_radii, BTreeSet::from([1, 2, 3]));
        assert!(report.is_ok());
    }

    #[test]
    fn level_three_radii() {
        let d = build(&small(Level::Level3Extrapolation), 3, 4).unwrap();
        assert!(d
            .test
            .iter()
            .all(|s| d.test_rules.rules[s.rule_id as usize].radius() == 4));
        let d = build(&small(Level::Level3Interpolation), 3, 4).unwrap();
        let report = verify(&d);
        assert_eq!(report.train_radii, BTreeSet::from([1, 2, 4]));
        assert_eq!(report.test_radii, BTreeSet::from([3]));
        assert!(report.is_ok());
    }

    #[test]
    fn flipped_target_is_one_mismatch() {
        let mut d = build(&small(Level::Simple), 5, 6).unwrap();
        d.test[4].target.toggle(0, 0);
        let report = verify(&d);
        assert_eq!(report.target_mismatches, vec![(Split::Test, 4)]);
        assert!(!report.is_ok());
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let spec = small(Level::Level1);
        let (a, sa) = build_with_workers(&spec, 8, 9, 1).unwrap();
        let (b, sb) = build_with_workers(&spec, 8, 9, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert_ne!(a, build(&spec, 8, 10).unwrap());
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(derive_seed(&[1, 2]), derive_seed(&[2, 1]));
        assert_ne!(derive_seed(&[0]), derive_seed(&[0, 0]));
        assert_eq!(spread(10, 3), vec![4, 3, 3]);
    }
}
