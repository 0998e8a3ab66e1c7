//! Born/Stay transition rules over square Moore neighborhoods.
//!
//! A rule lists the living-neighbor counts at which a dead cell is born and
//! the counts at which a live cell stays alive. The canonical text form is
//! `B<counts>/S<counts> n=<side>` with comma-separated counts, e.g.
//! `B1,4,7/S2,5,10,12 n=5`. For 3×3 neighborhoods the classic digit-string
//! form (`B3/S23`) is also accepted.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("malformed rule notation near `{token}`: {reason}")]
    Parse { token: String, reason: &'static str },
    #[error("neighbor count {count} out of range for neighborhood n={side} (max {max})")]
    CountOutOfRange { count: u32, side: u32, max: u32 },
    #[error("birth on zero living neighbors is not allowed")]
    BirthOnZero,
    #[error("neighborhood side n={0} must be odd and at least 3")]
    BadNeighborhood(u64),
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("requested {requested} distinct rules but only {available} exist for radius {radius}")]
    Capacity {
        requested: usize,
        available: u128,
        radius: u32,
    },
}

/// Largest neighbor count for a Moore neighborhood of the given radius.
pub fn max_count_for(radius: u32) -> u32 {
    let side = 2 * radius + 1;
    side * side - 1
}

/// A Born/Stay rule with a Moore-neighborhood radius.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    radius: u32,
    born: BTreeSet<u32>,
    stay: BTreeSet<u32>,
}

impl Rule {
    pub fn new(
        radius: u32,
        born: impl IntoIterator<Item = u32>,
        stay: impl IntoIterator<Item = u32>,
    ) -> Result<Self, RuleError> {
        if radius == 0 {
            return Err(RuleError::ZeroRadius);
        }
        let max = max_count_for(radius);
        let born: BTreeSet<u32> = born.into_iter().collect();
        let stay: BTreeSet<u32> = stay.into_iter().collect();
        if let Some(&count) = born.iter().chain(stay.iter()).find(|&&c| c > max) {
            return Err(RuleError::CountOutOfRange {
                count,
                side: 2 * radius + 1,
                max,
            });
        }
        if born.contains(&0) {
            return Err(RuleError::BirthOnZero);
        }
        Ok(Self { radius, born, stay })
    }

    /// Conway's Game of Life, B3/S23.
    pub fn game_of_life() -> Self {
        Self::new(1, [3], [2, 3]).expect("B3/S23 is valid")
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Side length of the neighborhood window, `2·radius + 1`.
    pub fn side(&self) -> u32 {
        2 * self.radius + 1
    }

    pub fn max_count(&self) -> u32 {
        max_count_for(self.radius)
    }

    pub fn born(&self) -> &BTreeSet<u32> {
        &self.born
    }

    pub fn stay(&self) -> &BTreeSet<u32> {
        &self.stay
    }

    /// True when both sets are empty: every cell dies after one step.
    pub fn is_trivial(&self) -> bool {
        self.born.is_empty() && self.stay.is_empty()
    }

    /// Next state of a cell given its current state and living-neighbor count.
    pub fn next_state(&self, alive: bool, count: u32) -> bool {
        if alive {
            self.stay.contains(&count)
        } else {
            self.born.contains(&count)
        }
    }

    /// Dense lookup tables `(born, stay)` indexed by neighbor count.
    pub fn tables(&self) -> (Vec<bool>, Vec<bool>) {
        let len = self.max_count() as usize + 1;
        let mut born = vec![false; len];
        let mut stay = vec![false; len];
        for &c in &self.born {
            born[c as usize] = true;
        }
        for &c in &self.stay {
            stay[c as usize] = true;
        }
        (born, stay)
    }

    /// Canonical notation: comma-separated ascending counts, explicit `n=`.
    pub fn notation(&self) -> String {
        format!(
            "B{}/S{} n={}",
            join(&self.born, ","),
            join(&self.stay, ","),
            self.side()
        )
    }

    /// Digit-string form (`B3/S23 n=3`), only defined for 3×3 rules.
    pub fn compact_notation(&self) -> Option<String> {
        (self.radius == 1).then(|| format!("B{}/S{} n=3", join(&self.born, ""), join(&self.stay, "")))
    }

    pub fn parse(text: &str) -> Result<Self, RuleError> {
        parse_notation(text)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

impl FromStr for Rule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_notation(s)
    }
}

fn join(set: &BTreeSet<u32>, sep: &str) -> String {
    set.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn parse_err(token: &str, reason: &'static str) -> RuleError {
    RuleError::Parse {
        token: token.to_string(),
        reason,
    }
}

/// Parses `B<counts>/S<counts> [n=<side>]`.
pub fn parse_notation(text: &str) -> Result<Rule, RuleError> {
    let text = text.trim();
    let mut parts = text.split_whitespace();
    let body = parts.next().ok_or_else(|| parse_err(text, "empty rule"))?;
    let side = match parts.next() {
        None => 3,
        Some(tok) => {
            let value = tok
                .strip_prefix("n=")
                .ok_or_else(|| parse_err(tok, "expected `n=<side>`"))?;
            value
                .parse::<u64>()
                .map_err(|_| parse_err(tok, "neighborhood side is not an integer"))?
        }
    };
    if let Some(extra) = parts.next() {
        return Err(parse_err(extra, "unexpected trailing token"));
    }
    if side < 3 || side % 2 == 0 || side > u64::from(u16::MAX) {
        return Err(RuleError::BadNeighborhood(side));
    }
    let radius = ((side - 1) / 2) as u32;

    let (born_txt, stay_txt) = body
        .split_once('/')
        .ok_or_else(|| parse_err(body, "expected `B.../S...`"))?;
    let born_txt = born_txt
        .strip_prefix('B')
        .ok_or_else(|| parse_err(born_txt, "birth list must start with `B`"))?;
    let stay_txt = stay_txt
        .strip_prefix('S')
        .ok_or_else(|| parse_err(stay_txt, "stay list must start with `S`"))?;

    let compact = radius == 1;
    let born = parse_counts(born_txt, compact)?;
    let stay = parse_counts(stay_txt, compact)?;
    Rule::new(radius, born, stay)
}

fn parse_counts(text: &str, compact: bool) -> Result<Vec<u32>, RuleError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if compact && !text.contains(',') {
        return text
            .chars()
            .map(|ch| {
                ch.to_digit(10)
                    .ok_or_else(|| parse_err(&ch.to_string(), "expected a digit"))
            })
            .collect();
    }
    text.split(',')
        .map(|tok| {
            if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err(tok, "expected a non-negative integer"));
            }
            tok.parse::<u32>().map_err(|_| parse_err(tok, "count too large"))
        })
        .collect()
}

/// An ordered list of rules. Indices into `rules` are stable identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub label: String,
}

impl RuleSet {
    pub fn new(label: impl Into<String>, rules: Vec<Rule>) -> Self {
        Self {
            rules,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Rule> {
        self.rules.get(id as usize)
    }

    pub fn radii(&self) -> BTreeSet<u32> {
        self.rules.iter().map(Rule::radius).collect()
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }
}

/// Number of distinct non-trivial rules for a radius (saturating).
pub fn rule_capacity(radius: u32) -> u128 {
    // born ranges over 1..=max, stay over 0..=max: 2·max + 1 free bits.
    let bits = 2 * u64::from(max_count_for(radius)) + 1;
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// Samples `count` distinct, non-trivial rules.
///
/// Each count in `1..=max` joins the birth set with probability ½ and each
/// count in `0..=max` joins the stay set with probability ½.
pub fn sample_rules(count: usize, radius: u32, seed: u64) -> Result<RuleSet, RuleError> {
    sample_rules_excluding(count, radius, seed, &[])
}

/// Like [`sample_rules`], but never returns a rule present in `exclude`.
pub fn sample_rules_excluding(
    count: usize,
    radius: u32,
    seed: u64,
    exclude: &[Rule],
) -> Result<RuleSet, RuleError> {
    if radius == 0 {
        return Err(RuleError::ZeroRadius);
    }
    let excluded_here = exclude.iter().filter(|r| r.radius == radius).count() as u128;
    let available = rule_capacity(radius).saturating_sub(excluded_here);
    if count as u128 > available {
        return Err(RuleError::Capacity {
            requested: count,
            available,
            radius,
        });
    }
    let max = max_count_for(radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Rule> = exclude.iter().cloned().collect();
    let mut rules = Vec::with_capacity(count);
    while rules.len() < count {
        let born: Vec<u32> = (1..=max).filter(|_| rng.gen_bool(0.5)).collect();
        let stay: Vec<u32> = (0..=max).filter(|_| rng.gen_bool(0.5)).collect();
        let rule = Rule::new(radius, born, stay).expect("sampled counts are in range");
        if rule.is_trivial() || !seen.insert(rule.clone()) {
            continue;
        }
        rules.push(rule);
    }
    Ok(RuleSet::new(
        format!("sampled n={} seed={seed}", 2 * radius + 1),
        rules,
    ))
}
