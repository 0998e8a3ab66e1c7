//! Recovering Born/Stay rules from observed transitions.
//!
//! Every cell transition is filed under (current state, neighbor count) and
//! tallied by outcome. A Born/Stay rule is a function of exactly that pair,
//! so data produced by one rule never shows both outcomes for the same key.

use std::fmt;

use thiserror::Error;

use crate::engine::{neighbor_counts, Trajectory};
use crate::grid::{Boundary, Grid, ShapeError};
use crate::rules::{max_count_for, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("observations are inconsistent with any Born/Stay rule of radius {radius}: {}", format_pairs(.pairs))]
    Inconsistent {
        radius: u32,
        pairs: Vec<(CellState, u32)>,
    },
    #[error("dead cells with zero living neighbors were born; no Born/Stay rule allows that")]
    SpontaneousBirth,
    #[error("no radius up to {max_radius} explains the observations")]
    NoConsistentRadius { max_radius: u32 },
    #[error("radius must be at least 1")]
    ZeroRadius,
}

fn format_pairs(pairs: &[(CellState, u32)]) -> String {
    pairs
        .iter()
        .map(|(s, c)| format!("({s}, {c})"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellState {
    Dead,
    Alive,
}

impl fmt::Display for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellState::Dead => "dead",
            CellState::Alive => "alive",
        })
    }
}

/// Outcome tallies for one (state, count) key.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub to_alive: u64,
    pub to_dead: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    Unobserved,
    AlwaysAlive,
    AlwaysDead,
    Contradictory,
}

impl Tally {
    pub fn evidence(&self) -> Evidence {
        match (self.to_alive, self.to_dead) {
            (0, 0) => Evidence::Unobserved,
            (_, 0) => Evidence::AlwaysAlive,
            (0, _) => Evidence::AlwaysDead,
            _ => Evidence::Contradictory,
        }
    }

    pub fn total(&self) -> u64 {
        self.to_alive + self.to_dead
    }
}

/// Accumulated transition evidence for a fixed radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConstraints {
    radius: u32,
    boundary: Boundary,
    born: Vec<Tally>,
    stay: Vec<Tally>,
}

impl RuleConstraints {
    pub fn new(radius: u32, boundary: Boundary) -> Result<Self, InferError> {
        if radius == 0 {
            return Err(InferError::ZeroRadius);
        }
        let len = max_count_for(radius) as usize + 1;
        Ok(Self {
            radius,
            boundary,
            born: vec![Tally::default(); len],
            stay: vec![Tally::default(); len],
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Tallies for dead centers, indexed by neighbor count.
    pub fn born_evidence(&self) -> &[Tally] {
        &self.born
    }

    /// Tallies for live centers, indexed by neighbor count.
    pub fn stay_evidence(&self) -> &[Tally] {
        &self.stay
    }

    pub fn observations(&self) -> u64 {
        self.born.iter().chain(&self.stay).map(Tally::total).sum()
    }

    /// True when every (state, count) key has been seen at least once.
    pub fn is_saturated(&self) -> bool {
        self.born
            .iter()
            .chain(&self.stay)
            .all(|t| t.evidence() != Evidence::Unobserved)
    }

    /// Files every cell transition from `before` to `after`.
    pub fn observe(&mut self, before: &Grid, after: &Grid) -> Result<(), InferError> {
        before.check_same_shape(after)?;
        let counts = neighbor_counts(before, self.radius, self.boundary);
        for ((&state, &next), &count) in before.cells().iter().zip(after.cells()).zip(&counts) {
            let table = if state != 0 {
                &mut self.stay
            } else {
                &mut self.born
            };
            let tally = &mut table[count as usize];
            if next != 0 {
                tally.to_alive += 1;
            } else {
                tally.to_dead += 1;
            }
        }
        Ok(())
    }

    /// Observes every consecutive pair of a state sequence.
    pub fn observe_sequence(&mut self, states: &[Grid]) -> Result<(), InferError> {
        for pair in states.windows(2) {
            self.observe(&pair[0], &pair[1])?;
        }
        Ok(())
    }

    pub fn observe_trajectory(&mut self, trajectory: &Trajectory) -> Result<(), InferError> {
        self.observe_sequence(&trajectory.states)
    }

    /// Adds another batch of evidence gathered at the same radius.
    pub fn merge(&mut self, other: &RuleConstraints) {
        assert_eq!(
            self.radius, other.radius,
            "cannot merge evidence of different radii"
        );
        for (a, b) in self.born.iter_mut().zip(&other.born) {
            a.to_alive += b.to_alive;
            a.to_dead += b.to_dead;
        }
        for (a, b) in self.stay.iter_mut().zip(&other.stay) {
            a.to_alive += b.to_alive;
            a.to_dead += b.to_dead;
        }
    }

    fn contradictions(&self) -> Vec<(CellState, u32)> {
        let dead = self.born.iter().enumerate().map(|(c, t)| (CellState::Dead, c, t));
        let alive = self
            .stay
            .iter()
            .enumerate()
            .map(|(c, t)| (CellState::Alive, c, t));
        dead.chain(alive)
            .filter(|(_, _, t)| t.evidence() == Evidence::Contradictory)
            .map(|(s, c, _)| (s, c as u32))
            .collect()
    }
}

/// Which neighbor counts the evidence never exercised.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdentifiabilityReport {
    pub unobserved_born: Vec<u32>,
    pub unobserved_stay: Vec<u32>,
    pub observations: u64,
}

impl IdentifiabilityReport {
    pub fn is_fully_identified(&self) -> bool {
        self.unobserved_born.is_empty() && self.unobserved_stay.is_empty()
    }
}

impl fmt::Display for IdentifiabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[u32]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            }
        };
        writeln!(f, "observed transitions: {}", self.observations)?;
        writeln!(
            f,
            "unobserved counts (dead center): {}",
            list(&self.unobserved_born)
        )?;
        write!(
            f,
            "unobserved counts (live center): {}",
            list(&self.unobserved_stay)
        )
    }
}

/// The smallest rule consistent with the evidence.
///
/// Unobserved counts are left out of both sets and listed in the report.
pub fn infer_rule(constraints: &RuleConstraints) -> Result<(Rule, IdentifiabilityReport), InferError> {
    let pairs = constraints.contradictions();
    if !pairs.is_empty() {
        return Err(InferError::Inconsistent {
            radius: constraints.radius,
            pairs,
        });
    }
    if constraints.born[0].evidence() == Evidence::AlwaysAlive {
        return Err(InferError::SpontaneousBirth);
    }
    let select = |table: &[Tally], e: Evidence| -> Vec<u32> {
        table
            .iter()
            .enumerate()
            .filter(|(_, t)| t.evidence() == e)
            .map(|(c, _)| c as u32)
            .collect()
    };
    let rule = Rule::new(
        constraints.radius,
        select(&constraints.born, Evidence::AlwaysAlive),
        select(&constraints.stay, Evidence::AlwaysAlive),
    )
    .expect("counts are bounded by the table size");
    let report = IdentifiabilityReport {
        unobserved_born: select(&constraints.born, Evidence::Unobserved),
        unobserved_stay: select(&constraints.stay, Evidence::Unobserved),
        observations: constraints.observations(),
    };
    Ok((rule, report))
}

/// Infers from state sequences at a given radius.
pub fn infer_from_sequences<'a>(
    sequences: impl IntoIterator<Item = &'a [Grid]>,
    radius: u32,
    boundary: Boundary,
) -> Result<(Rule, IdentifiabilityReport), InferError> {
    let mut constraints = RuleConstraints::new(radius, boundary)?;
    for seq in sequences {
        constraints.observe_sequence(seq)?;
    }
    infer_rule(&constraints)
}

/// Tries radius 1, 2, … `max_radius` and returns the first consistent result.
pub fn infer_smallest_radius(
    sequences: &[&[Grid]],
    max_radius: u32,
    boundary: Boundary,
) -> Result<(Rule, IdentifiabilityReport), InferError> {
    for radius in 1..=max_radius {
        match infer_from_sequences(sequences.iter().copied(), radius, boundary) {
            Ok(found) => return Ok(found),
            Err(InferError::Inconsistent { .. } | InferError::SpontaneousBirth) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(InferError::NoConsistentRadius { max_radius })
}
