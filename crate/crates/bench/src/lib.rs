//! Shared fixtures for the criterion benchmarks.

use rulelab_core::rules::sample_rules;
use rulelab_core::{Grid, Rule};

/// A deterministic random rule of the given radius.
pub fn bench_rule(radius: u32) -> Rule {
    if radius == 1 {
        return Rule::game_of_life();
    }
    sample_rules(1, radius, 0xBE7C)
        .expect("radius >= 1")
        .rules
        .remove(0)
}

/// A deterministic half-filled grid.
pub fn bench_grid(height: usize, width: usize) -> Grid {
    Grid::random(height, width, 0.5, 0x5EED)
}
