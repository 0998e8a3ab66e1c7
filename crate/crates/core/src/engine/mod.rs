//! Grid evolution under a [`Rule`].

mod packed;
mod reference;

pub use packed::{neighbor_counts, step_packed, PackedGrid, Stepper};
pub use reference::{neighbor_count, step};

use crate::grid::{Boundary, Grid};
use crate::rules::Rule;

/// A rule, a boundary mode and the states it produced, `states[0]` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub rule: Rule,
    pub boundary: Boundary,
    pub states: Vec<Grid>,
}

impl Trajectory {
    /// Number of steps taken, i.e. `states.len() - 1`.
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn initial(&self) -> &Grid {
        &self.states[0]
    }

    pub fn last(&self) -> &Grid {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }
}

/// Runs `steps` updates from `initial`. The result holds `steps + 1` states.
pub fn simulate(rule: &Rule, initial: &Grid, steps: usize, boundary: Boundary) -> Trajectory {
    let stepper = Stepper::new(rule, boundary);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    let mut current = PackedGrid::from_grid(initial);
    for _ in 0..steps {
        current = stepper.step(&current);
        states.push(current.to_grid());
    }
    Trajectory {
        rule: rule.clone(),
        boundary,
        states,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn glider() -> Grid {
        let mut g = Grid::new(16, 16);
        for (r, c) in [(1, 2), (2, 3), (3, 1), (3, 2), (3, 3)] {
            g.set(r, c, true);
        }
        g
    }

    #[test]
    fn zero_steps_keeps_initial() {
        let g = Grid::random(4, 4, 0.5, 0);
        let t = simulate(&Rule::game_of_life(), &g, 0, Boundary::Dead);
        assert_eq!(t.states, vec![g]);
        assert_eq!(t.steps(), 0);
    }

    #[test]
    fn glider_moves_diagonally() {
        let g = glider();
        let t = simulate(&Rule::game_of_life(), &g, 4, Boundary::Toroidal);
        assert_eq!(*t.last(), g.shifted(1, 1));
    }

    #[test]
    fn states_follow_reference_step() {
        let rule = Rule::parse("B2,5,7/S1,3,4,11,20 n=5").unwrap();
        let t = simulate(&rule, &Grid::random(20, 23, 0.5, 9), 6, Boundary::Dead);
        for pair in t.states.windows(2) {
            assert_eq!(pair[1], step(&rule, &pair[0], Boundary::Dead));
        }
    }

    #[test]
    fn empty_stay_set_kills_every_live_cell() {
        let rule = Rule::parse("B1,2,3,4,5,6,7,8/S").unwrap();
        let t = simulate(&rule, &Grid::random(8, 8, 0.5, 4), 2, Boundary::Toroidal);
        for pair in t.states.windows(2) {
            for (r, c) in pair[0].live_cells() {
                assert!(!pair[1].get(r, c));
            }
        }
    }
}
