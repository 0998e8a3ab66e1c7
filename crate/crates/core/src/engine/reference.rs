//! Cell-by-cell reference implementation. Slow, and the semantic authority
//! every other stepper is checked against.

use crate::grid::{Boundary, Grid};
use crate::rules::Rule;

/// Live cells in the Moore window of `radius` around `(row, col)`, center excluded.
///
/// With a toroidal boundary a window wider than the grid visits some cells
/// more than once; each visit counts.
pub fn neighbor_count(grid: &Grid, row: usize, col: usize, radius: u32, boundary: Boundary) -> u32 {
    let r = radius as isize;
    let h = grid.height() as isize;
    let w = grid.width() as isize;
    let mut count = 0;
    for dy in -r..=r {
        for dx in -r..=r {
            if dy == 0 && dx == 0 {
                continue;
            }
            let y = row as isize + dy;
            let x = col as isize + dx;
            let alive = match boundary {
                Boundary::Dead => {
                    (0..h).contains(&y) && (0..w).contains(&x) && grid.get(y as usize, x as usize)
                }
                Boundary::Toroidal => grid.get(y.rem_euclid(h) as usize, x.rem_euclid(w) as usize),
            };
            count += alive as u32;
        }
    }
    count
}

/// One synchronous update of every cell.
pub fn step(rule: &Rule, grid: &Grid, boundary: Boundary) -> Grid {
    let mut next = Grid::new(grid.height(), grid.width());
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            let count = neighbor_count(grid, row, col, rule.radius(), boundary);
            next.set(row, col, rule.next_state(grid.get(row, col), count));
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_has_no_neighbors() {
        let g = Grid::new(5, 5);
        for b in [Boundary::Dead, Boundary::Toroidal] {
            assert_eq!(neighbor_count(&g, 2, 2, 2, b), 0);
        }
    }

    #[test]
    fn five_by_five_window_counts_five() {
        // 5x5 neighborhood picture with the center alive and 5 live neighbors.
        let g = Grid::from_rows(&["#....", ".#..#", "..#..", "#....", "....#"]);
        assert_eq!(neighbor_count(&g, 2, 2, 2, Boundary::Dead), 5);
        let rule = Rule::parse("B1,4,7/S2,5,10,12 n=5").unwrap();
        assert!(step(&rule, &g, Boundary::Dead).get(2, 2));
    }

    #[test]
    fn torus_corner_sees_everything() {
        let g = Grid::filled(3, 3, true);
        assert_eq!(neighbor_count(&g, 0, 0, 1, Boundary::Toroidal), 8);
        assert_eq!(neighbor_count(&g, 0, 0, 1, Boundary::Dead), 3);
    }

    #[test]
    fn wide_window_on_tiny_torus_counts_multiplicity() {
        let g = Grid::filled(1, 1, true);
        assert_eq!(neighbor_count(&g, 0, 0, 2, Boundary::Toroidal), 24);
    }

    #[test]
    fn blinker_rotates() {
        let g = Grid::from_rows(&[".....", ".....", ".###.", ".....", "....."]);
        let expected = Grid::from_rows(&[".....", "..#..", "..#..", "..#..", "....."]);
        assert_eq!(step(&Rule::game_of_life(), &g, Boundary::Dead), expected);
    }

    #[test]
    fn block_is_still() {
        let g = Grid::from_rows(&["....", ".##.", ".##.", "...."]);
        assert_eq!(step(&Rule::game_of_life(), &g, Boundary::Dead), g);
    }

    #[test]
    fn no_birth_keeps_empty_grid_empty() {
        let rule = Rule::parse("B/S0,1,2 n=5").unwrap();
        let g = Grid::new(6, 6);
        assert_eq!(step(&rule, &g, Boundary::Toroidal), g);
    }
}
