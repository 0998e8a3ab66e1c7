use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("shape mismatch: expected {expected:?}, got {actual:?}")]
pub struct ShapeError {
    pub expected: (usize, usize),
    pub actual: (usize, usize),
}

/// How cells outside the grid are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    /// Cells outside the grid are permanently dead.
    #[default]
    Dead,
    /// Indices wrap around in both directions.
    Toroidal,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Dead => "dead",
            Boundary::Toroidal => "toroidal",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dead" => Ok(Boundary::Dead),
            "toroidal" | "torus" => Ok(Boundary::Toroidal),
            other => Err(format!("unknown boundary `{other}` (expected dead|toroidal)")),
        }
    }
}

/// A binary H×W grid stored row-major, one byte per cell (0 or 1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    height: usize,
    width: usize,
    cells: Vec<u8>,
}

impl Grid {
    /// An all-dead grid.
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height >= 1 && width >= 1, "grid dimensions must be positive");
        Self {
            height,
            width,
            cells: vec![0; height * width],
        }
    }

    pub fn filled(height: usize, width: usize, alive: bool) -> Self {
        let mut g = Self::new(height, width);
        g.cells.fill(alive as u8);
        g
    }

    /// Builds a grid from row-major cells; any nonzero byte counts as alive.
    pub fn from_cells(height: usize, width: usize, cells: Vec<u8>) -> Result<Self, ShapeError> {
        if height == 0 || width == 0 || cells.len() != height * width {
            return Err(ShapeError {
                expected: (height, width),
                actual: (cells.len() / width.max(1), width),
            });
        }
        let cells = cells.into_iter().map(|c| (c != 0) as u8).collect();
        Ok(Self { height, width, cells })
    }

    /// Parses a picture made of `#`/`O`/`1` (alive) and `.`/`0` (dead), one row per string.
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut g = Self::new(height, width);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged picture");
            for (c, ch) in row.chars().enumerate() {
                g.set(r, c, matches!(ch, '#' | 'O' | '1' | '*'));
            }
        }
        g
    }

    /// Each cell alive independently with probability `density`.
    pub fn random(height: usize, width: usize, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(height, width, density, &mut rng)
    }

    pub fn random_with<R: Rng>(height: usize, width: usize, density: f64, rng: &mut R) -> Self {
        let mut g = Self::new(height, width);
        let p = density.clamp(0.0, 1.0);
        for cell in &mut g.cells {
            *cell = rng.gen_bool(p) as u8;
        }
        g
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.width + col] != 0
    }

    pub fn set(&mut self, row: usize, col: usize, alive: bool) {
        self.cells[row * self.width + col] = alive as u8;
    }

    pub fn toggle(&mut self, row: usize, col: usize) {
        self.cells[row * self.width + col] ^= 1;
    }

    pub fn live_count(&self) -> usize {
        self.cells.iter().map(|&c| c as usize).sum()
    }

    pub fn live_fraction(&self) -> f64 {
        self.live_count() as f64 / self.len() as f64
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.live_count();
        n == 0 || n == self.len()
    }

    pub fn complement(&self) -> Grid {
        Grid {
            height: self.height,
            width: self.width,
            cells: self.cells.iter().map(|&c| c ^ 1).collect(),
        }
    }

    /// Cyclic shift: the cell at (r, c) moves to (r + dy, c + dx) modulo the dimensions.
    pub fn shifted(&self, dy: isize, dx: isize) -> Grid {
        let mut out = Grid::new(self.height, self.width);
        let h = self.height as isize;
        let w = self.width as isize;
        for r in 0..self.height {
            for c in 0..self.width {
                let nr = (r as isize + dy).rem_euclid(h) as usize;
                let nc = (c as isize + dx).rem_euclid(w) as usize;
                out.set(nr, nc, self.get(r, c));
            }
        }
        out
    }

    pub fn check_same_shape(&self, other: &Grid) -> Result<(), ShapeError> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(ShapeError {
                expected: self.dims(),
                actual: other.dims(),
            })
        }
    }

    /// Live cell coordinates in row-major order.
    pub fn live_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, _)| (i / self.width, i % self.width))
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Grid {}x{}", self.height, self.width)?;
        for row in self.cells.chunks(self.width) {
            let line: String = row.iter().map(|&c| if c != 0 { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picture_round_trip() {
        let g = Grid::from_rows(&["#.", ".#"]);
        assert_eq!(g.cells(), &[1, 0, 0, 1]);
        assert_eq!(g.live_cells().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn shift_wraps() {
        let g = Grid::from_rows(&["#..", "...", "..."]);
        let s = g.shifted(-1, -1);
        assert!(s.get(2, 2));
        assert_eq!(s.live_count(), 1);
        assert_eq!(g.shifted(3, 6), g);
    }

    #[test]
    fn random_grid_statistics() {
        let g = Grid::random(64, 64, 0.5, 3);
        // binomial(4096, 0.5): sigma = 32
        let live = g.live_count() as f64;
        assert!((live - 2048.0).abs() <= 5.0 * 32.0);
        assert_eq!(g, Grid::random(64, 64, 0.5, 3));
        assert_ne!(g, Grid::random(64, 64, 0.5, 4));
        assert!(Grid::random(64, 64, 1e-9, 3).live_count() <= 1);
    }

    #[test]
    fn from_cells_validates_length() {
        assert!(Grid::from_cells(2, 2, vec![0; 3]).is_err());
        assert_eq!(Grid::from_cells(1, 2, vec![0, 7]).unwrap().cells(), &[0, 1]);
    }
}
