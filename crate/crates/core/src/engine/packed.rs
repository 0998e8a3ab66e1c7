//! Bit-packed stepper.
//!
//! Rows are stored as 64-cell words, column `c` at bit `c % 64` of word
//! `c / 64`. Padding bits past the last column are always zero. Radius 1
//! uses a bit-sliced adder over the eight shifted neighbor planes; larger
//! radii use sliding-window column sums.

use crate::grid::{Boundary, Grid};
use crate::rules::Rule;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedGrid {
    height: usize,
    width: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl PackedGrid {
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height >= 1 && width >= 1, "grid dimensions must be positive");
        let words_per_row = width.div_ceil(WORD_BITS);
        Self {
            height,
            width,
            words_per_row,
            words: vec![0; height * words_per_row],
        }
    }

    pub fn from_grid(grid: &Grid) -> Self {
        let mut packed = Self::new(grid.height(), grid.width());
        let wpr = packed.words_per_row;
        for (r, row) in grid.cells().chunks(grid.width()).enumerate() {
            let dst = &mut packed.words[r * wpr..(r + 1) * wpr];
            for (c, &cell) in row.iter().enumerate() {
                dst[c / WORD_BITS] |= u64::from(cell) << (c % WORD_BITS);
            }
        }
        packed
    }

    pub fn to_grid(&self) -> Grid {
        let mut cells = Vec::with_capacity(self.height * self.width);
        for r in 0..self.height {
            let row = self.row(r);
            cells.extend((0..self.width).map(|c| ((row[c / WORD_BITS] >> (c % WORD_BITS)) & 1) as u8));
        }
        Grid::from_cells(self.height, self.width, cells).expect("dimensions preserved")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn live_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn last_word_mask(&self) -> u64 {
        match self.width % WORD_BITS {
            0 => u64::MAX,
            rem => (1u64 << rem) - 1,
        }
    }

    fn bit(row: &[u64], c: usize) -> u64 {
        (row[c / WORD_BITS] >> (c % WORD_BITS)) & 1
    }

    /// Row index `r + dy`, or `None` when it falls outside a dead boundary.
    fn neighbor_row(&self, r: usize, dy: isize, boundary: Boundary) -> Option<usize> {
        let y = r as isize + dy;
        match boundary {
            Boundary::Dead => (0..self.height as isize).contains(&y).then_some(y as usize),
            Boundary::Toroidal => Some(y.rem_euclid(self.height as isize) as usize),
        }
    }

    /// `out[c] = row[c - 1]`.
    fn shift_west(&self, row: &[u64], out: &mut [u64], boundary: Boundary) {
        let mut carry = 0;
        for (o, &w) in out.iter_mut().zip(row) {
            *o = (w << 1) | carry;
            carry = w >> 63;
        }
        if boundary == Boundary::Toroidal {
            out[0] |= Self::bit(row, self.width - 1);
        }
        let last = out.len() - 1;
        out[last] &= self.last_word_mask();
    }

    /// `out[c] = row[c + 1]`.
    fn shift_east(&self, row: &[u64], out: &mut [u64], boundary: Boundary) {
        let mut carry = 0;
        for (o, &w) in out.iter_mut().zip(row).rev() {
            *o = (w >> 1) | carry;
            carry = w << 63;
        }
        if boundary == Boundary::Toroidal {
            let c = self.width - 1;
            out[c / WORD_BITS] |= Self::bit(row, 0) << (c % WORD_BITS);
        }
    }

    /// Neighbor counts for every cell, row-major.
    pub fn neighbor_counts(&self, radius: u32, boundary: Boundary) -> Vec<u32> {
        let mut out = vec![0u32; self.height * self.width];
        self.for_each_window_sum(radius, boundary, |r, sums| {
            let row = self.row(r);
            let dst = &mut out[r * self.width..(r + 1) * self.width];
            for (c, (d, &s)) in dst.iter_mut().zip(sums).enumerate() {
                *d = s - Self::bit(row, c) as u32;
            }
        });
        out
    }

    /// Calls `f(row, sums)` where `sums[c]` is the live total of the full
    /// (2r+1)² window centered on `(row, c)`, center included.
    fn for_each_window_sum(&self, radius: u32, boundary: Boundary, mut f: impl FnMut(usize, &[u32])) {
        let rad = radius as isize;
        let w = self.width;
        let mut col_sums = vec![0u32; w];
        let mut window = vec![0u32; w];

        let add_row = |col_sums: &mut [u32], row: &[u64], sign: i32| {
            for (i, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let c = i * WORD_BITS + bits.trailing_zeros() as usize;
                    col_sums[c] = col_sums[c].wrapping_add_signed(sign);
                    bits &= bits - 1;
                }
            }
        };

        for dy in -rad..=rad {
            if let Some(y) = self.neighbor_row(0, dy, boundary) {
                add_row(&mut col_sums, self.row(y), 1);
            }
        }

        for r in 0..self.height {
            if r > 0 {
                if let Some(y) = self.neighbor_row(r - 1, -rad, boundary) {
                    add_row(&mut col_sums, self.row(y), -1);
                }
                if let Some(y) = self.neighbor_row(r, rad, boundary) {
                    add_row(&mut col_sums, self.row(y), 1);
                }
            }
            horizontal_window(&col_sums, &mut window, rad, boundary);
            f(r, &window);
        }
    }

    /// One synchronous update under `rule`.
    pub fn step(&self, rule: &Rule, boundary: Boundary) -> PackedGrid {
        Stepper::new(rule, boundary).step(self)
    }
}

fn horizontal_window(col_sums: &[u32], window: &mut [u32], rad: isize, boundary: Boundary) {
    let w = col_sums.len() as isize;
    let at = |x: isize| -> u32 {
        match boundary {
            Boundary::Dead => {
                if (0..w).contains(&x) {
                    col_sums[x as usize]
                } else {
                    0
                }
            }
            Boundary::Toroidal => col_sums[x.rem_euclid(w) as usize],
        }
    };
    let mut acc: u32 = (-rad..=rad).map(at).sum();
    window[0] = acc;
    for c in 1..w {
        acc = acc + at(c + rad) - at(c - 1 - rad);
        window[c as usize] = acc;
    }
}

/// A rule compiled for repeated packed stepping.
#[derive(Debug, Clone)]
pub struct Stepper {
    radius: u32,
    boundary: Boundary,
    born: Vec<bool>,
    stay: Vec<bool>,
}

impl Stepper {
    pub fn new(rule: &Rule, boundary: Boundary) -> Self {
        let (born, stay) = rule.tables();
        Self {
            radius: rule.radius(),
            boundary,
            born,
            stay,
        }
    }

    pub fn step(&self, grid: &PackedGrid) -> PackedGrid {
        if self.radius == 1 {
            self.step_radius_one(grid)
        } else {
            self.step_windowed(grid)
        }
    }

    fn step_windowed(&self, grid: &PackedGrid) -> PackedGrid {
        let mut next = PackedGrid::new(grid.height, grid.width);
        let wpr = grid.words_per_row;
        grid.for_each_window_sum(self.radius, self.boundary, |r, sums| {
            let row = grid.row(r);
            let dst = &mut next.words[r * wpr..(r + 1) * wpr];
            for (c, &total) in sums.iter().enumerate() {
                let alive = PackedGrid::bit(row, c);
                let count = (total - alive as u32) as usize;
                let on = if alive == 1 {
                    self.stay[count]
                } else {
                    self.born[count]
                };
                dst[c / WORD_BITS] |= u64::from(on) << (c % WORD_BITS);
            }
        });
        next
    }

    fn step_radius_one(&self, grid: &PackedGrid) -> PackedGrid {
        let wpr = grid.words_per_row;
        let mut next = PackedGrid::new(grid.height, grid.width);
        let zero = vec![0u64; wpr];
        let mut west = [vec![0u64; wpr], vec![0u64; wpr], vec![0u64; wpr]];
        let mut east = [vec![0u64; wpr], vec![0u64; wpr], vec![0u64; wpr]];
        let mask = grid.last_word_mask();

        for r in 0..grid.height {
            let rows: [&[u64]; 3] = [-1isize, 0, 1].map(|dy| {
                grid.neighbor_row(r, dy, self.boundary)
                    .map_or(zero.as_slice(), |y| grid.row(y))
            });
            for i in 0..3 {
                grid.shift_west(rows[i], &mut west[i], self.boundary);
                grid.shift_east(rows[i], &mut east[i], self.boundary);
            }
            let dst = &mut next.words[r * wpr..(r + 1) * wpr];
            for (i, out) in dst.iter_mut().enumerate() {
                let inputs = [
                    west[0][i], rows[0][i], east[0][i], west[1][i], east[1][i], west[2][i], rows[2][i],
                    east[2][i],
                ];
                // bit-sliced counter, planes s0..s3 hold counts 0..=8
                let (mut s0, mut s1, mut s2, mut s3) = (0u64, 0u64, 0u64, 0u64);
                for x in inputs {
                    let c0 = s0 & x;
                    s0 ^= x;
                    let c1 = s1 & c0;
                    s1 ^= c0;
                    let c2 = s2 & c1;
                    s2 ^= c1;
                    s3 |= c2;
                }
                let alive = rows[1][i];
                let mut born = 0u64;
                let mut stay = 0u64;
                for count in 0..=8usize {
                    if !self.born[count] && !self.stay[count] {
                        continue;
                    }
                    let pick = |plane: u64, bit: usize| if count >> bit & 1 == 1 { plane } else { !plane };
                    let eq = pick(s0, 0) & pick(s1, 1) & pick(s2, 2) & pick(s3, 3);
                    if self.born[count] {
                        born |= eq;
                    }
                    if self.stay[count] {
                        stay |= eq;
                    }
                }
                *out = (born & !alive) | (stay & alive);
            }
            dst[wpr - 1] &= mask;
        }
        next
    }
}

/// Same contract as [`super::step`], computed on the packed representation.
pub fn step_packed(rule: &Rule, grid: &Grid, boundary: Boundary) -> Grid {
    PackedGrid::from_grid(grid).step(rule, boundary).to_grid()
}

/// Neighbor counts for every cell of `grid`, row-major.
pub fn neighbor_counts(grid: &Grid, radius: u32, boundary: Boundary) -> Vec<u32> {
    PackedGrid::from_grid(grid).neighbor_counts(radius, boundary)
}
