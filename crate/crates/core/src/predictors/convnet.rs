//! A three-layer convolutional network whose weights are written down
//! directly from a Born/Stay rule instead of being trained.
//!
//! Layer 1 is a single (2r+1)×(2r+1) convolution with weight 1 on every
//! neighbor and `max_count + 1` on the center, so each cell receives the
//! integer code `q = count + (max_count + 1)·state`, unique per
//! (state, count) pair. Layer 2 is a 1×1 convolution plus ReLU producing
//! three units per code `m` whose next state is alive. Layer 3 is a 1×1
//! convolution combining each triple as `relu(q-m+1) - 2·relu(q-m) +
//! relu(q-m-1)`, a triangle that is 1 at `q = m` and 0 at every other
//! integer.

use std::collections::BTreeSet;

use crate::grid::{Boundary, Grid};
use crate::rules::Rule;

fn relu(x: f32) -> f32 {
    x.max(0.0)
}

/// Triangle basis function centered on `m`, evaluated at `q`.
pub fn triangle(q: f32, m: f32) -> f32 {
    relu(q - m + 1.0) - 2.0 * relu(q - m) + relu(q - m - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedConvNet {
    radius: u32,
    max_count: u32,
    /// Row-major (2r+1)² first-layer kernel.
    code_kernel: Vec<f32>,
    code_bias: f32,
    alive_codes: BTreeSet<u32>,
    /// Second layer: one weight and bias per hidden unit, three units per code.
    hidden_weights: Vec<f32>,
    hidden_bias: Vec<f32>,
    /// Third layer: hidden units to the single output channel.
    output_weights: Vec<f32>,
    output_bias: f32,
}

pub fn build_constructed_net(rule: &Rule) -> ConstructedConvNet {
    let radius = rule.radius();
    let max_count = rule.max_count();
    let side = rule.side() as usize;
    let center_weight = (max_count + 1) as f32;

    let mut code_kernel = vec![1.0; side * side];
    code_kernel[side * side / 2] = center_weight;

    let alive_codes: BTreeSet<u32> = rule
        .born()
        .iter()
        .copied()
        .chain(rule.stay().iter().map(|s| s + max_count + 1))
        .collect();

    let mut hidden_weights = Vec::with_capacity(alive_codes.len() * 3);
    let mut hidden_bias = Vec::with_capacity(alive_codes.len() * 3);
    let mut output_weights = Vec::with_capacity(alive_codes.len() * 3);
    for &m in &alive_codes {
        let m = m as f32;
        for (offset, out_w) in [(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)] {
            hidden_weights.push(1.0);
            hidden_bias.push(offset - m);
            output_weights.push(out_w);
        }
    }

    ConstructedConvNet {
        radius,
        max_count,
        code_kernel,
        code_bias: 0.0,
        alive_codes,
        hidden_weights,
        hidden_bias,
        output_weights,
        output_bias: 0.0,
    }
}

impl ConstructedConvNet {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn code_kernel(&self) -> &[f32] {
        &self.code_kernel
    }

    pub fn alive_codes(&self) -> &BTreeSet<u32> {
        &self.alive_codes
    }

    /// Number of triangle groups (three hidden units each).
    pub fn triangle_groups(&self) -> usize {
        self.alive_codes.len()
    }

    /// Code for a (state, count) pair as produced by the first layer.
    pub fn code(&self, alive: bool, count: u32) -> u32 {
        count + (self.max_count + 1) * alive as u32
    }

    /// First-layer output: the integer code of every cell.
    pub fn codes(&self, grid: &Grid, boundary: Boundary) -> Vec<f32> {
        let (h, w) = grid.dims();
        let r = self.radius as isize;
        let side = 2 * self.radius as usize + 1;
        let mut out = Vec::with_capacity(h * w);
        for row in 0..h as isize {
            for col in 0..w as isize {
                let mut acc = self.code_bias;
                for dy in -r..=r {
                    for dx in -r..=r {
                        let (y, x) = (row + dy, col + dx);
                        let cell = match boundary {
                            Boundary::Dead => {
                                if y < 0 || x < 0 || y >= h as isize || x >= w as isize {
                                    continue;
                                }
                                grid.get(y as usize, x as usize)
                            }
                            Boundary::Toroidal => grid.get(
                                y.rem_euclid(h as isize) as usize,
                                x.rem_euclid(w as isize) as usize,
                            ),
                        };
                        if cell {
                            acc += self.code_kernel[(dy + r) as usize * side + (dx + r) as usize];
                        }
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    /// Layers 2 and 3 applied to one code value.
    pub fn head(&self, q: f32) -> f32 {
        let hidden = self
            .hidden_weights
            .iter()
            .zip(&self.hidden_bias)
            .map(|(w, b)| relu(w * q + b));
        hidden
            .zip(&self.output_weights)
            .fold(self.output_bias, |acc, (h, w)| acc + h * w)
    }

    /// Raw network output per cell (exactly 0.0 or 1.0 on binary input).
    pub fn activations(&self, grid: &Grid, boundary: Boundary) -> Vec<f32> {
        self.codes(grid, boundary)
            .into_iter()
            .map(|q| self.head(q))
            .collect()
    }

    /// Prediction with dead padding of width `radius`.
    pub fn forward(&self, grid: &Grid) -> Grid {
        self.forward_with(grid, Boundary::Dead)
    }

    /// Prediction where toroidal boundaries wrap the input before convolving.
    pub fn forward_with(&self, grid: &Grid, boundary: Boundary) -> Grid {
        let cells = self
            .activations(grid, boundary)
            .into_iter()
            .map(|y| (y >= 0.5) as u8)
            .collect();
        Grid::from_cells(grid.height(), grid.width(), cells).expect("shape preserved")
    }
}
