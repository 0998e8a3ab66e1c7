//! CAPR prediction files.
//!
//! ```text
//! "CAPR" | version u8 = 1 | mode u8 | H u32 | W u32 | count u64 | frames
//! ```
//!
//! Mode 0 stores binary frame blocks, mode 1 stores float32 probabilities
//! row-major. Probabilities binarize as `p >= 0.5`, so a tie reads as alive.
//! Frame order follows the sample order of the split being predicted.

use std::path::Path;

use super::frame::{frame_bytes, pack_frame, unpack_frame};
use super::{read_file, write_atomic, FormatError, Reader};
use crate::grid::Grid;

const MAGIC: &[u8; 4] = b"CAPR";
const VERSION: u8 = 1;

/// Byte offset of the H field.
pub const HEIGHT_OFFSET: u64 = 6;
/// Byte offset of the W field.
pub const WIDTH_OFFSET: u64 = 10;
/// Byte offset of the frame count.
pub const COUNT_OFFSET: u64 = 14;
/// Byte offset of the first frame.
pub const FRAMES_OFFSET: u64 = 22;

#[derive(Debug, Clone, PartialEq)]
pub enum Predictions {
    Binary(Vec<Grid>),
    /// One row-major `H·W` vector per frame.
    Probabilities(Vec<Vec<f32>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionFile {
    pub height: usize,
    pub width: usize,
    pub frames: Predictions,
}

/// Probability threshold; values at or above it are alive.
pub const ALIVE_THRESHOLD: f32 = 0.5;

impl PredictionFile {
    pub fn binary(height: usize, width: usize, frames: Vec<Grid>) -> Self {
        Self {
            height,
            width,
            frames: Predictions::Binary(frames),
        }
    }

    pub fn probabilities(height: usize, width: usize, frames: Vec<Vec<f32>>) -> Self {
        Self {
            height,
            width,
            frames: Predictions::Probabilities(frames),
        }
    }

    pub fn len(&self) -> usize {
        match &self.frames {
            Predictions::Binary(f) => f.len(),
            Predictions::Probabilities(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Byte offset where frame `index` starts.
    pub fn frame_offset(&self, index: usize) -> u64 {
        let frame_len = match self.frames {
            Predictions::Binary(_) => frame_bytes(self.height, self.width),
            Predictions::Probabilities(_) => 4 * self.height * self.width,
        };
        FRAMES_OFFSET + (index * frame_len) as u64
    }

    /// Binary frames, thresholding probabilities if needed.
    pub fn to_grids(&self) -> Vec<Grid> {
        match &self.frames {
            Predictions::Binary(f) => f.clone(),
            Predictions::Probabilities(f) => f
                .iter()
                .map(|p| {
                    let cells = p.iter().map(|&v| (v >= ALIVE_THRESHOLD) as u8).collect();
                    Grid::from_cells(self.height, self.width, cells).expect("frame length checked")
                })
                .collect(),
        }
    }

    pub fn encode(&self) -> Result<Vec<u8>, FormatError> {
        if self.height == 0
            || self.width == 0
            || self.height > u32::MAX as usize
            || self.width > u32::MAX as usize
        {
            return Err(FormatError::Invalid(format!(
                "bad frame size {}x{}",
                self.height, self.width
            )));
        }
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(match self.frames {
            Predictions::Binary(_) => 0,
            Predictions::Probabilities(_) => 1,
        });
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        match &self.frames {
            Predictions::Binary(frames) => {
                for (i, g) in frames.iter().enumerate() {
                    if g.dims() != (self.height, self.width) {
                        return Err(FormatError::Invalid(format!(
                            "frame {i} has shape {:?}",
                            g.dims()
                        )));
                    }
                    pack_frame(g, &mut out);
                }
            }
            Predictions::Probabilities(frames) => {
                for (i, p) in frames.iter().enumerate() {
                    if p.len() != self.height * self.width {
                        return Err(FormatError::Invalid(format!("frame {i} has {} values", p.len())));
                    }
                    for v in p {
                        out.extend_from_slice(&v.to_le_bytes());
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader::new(bytes);
        r.magic(MAGIC)?;
        let version = r.u8()?;
        if version != VERSION {
            return Err(FormatError::Format {
                offset: 4,
                reason: format!("unsupported CAPR version {version}"),
            });
        }
        let mode = r.u8()?;
        let height = r.u32()? as usize;
        let width = r.u32()? as usize;
        if height == 0 || width == 0 {
            return Err(FormatError::Format {
                offset: HEIGHT_OFFSET,
                reason: format!("bad frame size {height}x{width}"),
            });
        }
        let count = r.u64()?;
        let cells = height * width;
        let frames = match mode {
            0 => {
                let len = frame_bytes(height, width);
                let mut frames = Vec::with_capacity((count as usize).min(r.remaining() / len));
                for _ in 0..count {
                    frames.push(unpack_frame(height, width, r.take(len)?));
                }
                Predictions::Binary(frames)
            }
            1 => {
                let mut frames = Vec::with_capacity((count as usize).min(r.remaining() / (4 * cells)));
                for _ in 0..count {
                    let mut values = Vec::with_capacity(cells);
                    for _ in 0..cells {
                        let at = r.offset();
                        let v = r.f32()?;
                        if v.is_nan() {
                            return Err(FormatError::Format {
                                offset: at,
                                reason: "probability is NaN".into(),
                            });
                        }
                        values.push(v);
                    }
                    frames.push(values);
                }
                Predictions::Probabilities(frames)
            }
            other => {
                return Err(FormatError::Format {
                    offset: 5,
                    reason: format!("unknown CAPR mode {other}"),
                })
            }
        };
        r.finish()?;
        Ok(Self {
            height,
            width,
            frames,
        })
    }
}

pub fn write_predictions(path: &Path, file: &PredictionFile) -> Result<(), FormatError> {
    write_atomic(path, &file.encode()?)
}

pub fn read_predictions(path: &Path) -> Result<PredictionFile, FormatError> {
    PredictionFile::decode(&read_file(path)?)
}
