//! File formats.
//!
//! * `CADS`: rule table plus samples (see [`cads`]).
//! * `CAPR`: predictions, one frame per sample (see [`capr`]).
//! * Rules text: one canonical notation per line, `#` comments.
//! * PBM: P4 or P1 bitmaps of single grids.
//!
//! All integers are little-endian. Grids are packed row-major, most
//! significant bit first, which is the same bit order PBM uses.

pub mod cads;
pub mod capr;
mod frame;
pub mod pbm;
mod rules_text;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::rules::RuleError;

pub use cads::{read_cads, read_dataset, read_split, write_cads, write_dataset, CadsFile};
pub use capr::{read_predictions, write_predictions, PredictionFile, Predictions};
pub use frame::{frame_bytes, pack_frame, pack_msb, unpack_frame};
pub use pbm::{decode_pbm, encode_pbm, read_pbm, render_pbm, PbmMode};
pub use rules_text::{format_rules, parse_rules, read_rules, write_rules};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },
    #[error("unexpected end of data at byte {offset} (needed {needed} more bytes)")]
    Length { offset: u64, needed: u64 },
    #[error("line {line}: {source}")]
    Rule { line: usize, source: RuleError },
    #[error("{0}")]
    Invalid(String),
}

impl FormatError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, FormatError> {
    fs::read(path).map_err(|e| FormatError::io(path, e))
}

/// Writes through a temporary file in the same directory, then renames.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| FormatError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| FormatError::io(path, e))?;
    tmp.persist(path).map_err(|e| FormatError::io(path, e.error))?;
    Ok(())
}

/// Bounds-checked little-endian reader that remembers its byte offset.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn offset(&self) -> u64 {
        self.pos as u64
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.remaining() < n {
            return Err(FormatError::Length {
                offset: self.offset(),
                needed: (n - self.remaining()) as u64,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn f32(&mut self) -> Result<f32, FormatError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<(), FormatError> {
        let found = self.take(4).map_err(|_| FormatError::Format {
            offset: 0,
            reason: format!("file too short for {} magic", String::from_utf8_lossy(expected)),
        })?;
        if found != expected {
            return Err(FormatError::Format {
                offset: 0,
                reason: format!(
                    "bad magic {:?}, expected {}",
                    String::from_utf8_lossy(found),
                    String::from_utf8_lossy(expected)
                ),
            });
        }
        Ok(())
    }

    pub(crate) fn finish(&self) -> Result<(), FormatError> {
        if self.remaining() != 0 {
            return Err(FormatError::Format {
                offset: self.offset(),
                reason: format!("{} trailing bytes", self.remaining()),
            });
        }
        Ok(())
    }
}
