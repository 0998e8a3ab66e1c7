//! CADS sample files.
//!
//! ```text
//! "CADS" | version u8 = 1 | boundary u8 (0 dead, 1 toroidal) | k u8 | reserved u8
//! H u32 | W u32 | rule_count u32
//! per rule:   notation length u16 | UTF-8 canonical notation
//! sample_count u64
//! per sample: rule_id u32 | k + 1 frame blocks (inputs oldest first, then target)
//! ```
//!
//! A built dataset is stored as a directory holding `spec.cfg` and one CADS
//! file per split (`train.cads`, `val.cads`, `test.cads`). A simulated
//! trajectory is a CADS file with one sample whose `k` equals the step count.

use std::fs;
use std::path::Path;

use super::frame::{frame_bytes, pack_frame, unpack_frame};
use super::{read_file, write_atomic, FormatError, Reader};
use crate::dataset::{Dataset, DatasetSpec, Sample, Split};
use crate::engine::Trajectory;
use crate::grid::{Boundary, Grid};
use crate::rules::{Rule, RuleSet};

const MAGIC: &[u8; 4] = b"CADS";
const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CadsFile {
    pub boundary: Boundary,
    pub k: usize,
    pub height: usize,
    pub width: usize,
    pub rules: Vec<Rule>,
    pub samples: Vec<Sample>,
}

impl CadsFile {
    /// One split of a dataset.
    pub fn from_split(dataset: &Dataset, split: Split) -> Self {
        Self {
            boundary: dataset.spec.boundary,
            k: dataset.spec.k,
            height: dataset.spec.grid_height,
            width: dataset.spec.grid_width,
            rules: dataset.rules(split).rules.clone(),
            samples: dataset.samples(split).to_vec(),
        }
    }

    /// A whole trajectory as a single sample; needs 1 to 255 steps.
    pub fn from_trajectory(trajectory: &Trajectory) -> Result<Self, FormatError> {
        let steps = trajectory.steps();
        if steps == 0 || steps > u8::MAX as usize {
            return Err(FormatError::Invalid(format!(
                "trajectory files hold 1 to 255 steps, got {steps}"
            )));
        }
        let first = trajectory.initial();
        Ok(Self {
            boundary: trajectory.boundary,
            k: steps,
            height: first.height(),
            width: first.width(),
            rules: vec![trajectory.rule.clone()],
            samples: vec![Sample {
                rule_id: 0,
                inputs: trajectory.states[..steps].to_vec(),
                target: trajectory.states[steps].clone(),
            }],
        })
    }

    /// Each sample's frames in time order.
    pub fn sequences(&self) -> Vec<Vec<Grid>> {
        self.samples
            .iter()
            .map(|s| s.frames().cloned().collect())
            .collect()
    }

    pub fn rule_set(&self, label: &str) -> RuleSet {
        RuleSet::new(label, self.rules.clone())
    }

    pub fn encode(&self) -> Result<Vec<u8>, FormatError> {
        let invalid = |msg: String| Err(FormatError::Invalid(msg));
        if self.k == 0 || self.k > u8::MAX as usize {
            return invalid(format!("k = {} does not fit the 1..=255 range", self.k));
        }
        if self.height == 0
            || self.width == 0
            || self.height > u32::MAX as usize
            || self.width > u32::MAX as usize
        {
            return invalid(format!("bad frame size {}x{}", self.height, self.width));
        }
        let frame_len = frame_bytes(self.height, self.width);
        let mut out = Vec::with_capacity(32 + self.samples.len() * (4 + (self.k + 1) * frame_len));
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(match self.boundary {
            Boundary::Dead => 0,
            Boundary::Toroidal => 1,
        });
        out.push(self.k as u8);
        out.push(0);
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.rules.len() as u32).to_le_bytes());
        for rule in &self.rules {
            let text = rule.notation();
            let len = u16::try_from(text.len())
                .map_err(|_| FormatError::Invalid(format!("rule notation too long: {} bytes", text.len())))?;
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(text.as_bytes());
        }
        out.extend_from_slice(&(self.samples.len() as u64).to_le_bytes());
        for (i, sample) in self.samples.iter().enumerate() {
            if sample.inputs.len() != self.k {
                return invalid(format!(
                    "sample {i} has {} inputs, expected {}",
                    sample.inputs.len(),
                    self.k
                ));
            }
            if let Some(g) = sample.frames().find(|g| g.dims() != (self.height, self.width)) {
                return invalid(format!(
                    "sample {i} has a {}x{} frame in a {}x{} file",
                    g.height(),
                    g.width(),
                    self.height,
                    self.width
                ));
            }
            out.extend_from_slice(&sample.rule_id.to_le_bytes());
            for frame in sample.frames() {
                pack_frame(frame, &mut out);
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
                reason: format!("unsupported CADS version {version}"),
            });
        }
        let boundary = match r.u8()? {
            0 => Boundary::Dead,
            1 => Boundary::Toroidal,
            other => {
                return Err(FormatError::Format {
                    offset: 5,
                    reason: format!("unknown boundary code {other}"),
                })
            }
        };
        let k = r.u8()? as usize;
        if k == 0 {
            return Err(FormatError::Format {
                offset: 6,
                reason: "k must be at least 1".into(),
            });
        }
        let _reserved = r.u8()?;
        let height = r.u32()? as usize;
        let width = r.u32()? as usize;
        if height == 0 || width == 0 {
            return Err(FormatError::Format {
                offset: 8,
                reason: format!("bad frame size {height}x{width}"),
            });
        }
        let rule_count = r.u32()? as usize;
        let mut rules = Vec::with_capacity(rule_count.min(r.remaining() / 2));
        for _ in 0..rule_count {
            let len = r.u16()? as usize;
            let at = r.offset();
            let text = std::str::from_utf8(r.take(len)?).map_err(|_| FormatError::Format {
                offset: at,
                reason: "rule notation is not UTF-8".into(),
            })?;
            let rule = Rule::parse(text).map_err(|e| FormatError::Format {
                offset: at,
                reason: format!("bad rule `{text}`: {e}"),
            })?;
            rules.push(rule);
        }
        let sample_count = r.u64()?;
        let frame_len = frame_bytes(height, width);
        let per_sample = 4 + (k + 1) * frame_len;
        let mut samples = Vec::with_capacity((sample_count as usize).min(r.remaining() / per_sample));
        for _ in 0..sample_count {
            let rule_id = r.u32()?;
            let mut frames = Vec::with_capacity(k + 1);
            for _ in 0..=k {
                frames.push(unpack_frame(height, width, r.take(frame_len)?));
            }
            let target = frames.pop().expect("k + 1 frames");
            samples.push(Sample {
                rule_id,
                inputs: frames,
                target,
            });
        }
        r.finish()?;
        Ok(Self {
            boundary,
            k,
            height,
            width,
            rules,
            samples,
        })
    }
}

pub fn write_cads(path: &Path, file: &CadsFile) -> Result<(), FormatError> {
    write_atomic(path, &file.encode()?)
}

pub fn read_cads(path: &Path) -> Result<CadsFile, FormatError> {
    CadsFile::decode(&read_file(path)?)
}

fn split_file(dir: &Path, split: Split) -> std::path::PathBuf {
    dir.join(format!("{}.cads", split.as_str()))
}

/// A split from either a dataset directory or a single CADS file.
pub fn read_split(path: &Path, split: Split) -> Result<CadsFile, FormatError> {
    if path.is_dir() {
        read_cads(&split_file(path, split))
    } else {
        read_cads(path)
    }
}

/// Writes `spec.cfg` and one CADS file per split into `dir`.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<(), FormatError> {
    fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
    write_atomic(&dir.join("spec.cfg"), dataset.spec.to_config_string().as_bytes())?;
    for split in Split::ALL {
        write_cads(&split_file(dir, split), &CadsFile::from_split(dataset, split))?;
    }
    Ok(())
}

pub fn read_dataset(dir: &Path) -> Result<Dataset, FormatError> {
    let cfg_path = dir.join("spec.cfg");
    let cfg = String::from_utf8(read_file(&cfg_path)?)
        .map_err(|_| FormatError::Invalid(format!("{}: not UTF-8", cfg_path.display())))?;
    let spec = DatasetSpec::from_config_str(&cfg)
        .map_err(|e| FormatError::Invalid(format!("{}: {e}", cfg_path.display())))?;

    let mut files = Vec::with_capacity(3);
    for split in Split::ALL {
        let file = read_cads(&split_file(dir, split))?;
        let header = (file.boundary, file.k, file.height, file.width);
        let expected = (spec.boundary, spec.k, spec.grid_height, spec.grid_width);
        if header != expected {
            return Err(FormatError::Invalid(format!(
                "{split}.cads header {header:?} disagrees with spec.cfg {expected:?}"
            )));
        }
        files.push(file);
    }
    let [train, val, test]: [CadsFile; 3] = files.try_into().expect("three splits");
    if val.rules != train.rules {
        return Err(FormatError::Invalid(
            "val.cads rule table differs from train.cads".into(),
        ));
    }
    Ok(Dataset {
        spec,
        train_rules: train.rule_set("train"),
        test_rules: test.rule_set("test"),
        train: train.samples,
        val: val.samples,
        test: test.samples,
    })
}
