use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use stoq_core::signed_graph::BoundCheck;
use stoq_core::spectra::DEGENERACY_RTOL;

use crate::config::{Family, Variant};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Loss,
    Tie,
}

/// Compares the non-stoquastic value against a stoquastic one. Values
/// closer than `DEGENERACY_RTOL · max(1, |a|, |b|)` tie.
pub fn classify(nonstoquastic: f64, stoquastic: f64, larger_wins: bool) -> Outcome {
    let scale = nonstoquastic.abs().max(stoquastic.abs()).max(1.0);
    let diff = nonstoquastic - stoquastic;
    if diff.abs() <= DEGENERACY_RTOL * scale {
        Outcome::Tie
    } else if (diff > 0.0) == larger_wins {
        Outcome::Win
    } else {
        Outcome::Loss
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub variant: Variant,
    /// Gap or TTS of the stoquasticized Hamiltonian.
    pub value: f64,
    /// Win means the non-stoquastic Hamiltonian did better.
    pub outcome: Outcome,
}

/// One instance of an experiment family, replayable from
/// `(master_seed, stream_id, catalyst_draw)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub family: Family,
    pub size: usize,
    /// Dense ensemble or catalyst mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub master_seed: u64,
    pub stream_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalyst_draw: Option<usize>,
    /// Gap or TTS of the original Hamiltonian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
    #[serde(default)]
    pub variants: Vec<VariantResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_star: Option<f64>,
    /// `E_0(s*) < ε_0(s*)`: the sector ground state is not the global one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_flag: Option<bool>,
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    /// Audited bounds (Cheeger family).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<BoundCheck>,
    #[serde(default)]
    pub hard_failures: Vec<String>,
    pub elapsed_ms: f64,
}

impl ExperimentRecord {
    pub fn new(family: Family, size: usize, master_seed: u64, stream_id: u64) -> Self {
        ExperimentRecord {
            family,
            size,
            group: None,
            master_seed,
            stream_id,
            catalyst_draw: None,
            baseline: None,
            variants: Vec::new(),
            s_star: None,
            global_flag: None,
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            hard_failures: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn variant(&self, v: Variant) -> Option<&VariantResult> {
        self.variants.iter().find(|r| r.variant == v)
    }

    /// Same instance and results, ignoring wall-clock time.
    pub fn same_result(&self, other: &ExperimentRecord) -> bool {
        let mut a = self.clone();
        a.elapsed_ms = other.elapsed_ms;
        &a == other
    }
}

/// Appends one JSON object per line.
pub struct RecordWriter {
    out: BufWriter<File>,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).write(true).truncate(true).open(path)?;
        Ok(RecordWriter {
            out: BufWriter::new(file),
        })
    }

    pub fn append(&mut self, record: &ExperimentRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
