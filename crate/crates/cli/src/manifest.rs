//! JSON-lines manifest: one self-describing record per emitted pair, plus
//! failure records for sequences that had to be abandoned. The manifest
//! carries everything needed to regenerate any single pair bit-exactly:
//! the full camera profile, the exposure window, and the seed lineage.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rawblur_core::isp::CameraProfile;
use serde::{Deserialize, Serialize};

/// Which signal space the blurry frame was averaged in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Raw,
    Rgb,
}

/// Exposure window coordinates within the interpolated sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub start: usize,
    pub length: usize,
    pub center: usize,
}

/// How the per-sequence randomness was derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLineage {
    pub master: u64,
    pub profile: u64,
    pub windows: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifestEntry {
    Pair {
        sequence: String,
        window: WindowInfo,
        domain: Domain,
        profile: CameraProfile,
        /// Output paths relative to the manifest's directory.
        blurry: String,
        sharp: String,
        seeds: SeedLineage,
    },
    Failure {
        sequence: String,
        error: String,
    },
}

/// Writes entries as JSON lines.
pub fn write(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for entry in entries {
        serde_json::to_writer(&mut out, entry)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a JSON-lines manifest back, skipping blank lines.
pub fn read(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut entries = Vec::new();
    for (number, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: bad record", path.display(), number + 1))?;
        entries.push(entry);
    }
    Ok(entries)
}
