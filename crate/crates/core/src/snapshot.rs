//! Field snapshots: one JSON header line followed by raw little-endian `f64` samples.
//!
//! Complex samples are stored interleaved as `re, im`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::SpectralGrid;

pub const SNAPSHOT_FORMAT: &str = "gpkdv-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub kind: SampleKind,
    pub origin: f64,
    pub length: f64,
    pub n_points: usize,
    #[serde(default)]
    pub twist: f64,
    pub time: f64,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

impl SnapshotHeader {
    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::with_origin(self.origin, self.length, self.n_points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotData {
    Real(RealField),
    Complex(ComplexField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: SnapshotData,
}

impl Snapshot {
    pub fn real(field: RealField, time: f64, labels: BTreeMap<String, String>) -> Self {
        let g = *field.grid();
        Self {
            header: header(SampleKind::Real, &g, 0.0, time, labels),
            data: SnapshotData::Real(field),
        }
    }

    pub fn complex(field: ComplexField, time: f64, labels: BTreeMap<String, String>) -> Self {
        let g = *field.grid();
        Self {
            header: header(SampleKind::Complex, &g, field.twist(), time, labels),
            data: SnapshotData::Complex(field),
        }
    }
}

fn header(
    kind: SampleKind,
    g: &SpectralGrid,
    twist: f64,
    time: f64,
    labels: BTreeMap<String, String>,
) -> SnapshotHeader {
    SnapshotHeader {
        format: SNAPSHOT_FORMAT.to_string(),
        version: SNAPSHOT_VERSION,
        kind,
        origin: g.origin(),
        length: g.length(),
        n_points: g.n_points(),
        twist,
        time,
        labels,
    }
}

pub fn encode(snap: &Snapshot) -> Vec<u8> {
    let mut out = serde_json::to_vec(&snap.header).expect("header serialises");
    out.push(b'\n');
    match &snap.data {
        SnapshotData::Real(f) => f
            .values()
            .iter()
            .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        SnapshotData::Complex(f) => f.values().iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }),
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let bad = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line".into()))?;
    let header: SnapshotHeader =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| bad(format!("header: {e}")))?;
    if header.format != SNAPSHOT_FORMAT || header.version != SNAPSHOT_VERSION {
        return Err(bad(format!(
            "unsupported format {} v{}",
            header.format, header.version
        )));
    }
    let grid = header.grid().map_err(|e| bad(e.to_string()))?;
    let body = &bytes[nl + 1..];
    let per = match header.kind {
        SampleKind::Real => 8,
        SampleKind::Complex => 16,
    };
    if body.len() != per * header.n_points {
        return Err(bad(format!(
            "expected {} data bytes, found {}",
            per * header.n_points,
            body.len()
        )));
    }
    let floats: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let data = match header.kind {
        SampleKind::Real => SnapshotData::Real(RealField::new(grid, floats)?),
        SampleKind::Complex => {
            let values = floats
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            SnapshotData::Complex(ComplexField::with_twist(grid, values, header.twist)?)
        }
    };
    Ok(Snapshot { header, data })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&encode(snap)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}
