//! Field snapshots on the physical grid: a JSON header next to either a CSV
//! table or a flat little-endian `f64` file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{ChannelGrid, GridSpec, ScalarField, VelocityField};

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad header {path}: {source}")]
    Header { path: PathBuf, source: serde_json::Error },
    #[error("csv error on {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: expected {expected} values, found {found}")]
    Size { path: PathBuf, expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

/// Layout description written next to every snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub grid: GridSpec,
    pub time: f64,
    pub format: SnapshotFormat,
    /// Component names in storage order.
    pub components: Vec<String>,
    /// `x_m = 2π m / n_x`.
    pub x: Vec<f64>,
    /// Chebyshev–Gauss–Lobatto nodes, `z_0 = 0`.
    pub z: Vec<f64>,
    /// How values are ordered in the data file.
    pub layout: String,
    /// Data file name, relative to the header.
    pub data_file: String,
    pub endianness: Option<String>,
}

/// Physical values per component, each `n_x * n_z` long with index `m * n_z + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_velocity(u: &VelocityField, time: f64, format: SnapshotFormat) -> Self {
        let (a, b) = u.to_physical();
        Self::build(&u.grid, time, format, vec![("u1".into(), a), ("u2".into(), b)])
    }

    pub fn from_scalar(f: &ScalarField, name: &str, time: f64, format: SnapshotFormat) -> Self {
        Self::build(&f.grid, time, format, vec![(name.to_string(), f.to_physical())])
    }

    fn build(grid: &ChannelGrid, time: f64, format: SnapshotFormat, comps: Vec<(String, Vec<f64>)>) -> Self {
        let (components, data): (Vec<_>, Vec<_>) = comps.into_iter().unzip();
        let layout = match format {
            SnapshotFormat::Csv => "one row per grid point: x, z, then one column per component".to_string(),
            SnapshotFormat::Binary => {
                "f64 values, index (c * n_x + m) * n_z + j for component c, x index m, z index j".to_string()
            }
        };
        Self {
            header: SnapshotHeader {
                grid: grid.spec(),
                time,
                format,
                components,
                x: grid.x(),
                z: grid.z().to_vec(),
                layout,
                data_file: String::new(),
                endianness: (format == SnapshotFormat::Binary).then(|| "little".to_string()),
            },
            data,
        }
    }

    /// Writes `<stem>.json` and `<stem>.csv` or `<stem>.bin`; returns both paths.
    pub fn write(&mut self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf), SnapshotError> {
        let ext = match self.header.format {
            SnapshotFormat::Csv => "csv",
            SnapshotFormat::Binary => "bin",
        };
        self.header.data_file = format!("{stem}.{ext}");
        let data_path = dir.join(&self.header.data_file);
        let header_path = dir.join(format!("{stem}.json"));
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| SnapshotError::Io { path, source }
        };
        match self.header.format {
            SnapshotFormat::Csv => {
                let csv_err = |source| SnapshotError::Csv {
                    path: data_path.clone(),
                    source,
                };
                let mut w = csv::Writer::from_path(&data_path).map_err(csv_err)?;
                let mut head = vec!["x".to_string(), "z".to_string()];
                head.extend(self.header.components.iter().cloned());
                w.write_record(&head).map_err(csv_err)?;
                let nz = self.header.z.len();
                for (m, x) in self.header.x.iter().enumerate() {
                    for (j, z) in self.header.z.iter().enumerate() {
                        let mut row = vec![x.to_string(), z.to_string()];
                        row.extend(self.data.iter().map(|c| c[m * nz + j].to_string()));
                        w.write_record(&row).map_err(csv_err)?;
                    }
                }
                w.flush().map_err(io(&data_path))?;
            }
            SnapshotFormat::Binary => {
                let mut bytes = Vec::with_capacity(8 * self.data.iter().map(Vec::len).sum::<usize>());
                for v in self.data.iter().flatten() {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
                fs::write(&data_path, bytes).map_err(io(&data_path))?;
            }
        }
        let mut f = fs::File::create(&header_path).map_err(io(&header_path))?;
        let text = serde_json::to_string_pretty(&self.header).map_err(|source| SnapshotError::Header {
            path: header_path.clone(),
            source,
        })?;
        f.write_all(text.as_bytes()).map_err(io(&header_path))?;
        Ok((header_path, data_path))
    }

    /// Reads a snapshot back from its header file.
    pub fn read(header_path: &Path) -> Result<Self, SnapshotError> {
        let text = fs::read_to_string(header_path).map_err(|source| SnapshotError::Io {
            path: header_path.to_path_buf(),
            source,
        })?;
        let header: SnapshotHeader = serde_json::from_str(&text).map_err(|source| SnapshotError::Header {
            path: header_path.to_path_buf(),
            source,
        })?;
        let data_path = header_path.with_file_name(&header.data_file);
        let n = header.x.len() * header.z.len();
        let nc = header.components.len();
        let mut data = vec![Vec::with_capacity(n); nc];
        match header.format {
            SnapshotFormat::Csv => {
                let csv_err = |source| SnapshotError::Csv {
                    path: data_path.clone(),
                    source,
                };
                let mut r = csv::Reader::from_path(&data_path).map_err(csv_err)?;
                for rec in r.deserialize::<Vec<f64>>() {
                    let row = rec.map_err(csv_err)?;
                    for (c, v) in row.into_iter().skip(2).enumerate().take(nc) {
                        data[c].push(v);
                    }
                }
            }
            SnapshotFormat::Binary => {
                let bytes = fs::read(&data_path).map_err(|source| SnapshotError::Io {
                    path: data_path.clone(),
                    source,
                })?;
                let vals: Vec<f64> = bytes
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
                    .collect();
                if vals.len() != n * nc {
                    return Err(SnapshotError::Size {
                        path: data_path,
                        expected: n * nc,
                        found: vals.len(),
                    });
                }
                for (c, chunk) in vals.chunks(n).enumerate() {
                    data[c] = chunk.to_vec();
                }
            }
        }
        for d in &data {
            if d.len() != n {
                return Err(SnapshotError::Size {
                    path: data_path,
                    expected: n,
                    found: d.len(),
                });
            }
        }
        Ok(Self { header, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::default_initial_velocity;

    #[test]
    fn round_trip_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let g = ChannelGrid::with_dims(8, 17, 1.0).unwrap();
        let u = default_initial_velocity(&g);
        for (fmt, stem) in [(SnapshotFormat::Csv, "a"), (SnapshotFormat::Binary, "b")] {
            let mut s = Snapshot::from_velocity(&u, 0.25, fmt);
            let (h, _) = s.write(dir.path(), stem).unwrap();
            let back = Snapshot::read(&h).unwrap();
            assert_eq!(back.header, s.header);
            // ryu-style shortest formatting round-trips exactly
            assert_eq!(back.data, s.data);
        }
    }
}
