//! Constellation files, metric reports and simulation outputs.
//!
//! Constellations are stored as a text (JSON) container with explicit
//! [re, im] pairs, row-major. Serialization uses shortest round-trip decimal
//! for every float, so write -> read reproduces points exactly and file
//! hashes are stable across platforms.

use crate::designer::{Constellation, DesignCase, DesignCriterion, Provenance, SparsePoint};
use crate::sim::SimResult;
use crate::stiefel::StiefelPoint;
use crate::{CMatrix64, Constellation64};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("inconsistent file: {0}")]
    Inconsistent(String),
    #[error("point {index} is not a valid Stiefel representative: {reason}")]
    BadPoint { index: usize, reason: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileHeader {
    pub format_version: u32,
    pub t: usize,
    pub m: usize,
    pub l: usize,
    /// Design case "i".."v", "random", or "external".
    pub design_case: String,
    pub criterion: Option<String>,
    pub x_star: Option<f64>,
    pub basis_ordering_id: String,
}

/// On-disk constellation container.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstellationFile {
    pub header: FileHeader,
    /// L points, each T rows of M [re, im] pairs.
    pub points: Vec<Vec<Vec<[f64; 2]>>>,
    /// L bit strings of length log2(L).
    pub labels: Vec<String>,
    /// Optional per-point row maps: row -> (column, [re, im]), null for zero rows.
    pub sparse: Option<Vec<Vec<Option<(usize, [f64; 2])>>>>,
}

fn case_string(prov: Option<&Provenance<f64>>) -> String {
    match prov {
        Some(p) => p.case.to_string(),
        None => "random".to_string(),
    }
}

impl ConstellationFile {
    pub fn from_constellation(c: &Constellation64) -> Self {
        let t = c.points[0].t();
        let m = c.points[0].m();
        let points = c
            .points
            .iter()
            .map(|p| {
                (0..t)
                    .map(|i| (0..m).map(|j| [p.data()[(i, j)].re, p.data()[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        let labels = c
            .labels
            .iter()
            .map(|&l| format!("{l:0width$b}", width = c.bits as usize))
            .collect();
        let sparse = c.sparse.as_ref().map(|all| {
            all.iter()
                .map(|sp| {
                    sp.iter()
                        .map(|e| e.map(|(col, v)| (col, [v.re, v.im])))
                        .collect()
                })
                .collect()
        });
        ConstellationFile {
            header: FileHeader {
                format_version: FORMAT_VERSION,
                t,
                m,
                l: c.points.len(),
                design_case: case_string(c.provenance.as_ref()),
                criterion: c.provenance.as_ref().map(|p| match p.criterion {
                    DesignCriterion::Dp => "dp".to_string(),
                    DesignCriterion::Ub => "ub".to_string(),
                }),
                x_star: c.provenance.as_ref().and_then(|p| p.x),
                basis_ordering_id: crate::basis::BASIS_ORDERING_ID.to_string(),
            },
            points,
            labels,
            sparse,
        }
    }

    /// Rebuilds the in-memory constellation, re-validating every point.
    pub fn to_constellation(&self) -> Result<Constellation64, FileError> {
        if self.points.len() != self.header.l || self.labels.len() != self.header.l {
            return Err(FileError::Inconsistent(format!(
                "header says L = {} but file has {} points / {} labels",
                self.header.l,
                self.points.len(),
                self.labels.len()
            )));
        }
        let (t, m) = (self.header.t, self.header.m);
        let mut points = Vec::with_capacity(self.header.l);
        for (index, rows) in self.points.iter().enumerate() {
            if rows.len() != t || rows.iter().any(|r| r.len() != m) {
                return Err(FileError::Inconsistent(format!(
                    "point {index} is not {t}x{m}"
                )));
            }
            let data = CMatrix64::from_fn(t, m, |i, j| {
                Complex::new(rows[i][j][0], rows[i][j][1])
            });
            let p = StiefelPoint::validate(data, 1e-8)
                .map_err(|e| FileError::BadPoint { index, reason: e.to_string() })?;
            points.push(p);
        }
        let bits = self.header.l.trailing_zeros();
        let mut labels = Vec::with_capacity(self.header.l);
        for (index, s) in self.labels.iter().enumerate() {
            let v = u32::from_str_radix(s, 2).map_err(|e| {
                FileError::Inconsistent(format!("label {index} ({s:?}): {e}"))
            })?;
            labels.push(v);
        }
        let sparse: Option<Vec<SparsePoint<f64>>> = self.sparse.as_ref().map(|all| {
            all.iter()
                .map(|sp| {
                    sp.iter()
                        .map(|e| e.map(|(col, v)| (col, Complex::new(v[0], v[1]))))
                        .collect()
                })
                .collect()
        });
        Ok(Constellation {
            points,
            labels,
            bits,
            sparse,
            provenance: provenance_from_header(&self.header),
        })
    }

    pub fn write_to(&self, path: &Path) -> Result<(), FileError> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self, FileError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn provenance_from_header(h: &FileHeader) -> Option<Provenance<f64>> {
    let case = match h.design_case.as_str() {
        "i" => DesignCase::I,
        "ii" => DesignCase::II,
        "iii" => DesignCase::III,
        "iv" => DesignCase::IV,
        "v" => DesignCase::V,
        _ => return None,
    };
    let criterion = match h.criterion.as_deref() {
        Some("ub") => DesignCriterion::Ub,
        _ => DesignCriterion::Dp,
    };
    // pairing structure is implicit in point order; nodes are not stored
    Some(Provenance { case, pair_nodes: (0..h.l / 2).collect(), x: h.x_star, criterion })
}

/// Canonical SHA-256 of the point data (row-major, shortest round-trip
/// decimals), hex-encoded.
pub fn constellation_hash(c: &Constellation64) -> String {
    let file = ConstellationFile::from_constellation(c);
    let canonical = serde_json::to_string(&file.points).expect("points serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// The four constellation metrics with argmin pairs, as reported by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub d_g_min: f64,
    pub d_c_min: f64,
    pub dp_min: f64,
    pub ub: f64,
    pub n_for_ub: usize,
    pub d_g_argmin: (usize, usize),
    pub d_c_argmin: (usize, usize),
    pub dp_argmin: (usize, usize),
}

impl MetricsReport {
    pub fn compute(c: &Constellation64, n_for_ub: usize) -> Self {
        let m = crate::metrics::constellation_metrics(&c.points, n_for_ub)
            .expect("constellation has >= 2 points");
        MetricsReport {
            d_g_min: m.d_g_min,
            d_c_min: m.d_c_min,
            dp_min: m.dp_min,
            ub: m.ub,
            n_for_ub,
            d_g_argmin: m.d_g_argmin,
            d_c_argmin: m.d_c_argmin,
            dp_argmin: m.dp_argmin,
        }
    }
}

impl std::fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "d_g(X)  = {:.4}  (pair {:?})", self.d_g_min, self.d_g_argmin)?;
        writeln!(f, "d_c(X)  = {:.4}  (pair {:?})", self.d_c_min, self.d_c_argmin)?;
        writeln!(f, "DP(X)   = {:.4}  (pair {:?})", self.dp_min, self.dp_argmin)?;
        write!(f, "UB(X)   = {:.6}  (N = {})", self.ub, self.n_for_ub)
    }
}

/// CSV emission for simulation results, one row per SNR point.
pub fn sim_result_csv(result: &SimResult) -> String {
    let mut out = String::from("snr_db,trials,sym_errors,bit_errors,ser,ber,ser_ci,ber_ci\n");
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.snr_db, p.trials, p.sym_errors, p.bit_errors, p.ser, p.ber, p.ser_ci, p.ber_ci
        ));
    }
    out
}

/// CSV emission for an x-sweep trace (the mapping-parameter figure data).
pub fn trace_csv(trace: &[crate::designer::TracePoint<f64>]) -> String {
    let mut out = String::from("x,d_g,d_c,dp,ub\n");
    for t in trace {
        out.push_str(&format!("{},{},{},{},{}\n", t.x, t.d_g, t.d_c, t.dp, t.ub));
    }
    out
}
