//! File formats: binary payloads of little-endian 64-bit floats with JSON
//! sidecar headers (trajectories, datasets, solutions) and small CSV
//! writers for logs and tables.
//!
//! A payload written and reread must be bit-exact; everything on disk is
//! `f64` regardless of the in-memory scalar type.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Boundary;
use crate::kinetic::{MomentSnapshot, MomentTrajectory, TrajectoryMeta};
use crate::moment_solver::{HyperbolicityReport, MomentSolution};
use crate::scalar::Scalar;
use crate::training::EpochRecord;

/// Schema version shared by the sidecar headers.
pub const FILE_VERSION: u32 = 1;

fn bin_path(stem: &Path) -> PathBuf {
    stem.with_extension("bin")
}

fn json_path(stem: &Path) -> PathBuf {
    stem.with_extension("json")
}

fn write_f64_block(values: impl Iterator<Item = f64>, out: &mut Vec<u8>) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn read_f64_block(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format("payload length is not a multiple of 8".into()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct TrajectoryHeader {
    version: u32,
    nx: usize,
    dx: f64,
    order: usize,
    quad_order: usize,
    boundary: Boundary,
    times: Vec<f64>,
    min_intensity: f64,
    meta: TrajectoryMeta,
}

/// Writes `<stem>.bin` + `<stem>.json`. The payload holds, per snapshot,
/// the moment block then the derivative block, each `(order + 1) * nx`
/// doubles.
pub fn write_trajectory<S: Scalar>(stem: &Path, traj: &MomentTrajectory<S>) -> Result<()> {
    let header = TrajectoryHeader {
        version: FILE_VERSION,
        nx: traj.nx,
        dx: traj.dx,
        order: traj.order,
        quad_order: traj.quad_order,
        boundary: traj.boundary,
        times: traj.times.clone(),
        min_intensity: traj.min_intensity,
        meta: traj.meta.clone(),
    };
    let mut payload = Vec::new();
    for snap in &traj.snapshots {
        write_f64_block(snap.moments.iter().map(|v| v.as_f64()), &mut payload);
        write_f64_block(snap.derivs.iter().map(|v| v.as_f64()), &mut payload);
    }
    fs::write(bin_path(stem), payload)?;
    fs::write(json_path(stem), serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

pub fn read_trajectory(stem: &Path) -> Result<MomentTrajectory<f64>> {
    let header: TrajectoryHeader = serde_json::from_str(&fs::read_to_string(json_path(stem))?)?;
    if header.version != FILE_VERSION {
        return Err(Error::Format(format!(
            "unsupported trajectory version {}",
            header.version
        )));
    }
    let raw = read_f64_block(&fs::read(bin_path(stem))?)?;
    let block = (header.order + 1) * header.nx;
    let per_snap = 2 * block;
    if raw.len() != per_snap * header.times.len() {
        return Err(Error::Format(format!(
            "trajectory payload holds {} doubles, expected {}",
            raw.len(),
            per_snap * header.times.len()
        )));
    }
    let snapshots = raw
        .chunks_exact(per_snap)
        .map(|chunk| MomentSnapshot {
            moments: chunk[..block].to_vec(),
            derivs: chunk[block..].to_vec(),
        })
        .collect();
    Ok(MomentTrajectory {
        nx: header.nx,
        dx: header.dx,
        order: header.order,
        quad_order: header.quad_order,
        boundary: header.boundary,
        times: header.times,
        snapshots,
        min_intensity: header.min_intensity,
        meta: header.meta,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct SolutionHeader {
    version: u32,
    nx: usize,
    order: usize,
    boundary: Boundary,
    closure: String,
    times: Vec<f64>,
    blowup: Option<(f64, usize, usize)>,
}

/// Writes a moment solution as `<stem>.bin` + `<stem>.json` (snapshots
/// only; diagnostics go to CSV via [`write_diagnostics_csv`]).
pub fn write_solution<S: Scalar>(stem: &Path, sol: &MomentSolution<S>) -> Result<()> {
    let header = SolutionHeader {
        version: FILE_VERSION,
        nx: sol.nx,
        order: sol.order,
        boundary: sol.boundary,
        closure: sol.closure_name.clone(),
        times: sol.times.clone(),
        blowup: sol.blowup.map(|b| (b.time, b.component, b.cell)),
    };
    let mut payload = Vec::new();
    for snap in &sol.snapshots {
        write_f64_block(snap.iter().map(|v| v.as_f64()), &mut payload);
    }
    fs::write(bin_path(stem), payload)?;
    fs::write(json_path(stem), serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

pub fn read_solution(stem: &Path) -> Result<MomentSolution<f64>> {
    let header: SolutionHeader = serde_json::from_str(&fs::read_to_string(json_path(stem))?)?;
    if header.version != FILE_VERSION {
        return Err(Error::Format(format!(
            "unsupported solution version {}",
            header.version
        )));
    }
    let raw = read_f64_block(&fs::read(bin_path(stem))?)?;
    let block = (header.order + 1) * header.nx;
    if raw.len() != block * header.times.len() {
        return Err(Error::Format("solution payload size mismatch".into()));
    }
    Ok(MomentSolution {
        nx: header.nx,
        order: header.order,
        boundary: header.boundary,
        closure_name: header.closure,
        times: header.times,
        snapshots: raw.chunks_exact(block).map(|c| c.to_vec()).collect(),
        report: HyperbolicityReport::default(),
        blowup: header.blowup.map(|(time, component, cell)| {
            crate::moment_solver::BlowupRecord {
                time,
                component,
                cell,
            }
        }),
    })
}

/// Writes a CSV file from string rows. Plain `Display` formatting of `f64`
/// round-trips exactly, so values can be parsed back bit-identically.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Diagnostics CSV with columns `time,imag_count,linf_norm`.
pub fn write_diagnostics_csv(path: &Path, report: &HyperbolicityReport) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .times
        .iter()
        .zip(&report.imag_counts)
        .zip(&report.linf)
        .map(|((t, c), l)| vec![t.to_string(), c.to_string(), l.to_string()])
        .collect();
    write_csv(path, &["time", "imag_count", "linf_norm"], &rows)
}

/// Training log CSV with columns
/// `epoch,lr,mse,relative_l2,val_relative_l2` (the last empty without a
/// validation split).
pub fn write_training_log(path: &Path, history: &[EpochRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = history
        .iter()
        .map(|r| {
            vec![
                r.epoch.to_string(),
                r.lr.to_string(),
                r.mse.to_string(),
                r.relative_l2.to_string(),
                r.val_relative_l2.map(|v| v.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(
        path,
        &["epoch", "lr", "mse", "relative_l2", "val_relative_l2"],
        &rows,
    )
}

/// Minimal CSV reader for the formats written here (no quoting or escapes).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty csv".into()))?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    Ok((header, rows))
}
