//! Trajectory files.
//!
//! Schema version 1.
//!
//! CSV, one row per (round, agent):
//!
//! | column | meaning |
//! |---|---|
//! | `round`, `agent` | indices, agents 0-based |
//! | `p0 .. p{d-1}` | position at the start of the round |
//! | `c0 .. c{d-1}`, `radius` | agent's ball estimate (ball logic) |
//! | `lo0 .. lo{d-1}`, `hi0 .. hi{d-1}` | agent's box estimate (box logic) |
//! | `consensus` | detector has fired (`true`/`false`) |
//!
//! JSON lines, one [`RoundRecord`] object per round. Floats are written
//! with round-trip precision, so [`read_jsonl`] reproduces them bit for bit.
//!
//! Plot data (2-D only), one row per (round, agent): `round,agent,x,y`
//! followed by `cx,cy,r` for balls or `lo_x,lo_y,hi_x,hi_y` for boxes.
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::consensus::{MebLogicState, MeoLogicState};
use crate::control::LawState;
use crate::error::{Error, Result};
use crate::netcore::{Snapshot, Trajectory};
use crate::sim::run::RunTrajectory;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Jsonl,
}

/// An agent's shape estimate in file form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeRecord {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

/// What the exporters need from a logic state.
pub trait LogicView {
    fn shape_record(&self) -> ShapeRecord;
    fn consensus(&self) -> bool;
}

impl LogicView for LawState<MebLogicState> {
    fn shape_record(&self) -> ShapeRecord {
        let ball = self.flood.ball();
        ShapeRecord::Ball {
            center: ball.center().coords().to_vec(),
            radius: ball.radius(),
        }
    }

    fn consensus(&self) -> bool {
        self.consensus
    }
}

impl LogicView for LawState<MeoLogicState> {
    fn shape_record(&self) -> ShapeRecord {
        let o = self.flood.orthotope();
        ShapeRecord::Box {
            lo: o.lo().to_vec(),
            hi: o.hi().to_vec(),
        }
    }

    fn consensus(&self) -> bool {
        self.consensus
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub schema_version: u32,
    pub round: usize,
    pub positions: Vec<Vec<f64>>,
    /// Controls applied during the previous round; absent at round 0.
    pub controls: Option<Vec<Vec<f64>>>,
    pub blocked: Vec<bool>,
    /// Communication edges `(i, j)`, `i < j`.
    pub edges: Vec<(usize, usize)>,
    pub shapes: Vec<ShapeRecord>,
    pub consensus: Vec<bool>,
}

impl RoundRecord {
    pub fn from_snapshot<L: LogicView>(s: &Snapshot<L>) -> Self {
        RoundRecord {
            schema_version: SCHEMA_VERSION,
            round: s.round,
            positions: s.positions.iter().map(|p| p.coords().to_vec()).collect(),
            controls: s.controls.clone(),
            blocked: s.blocked.clone(),
            edges: s.graph.edges().collect(),
            shapes: s.logic.iter().map(LogicView::shape_record).collect(),
            consensus: s.logic.iter().map(LogicView::consensus).collect(),
        }
    }
}

pub fn records<L: LogicView>(traj: &Trajectory<L>) -> Vec<RoundRecord> {
    traj.snapshots.iter().map(RoundRecord::from_snapshot).collect()
}

impl RunTrajectory {
    pub fn records(&self) -> Vec<RoundRecord> {
        match self {
            RunTrajectory::Meb(t) => records(t),
            RunTrajectory::Meo(t) => records(t),
        }
    }

    pub fn export(&self, path: impl AsRef<Path>, format: Format) -> Result<()> {
        match self {
            RunTrajectory::Meb(t) => export_trajectory(t, path, format),
            RunTrajectory::Meo(t) => export_trajectory(t, path, format),
        }
    }

    pub fn emit_plot_data(&self, path: impl AsRef<Path>) -> Result<()> {
        match self {
            RunTrajectory::Meb(t) => emit_plot_data(t, path),
            RunTrajectory::Meo(t) => emit_plot_data(t, path),
        }
    }
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

/// Writes through `body` into a temporary file, then renames it to `path`.
pub fn write_atomic(
    path: impl AsRef<Path>,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let path = path.as_ref();
    let tmp = temp_sibling(path);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        let file = w.into_inner().map_err(|e| e.into_error())?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn shape_header(shape: &ShapeRecord, d: usize) -> Vec<String> {
    match shape {
        ShapeRecord::Ball { .. } => (0..d)
            .map(|a| format!("c{a}"))
            .chain(std::iter::once("radius".to_string()))
            .collect(),
        ShapeRecord::Box { .. } => (0..d)
            .map(|a| format!("lo{a}"))
            .chain((0..d).map(|a| format!("hi{a}")))
            .collect(),
    }
}

fn shape_fields(shape: &ShapeRecord) -> Vec<f64> {
    match shape {
        ShapeRecord::Ball { center, radius } => center.iter().copied().chain([*radius]).collect(),
        ShapeRecord::Box { lo, hi } => lo.iter().chain(hi).copied().collect(),
    }
}

/// CSV header for a trajectory of dimension `d` whose logic looks like `shape`.
pub fn csv_header(shape: &ShapeRecord, d: usize) -> Vec<String> {
    let mut h = vec!["round".to_string(), "agent".to_string()];
    h.extend((0..d).map(|a| format!("p{a}")));
    h.extend(shape_header(shape, d));
    h.push("consensus".to_string());
    h
}

pub fn export_trajectory<L: LogicView>(
    traj: &Trajectory<L>,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    let recs = records(traj);
    match format {
        Format::Jsonl => write_atomic(path, |w| {
            for r in &recs {
                serde_json::to_writer(&mut *w, r)?;
                w.write_all(b"\n")?;
            }
            Ok(())
        }),
        Format::Csv => write_atomic(path, |w| {
            let mut out = csv::Writer::from_writer(w);
            let first = &recs[0];
            let d = first.positions.first().map_or(0, Vec::len);
            if let Some(shape) = first.shapes.first() {
                out.write_record(csv_header(shape, d))?;
            }
            for r in &recs {
                for (agent, p) in r.positions.iter().enumerate() {
                    let mut row = vec![r.round.to_string(), agent.to_string()];
                    row.extend(p.iter().map(f64::to_string));
                    row.extend(shape_fields(&r.shapes[agent]).iter().map(f64::to_string));
                    row.push(r.consensus[agent].to_string());
                    out.write_record(&row)?;
                }
            }
            out.flush()?;
            Ok(())
        }),
    }
}

/// Reads a JSON-lines trajectory written by [`export_trajectory`].
pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<RoundRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RoundRecord = serde_json::from_str(&line)?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "line {}: schema version {} is not supported",
                i + 1,
                rec.schema_version
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

/// Position traces plus each agent's per-round shape estimate, for 2-D runs.
pub fn emit_plot_data<L: LogicView>(traj: &Trajectory<L>, path: impl AsRef<Path>) -> Result<()> {
    let d = traj.snapshots[0].positions.first().map_or(0, |p| p.dim());
    if d != 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let recs = records(traj);
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["round", "agent", "x", "y"];
        match recs[0].shapes.first() {
            Some(ShapeRecord::Ball { .. }) => header.extend(["cx", "cy", "r"]),
            Some(ShapeRecord::Box { .. }) => header.extend(["lo_x", "lo_y", "hi_x", "hi_y"]),
            None => {}
        }
        out.write_record(&header)?;
        for r in &recs {
            for (agent, p) in r.positions.iter().enumerate() {
                let mut row = vec![r.round.to_string(), agent.to_string()];
                row.extend(p.iter().map(f64::to_string));
                row.extend(shape_fields(&r.shapes[agent]).iter().map(f64::to_string));
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    })
}
