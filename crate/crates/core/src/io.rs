//! CSV and JSON persistence for curves and trajectories.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! bytes depend only on the values.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{Component, Ends, SampleKind, Snapshot, Trajectory};
use crate::geometry::{GeometryError, PlanarCurve, Point};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `index,x,y` rows.
pub fn write_curve_csv<W: Write>(curve: &PlanarCurve, out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "x", "y"])?;
    for (i, p) in curve.nodes().iter().enumerate() {
        w.write_record([i.to_string(), p.re.to_string(), p.im.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn parse_f64(s: &str, row: usize) -> Result<f64, IoError> {
    s.trim().parse().map_err(|_| IoError::Row {
        row,
        message: format!("not a number: {s:?}"),
    })
}

/// Reads a curve written by [`write_curve_csv`]; rows must be in index order.
pub fn read_curve_csv<R: Read>(input: R, closed: bool) -> Result<PlanarCurve, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let mut nodes = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(IoError::Row {
                row,
                message: format!("expected index,x,y, got {} fields", rec.len()),
            });
        }
        if parse_f64(&rec[0], row)? as usize != row {
            return Err(IoError::Row {
                row,
                message: "indices out of order".into(),
            });
        }
        nodes.push(Point::new(parse_f64(&rec[1], row)?, parse_f64(&rec[2], row)?));
    }
    Ok(PlanarCurve::new(nodes, closed)?)
}

/// Writes `component,index,x,y` rows for every component.
pub fn write_snapshot_csv<W: Write>(components: &[Component], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["component", "index", "x", "y"])?;
    for (c, comp) in components.iter().enumerate() {
        for (i, p) in comp.curve.nodes().iter().enumerate() {
            w.write_record([c.to_string(), i.to_string(), p.re.to_string(), p.im.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Node lists per component index, from a snapshot CSV.
pub fn read_snapshot_csv<R: Read>(input: R) -> Result<Vec<Vec<Point>>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out: Vec<Vec<Point>> = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(IoError::Row {
                row,
                message: format!("expected component,index,x,y, got {} fields", rec.len()),
            });
        }
        let c = parse_f64(&rec[0], row)? as usize;
        if c > out.len() {
            return Err(IoError::Row {
                row,
                message: "component indices out of order".into(),
            });
        }
        if c == out.len() {
            out.push(Vec::new());
        }
        out[c].push(Point::new(parse_f64(&rec[2], row)?, parse_f64(&rec[3], row)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentMeta {
    pub label: String,
    pub ends: Ends,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub t: f64,
    pub step: u64,
    pub kind: SampleKind,
    pub components: Vec<ComponentMeta>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub snapshots: Vec<ManifestEntry>,
}

/// `snapshot_%06d.csv` per sample plus `manifest.json` in `dir`.
pub fn write_trajectory(trajectory: &Trajectory, dir: &Path) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(file_err(dir))?;
    let mut manifest = Manifest::default();
    for (k, s) in trajectory.snapshots.iter().enumerate() {
        let file = format!("snapshot_{k:06}.csv");
        let path = dir.join(&file);
        let f = fs::File::create(&path).map_err(file_err(&path))?;
        write_snapshot_csv(&s.components, std::io::BufWriter::new(f))?;
        manifest.snapshots.push(ManifestEntry {
            file,
            t: s.t,
            step: s.step,
            kind: s.kind,
            components: s
                .components
                .iter()
                .map(|c| ComponentMeta {
                    label: c.label.clone(),
                    ends: c.ends,
                })
                .collect(),
        });
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(&path, text).map_err(file_err(&path))?;
    Ok(())
}

/// Inverse of [`write_trajectory`].
pub fn read_trajectory(dir: &Path) -> Result<Trajectory, IoError> {
    let path = dir.join("manifest.json");
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&path).map_err(file_err(&path))?)?;
    let mut snapshots = Vec::with_capacity(manifest.snapshots.len());
    for e in manifest.snapshots {
        let path = dir.join(&e.file);
        let nodes = read_snapshot_csv(fs::File::open(&path).map_err(file_err(&path))?)?;
        if nodes.len() != e.components.len() {
            return Err(IoError::Row {
                row: 0,
                message: format!("{}: {} components, manifest lists {}", e.file, nodes.len(), e.components.len()),
            });
        }
        let components = nodes
            .into_iter()
            .zip(e.components)
            .map(|(z, m)| {
                let closed = matches!(m.ends, Ends::Closed);
                Ok(Component {
                    label: m.label,
                    curve: PlanarCurve::new(z, closed)?,
                    ends: m.ends,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        snapshots.push(Snapshot {
            t: e.t,
            step: e.step,
            kind: e.kind,
            components,
        });
    }
    Ok(Trajectory { snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::{circle, ray};

    #[test]
    fn curve_round_trip_is_exact() {
        let c = circle(Point::new(0.3, -1.0 / 3.0), 1.7, 37);
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        let back = read_curve_csv(buf.as_slice(), true).unwrap();
        assert_eq!(back, c);
        assert!(String::from_utf8(buf).unwrap().starts_with("index,x,y\n0,"));
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let traj = Trajectory {
            snapshots: vec![Snapshot {
                t: 0.125,
                step: 3,
                kind: SampleKind::Stride,
                components: vec![
                    Component::closed("c", circle(Point::new(2.0, 0.0), 0.5, 20)),
                    Component::clamped("r", ray(0.4, 3.0, 0.1)),
                ],
            }],
        };
        write_trajectory(&traj, dir.path()).unwrap();
        assert!(dir.path().join("snapshot_000000.csv").exists());
        assert_eq!(read_trajectory(dir.path()).unwrap(), traj);
    }

    #[test]
    fn malformed_rows_rejected() {
        let bad = "index,x,y\n0,1.0,nope\n";
        assert!(matches!(read_curve_csv(bad.as_bytes(), false), Err(IoError::Row { row: 0, .. })));
    }
}
