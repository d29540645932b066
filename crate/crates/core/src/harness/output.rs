//! File formats: binary PGM escape-time images, `VOX1` occupancy grids,
//! metrics CSV and a sha256 manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::format_real;
use crate::error::{Error, Result};
use crate::render::{BinaryGrid, Field2D, Field3D};

/// Grey level of a cell: 0 when in the set, `55 + floor(200 t / L)` when it
/// escaped at iteration `t`.
pub fn shade(escape: Option<u32>, budget: u32) -> u8 {
    match escape {
        None => 0,
        Some(t) => (55 + (200 * u64::from(t.min(budget))) / u64::from(budget)) as u8,
    }
}

/// Binary PGM of row-major escape times (row 0 at the bottom of the window);
/// the image is written top row first.
pub fn encode_pgm(times: &[Option<u32>], nx: usize, ny: usize, budget: u32) -> Result<Vec<u8>> {
    if times.len() != nx * ny {
        return Err(Error::dimension(format!(
            "{} escape times for a {nx}x{ny} image",
            times.len()
        )));
    }
    if budget == 0 {
        return Err(Error::domain("iteration budget must be at least 1"));
    }
    let mut bytes = format!("P5 {nx} {ny} 255\n").into_bytes();
    bytes.reserve(nx * ny);
    for row in times.chunks(nx.max(1)).rev() {
        bytes.extend(row.iter().map(|&t| shade(t, budget)));
    }
    Ok(bytes)
}

/// Which layer of a planar field to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Node(usize),
    Intersection,
}

pub fn encode_field_image(field: &Field2D, layer: Layer) -> Result<Vec<u8>> {
    let times = match layer {
        Layer::Node(k) if k < field.nodes() => field.node_escape_times(k),
        Layer::Node(k) => {
            return Err(Error::dimension(format!(
                "node {k} out of range for a {}-node field",
                field.nodes()
            )))
        }
        Layer::Intersection => field.intersection_escape_times(),
    };
    encode_pgm(&times, field.window.nx, field.window.ny, field.budget)
}

/// `VOX1 nx ny nz\n` followed by one 0/1 byte per cell, x fastest.
pub fn encode_voxels(grid: &BinaryGrid) -> Vec<u8> {
    let [nx, ny, nz] = grid.dims();
    let mut bytes = format!("VOX1 {nx} {ny} {nz}\n").into_bytes();
    bytes.extend(grid.cells().iter().map(|&on| u8::from(on)));
    bytes
}

pub fn write_image(field: &Field2D, layer: Layer, path: &Path) -> Result<()> {
    write_file(path, &encode_field_image(field, layer)?)
}

pub fn write_voxels(field: &Field3D, path: &Path) -> Result<()> {
    write_file(path, &encode_voxels(&field.occupancy()))
}

pub fn write_metrics(rows: &[MetricsRow], path: &Path) -> Result<()> {
    write_file(path, metrics_csv(rows).as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub job_id: String,
    pub model: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub f: Option<f64>,
    /// Parameter entries, already formatted.
    pub c: Vec<String>,
    pub budget: u32,
    pub radius: f64,
    pub resolution: Vec<usize>,
    pub component_count: usize,
    pub occupied_cells: usize,
    pub boxdim_slope: Option<f64>,
    pub boxdim_r2: Option<f64>,
}

pub const METRICS_HEADER: &str =
    "job_id,model,a,b,f,c,L,R,resolution,component_count,occupied_cells,boxdim_slope,boxdim_r2";

fn optional(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

/// Header plus one line per row. Parameter entries are joined with `;` and
/// the resolution with `x`.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for row in rows {
        let resolution: Vec<String> = row.resolution.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.job_id,
            row.model,
            optional(row.a),
            optional(row.b),
            optional(row.f),
            row.c.join(";"),
            row.budget,
            format_real(row.radius),
            resolution.join("x"),
            row.component_count,
            row.occupied_cells,
            optional(row.boxdim_slope),
            optional(row.boxdim_r2),
        );
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files written by a job, relative to its output directory, with their
/// content hashes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub entries: Vec<(PathBuf, String)>,
}

impl Manifest {
    pub const FILE_NAME: &'static str = "manifest.txt";

    /// `sha256sum`-style lines sorted by path.
    pub fn to_text(&self) -> String {
        let mut entries = self.entries.clone();
        entries.sort();
        entries
            .iter()
            .map(|(path, hash)| format!("{hash}  {}\n", path.display()))
            .collect()
    }
}

/// Writes every artifact under `dir` and returns their manifest; the
/// manifest file itself is written last and not listed.
pub fn write_artifacts(dir: &Path, artifacts: &[(String, Vec<u8>)]) -> Result<Manifest> {
    let mut manifest = Manifest::default();
    for (name, bytes) in artifacts {
        write_file(&dir.join(name), bytes)?;
        manifest.entries.push((PathBuf::from(name), sha256_hex(bytes)));
    }
    manifest.entries.sort();
    write_file(&dir.join(Manifest::FILE_NAME), manifest.to_text().as_bytes())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bounded_image() {
        let bytes = encode_pgm(&[None; 4], 2, 2, 100).unwrap();
        assert_eq!(bytes, b"P5 2 2 255\n\0\0\0\0");
    }

    #[test]
    fn shading_and_row_order() {
        assert_eq!(shade(Some(0), 100), 55);
        assert_eq!(shade(Some(50), 100), 155);
        assert_eq!(shade(Some(100), 100), 255);
        assert_eq!(shade(Some(1), 3), 121);
        let bytes = encode_pgm(&[Some(0), None, Some(100), Some(50)], 2, 2, 100).unwrap();
        assert_eq!(&bytes[11..], &[255, 155, 55, 0]);
        assert!(encode_pgm(&[None; 3], 2, 2, 100).is_err());
    }

    #[test]
    fn single_voxel() {
        let grid = BinaryGrid::new_3d(1, 1, 1, vec![true]).unwrap();
        assert_eq!(encode_voxels(&grid), b"VOX1 1 1 1\n\x01");
    }

    #[test]
    fn metrics_rows() {
        let row = MetricsRow {
            job_id: "j".into(),
            model: "simple-dual".into(),
            a: Some(0.0),
            b: None,
            f: None,
            c: vec![],
            budget: 100,
            radius: 10.0,
            resolution: vec![4, 4],
            component_count: 1,
            occupied_cells: 3,
            boxdim_slope: None,
            boxdim_r2: None,
        };
        let csv = metrics_csv(&[row.clone(), row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], METRICS_HEADER);
        assert_eq!(
            lines[1],
            "j,simple-dual,0.0000000000000000e0,,,,100,1.0000000000000000e1,4x4,1,3,,"
        );
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
