//! Grid import/export, CSV writing, and heatmap images.
//!
//! Grids dump as headerless row-major 64-bit little-endian floats with a
//! sidecar JSON descriptor `{dimension, cells, origin, spacing,
//! extension}`. CSV files are RFC-4180 style with a header row. Heatmaps
//! are plain portable graymaps, dependency-free and inspectable.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ExtensionPolicy, GridField, GridSpec};

/// Sidecar descriptor for a binary grid dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub dimension: usize,
    pub cells: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub extension: ExtensionPolicy,
}

impl GridDescriptor {
    pub fn of(field: &GridField) -> GridDescriptor {
        GridDescriptor {
            dimension: field.spec().dimension(),
            cells: field.spec().cells().to_vec(),
            origin: field.spec().origin().to_vec(),
            spacing: field.spec().spacing(),
            extension: field.extension(),
        }
    }
}

/// Write `<path>` (raw f64 little-endian, row-major) and `<path>.json`.
pub fn write_grid(field: &GridField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    let descriptor = GridDescriptor::of(field);
    let sidecar = sidecar_path(path);
    serde_json::to_writer_pretty(BufWriter::new(File::create(sidecar)?), &descriptor)?;
    Ok(())
}

/// Read a grid written by [`write_grid`].
pub fn read_grid(path: &Path) -> Result<GridField> {
    let descriptor: GridDescriptor =
        serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
    let spec = GridSpec::new(&descriptor.cells, &descriptor.origin, descriptor.spacing)?;
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() != spec.node_count() * 8 {
        return Err(Error::usage(format!(
            "grid file has {} bytes, expected {}",
            bytes.len(),
            spec.node_count() * 8
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::new(spec, values, descriptor.extension)
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".json");
    std::path::PathBuf::from(s)
}

/// CSV export of a grid: one node per row, coordinates then value.
pub fn write_grid_csv(field: &GridField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let dim = field.spec().dimension();
    let mut header: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
    header.push("value".to_string());
    writeln!(w, "{}", header.join(","))?;
    for (flat, pos) in field.spec().nodes() {
        let mut row: Vec<String> = pos.iter().map(|v| format!("{v:.17e}")).collect();
        row.push(format!("{:.17e}", field.values()[flat]));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Minimal RFC-4180 CSV writer: quotes fields containing separators or
/// quotes, always emits a header row.
pub struct CsvWriter<W: Write> {
    inner: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut inner: W, header: &[&str]) -> Result<Self> {
        let row: Vec<String> = header.iter().map(|s| escape(s)).collect();
        writeln!(inner, "{}", row.join(","))?;
        Ok(CsvWriter { inner })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        let row: Vec<String> = fields.iter().map(|s| escape(s)).collect();
        writeln!(self.inner, "{}", row.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write a 2D grid as a binary PGM heatmap, mapping values linearly from
/// [min, max] to [0, 255].
pub fn write_heatmap_pgm(field: &GridField, path: &Path) -> Result<()> {
    let spec = field.spec();
    if spec.dimension() != 2 {
        return Err(Error::usage(format!(
            "heatmaps are 2D only, grid is {}-dimensional",
            spec.dimension()
        )));
    }
    let (nx, ny) = (spec.cells()[0], spec.cells()[1]);
    let lo = field.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = field.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-300);
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    // Image rows scan the second axis downward.
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = field.values()[spec.flat_index(&[i, j])];
            let g = ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8;
            w.write_all(&[g])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trips_through_binary_dump() {
        let spec = GridSpec::on_box(-1.0, 1.0, 8, 2).unwrap();
        let field = GridField::from_fn(spec, ExtensionPolicy::Constant(0.5), |x| {
            x[0] * 3.0 - x[1]
        })
        .unwrap();
        let dir = std::env::temp_dir().join(format!("homodiff-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.f64");
        write_grid(&field, &path).unwrap();
        let back = read_grid(&path).unwrap();
        assert_eq!(back.spec(), field.spec());
        assert_eq!(back.values(), field.values());
        assert_eq!(back.extension(), field.extension());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_escapes_special_fields() {
        let mut buf = Vec::new();
        {
            let mut w = CsvWriter::new(&mut buf, &["a", "b"]).unwrap();
            w.row(&["plain".to_string(), "with,comma".to_string()]).unwrap();
            w.row(&["has \"quote\"".to_string(), "x".to_string()]).unwrap();
            w.finish().unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "a,b\nplain,\"with,comma\"\n\"has \"\"quote\"\"\",x\n"
        );
    }

    #[test]
    fn heatmap_has_pgm_header() {
        let spec = GridSpec::on_box(0.0, 1.0, 4, 2).unwrap();
        let field = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| x[0])
            .unwrap();
        let dir = std::env::temp_dir().join(format!("homodiff-pgm-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.pgm");
        write_heatmap_pgm(&field, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(bytes.len(), "P5\n4 4\n255\n".len() + 16);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
