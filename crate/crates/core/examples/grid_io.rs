//! Dump a grid to the binary + JSON sidecar format, read it back, and
//! export CSV and a PGM heatmap.
//!
//! ```bash
//! cargo run --release --example grid_io
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let spec = GridSpec::on_box(-1.0, 1.0, 64, 2)?;
    let field = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| {
        (3.0 * x[0]).sin() * (2.0 * x[1]).cos()
    })?;

    let dir = std::env::temp_dir().join("homodiff_grid_io");
    std::fs::create_dir_all(&dir)?;
    let bin = dir.join("field.f64");
    io::write_grid(&field, &bin)?;
    io::write_grid_csv(&field, &dir.join("field.csv"))?;
    io::write_heatmap_pgm(&field, &dir.join("field.pgm"))?;

    let back = io::read_grid(&bin)?;
    assert_eq!(back.values(), field.values());
    println!("wrote and re-read {} nodes under {}", back.values().len(), dir.display());
    println!("files: field.f64, field.f64.json, field.csv, field.pgm");
    Ok(())
}
