//! CSV and legacy-VTK writers for reconstructed 3D fields.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), enough for an
//! exact `f64` round-trip through text.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::postprocess::Field3D;

fn export_err(path: &Path, source: std::io::Error) -> Error {
    Error::Export { path: path.display().to_string(), source }
}

/// Writes one point per row: `x,y,z,u1,u2,u3,w1,w2,w3,p`.
pub fn write_csv(path: &Path, field: &Field3D) -> Result<()> {
    let file = File::create(path).map_err(|e| export_err(path, e))?;
    let mut out = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(out, "x,y,z,u1,u2,u3,w1,w2,w3,p")?;
        for i in 0..field.points.len() {
            let p = field.points[i];
            let u = field.velocity[i];
            let w = field.microrotation[i];
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p[0], p[1], p[2], u[0], u[1], u[2], w[0], w[1], w[2], field.pressure[i]
            )?;
        }
        out.flush()
    })()
    .map_err(|e| export_err(path, e))
}

/// Writes a legacy ASCII VTK structured grid with point data arrays
/// `velocity`, `microrotation` (vectors) and `pressure` (scalars).
pub fn write_vtk(path: &Path, field: &Field3D) -> Result<()> {
    let file = File::create(path).map_err(|e| export_err(path, e))?;
    let mut out = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        let n = field.points.len();
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "micropolar film fields")?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET STRUCTURED_GRID")?;
        writeln!(out, "DIMENSIONS {} {} {}", field.dims[0], field.dims[1], field.dims[2])?;
        writeln!(out, "POINTS {n} double")?;
        for p in &field.points {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
        }
        writeln!(out, "POINT_DATA {n}")?;
        writeln!(out, "VECTORS velocity double")?;
        for u in &field.velocity {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", u[0], u[1], u[2])?;
        }
        writeln!(out, "VECTORS microrotation double")?;
        for w in &field.microrotation {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", w[0], w[1], w[2])?;
        }
        writeln!(out, "SCALARS pressure double")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for p in &field.pressure {
            writeln!(out, "{p:.16e}")?;
        }
        out.flush()
    })()
    .map_err(|e| export_err(path, e))
}
