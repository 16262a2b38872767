//! Binary field snapshots and CSV cross-sections.
//!
//! Snapshot layout (little endian): magic `DWF1`, `nx: u64`, `ny: u64`,
//! `lx: f64`, `ly: f64`, kind tag `u64` (0 real, 1 complex), then samples in
//! row-major `[ix][iy]` order (complex samples as `re, im`).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{ComplexField, RealField};
use super::grid::Grid2D;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DWF1";

/// A snapshot read back from disk.
#[derive(Clone, Debug)]
pub enum Snapshot {
    Real(RealField),
    Complex(ComplexField),
}

impl Snapshot {
    pub fn grid(&self) -> &Grid2D {
        match self {
            Snapshot::Real(f) => f.grid(),
            Snapshot::Complex(f) => f.grid(),
        }
    }
}

fn write_header(w: &mut impl Write, grid: &Grid2D, kind: u64) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(grid.nx() as u64).to_le_bytes())?;
    w.write_all(&(grid.ny() as u64).to_le_bytes())?;
    w.write_all(&grid.lx().to_le_bytes())?;
    w.write_all(&grid.ly().to_le_bytes())?;
    w.write_all(&kind.to_le_bytes())?;
    Ok(())
}

pub fn write_real(w: &mut impl Write, f: &RealField) -> Result<()> {
    write_header(w, f.grid(), 0)?;
    for v in f.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_complex(w: &mut impl Write, f: &ComplexField) -> Result<()> {
    write_header(w, f.grid(), 1)?;
    for c in f.as_slice() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_snapshot(r: &mut impl Read) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let nx = read_u64(r)? as usize;
    let ny = read_u64(r)? as usize;
    let lx = read_f64(r)?;
    let ly = read_f64(r)?;
    let kind = read_u64(r)?;
    let grid = Grid2D::new(nx, ny, lx, ly)?;
    let n = grid.len();
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let vals: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    match kind {
        0 if vals.len() == n && body.len() == 8 * n => {
            Ok(Snapshot::Real(RealField::from_vec(&grid, vals)?))
        }
        1 if vals.len() == 2 * n && body.len() == 16 * n => {
            let data = vals
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            Ok(Snapshot::Complex(ComplexField::from_vec(&grid, data)?))
        }
        0 | 1 => Err(Error::Format(format!(
            "expected {} samples, found {} bytes",
            n,
            body.len()
        ))),
        k => Err(Error::Format(format!("unknown field kind {k}"))),
    }
}

pub fn save_real(path: impl AsRef<Path>, f: &RealField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_real(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn save_complex(path: impl AsRef<Path>, f: &ComplexField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_complex(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Snapshot> {
    read_snapshot(&mut BufReader::new(File::open(path)?))
}

/// `x,value` rows along the line `iy` with 17 significant digits.
pub fn write_cross_section_csv(w: &mut impl Write, f: &RealField, iy: usize) -> Result<()> {
    writeln!(w, "x,value")?;
    for (x, v) in f.cross_section_x(iy) {
        writeln!(w, "{},{}", fmt17(x), fmt17(v))?;
    }
    Ok(())
}

/// Format with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
