//! Binary field snapshots.
//!
//! Format (all little-endian): the magic bytes `QGF1`, the grid size `n` as
//! `u32`, the period as `f64`, a one-byte payload kind (0 = real samples,
//! 1 = spectral coefficients), then `n*n` samples row-major — plain `f64`
//! for real fields, `re, im` pairs for spectral ones. Bit pattern in equals
//! bit pattern out, so a write/read roundtrip is exact, not merely close.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField};
use crate::grid::Grid2D;

const MAGIC: &[u8; 4] = b"QGF1";
const KIND_REAL: u8 = 0;
const KIND_SPECTRAL: u8 = 1;

/// A field deserialized from disk, in whichever representation it was saved.
#[derive(Debug, Clone)]
pub enum Snapshot {
    Real(RealField),
    Spectral(SpectralField),
}

pub fn write_real(path: impl AsRef<Path>, field: &RealField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, field.grid(), KIND_REAL)?;
    for &v in field.samples() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectral(path: impl AsRef<Path>, field: &SpectralField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, field.grid(), KIND_SPECTRAL)?;
    for c in field.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_real(path: impl AsRef<Path>) -> Result<RealField> {
    match read_snapshot(path)? {
        Snapshot::Real(f) => Ok(f),
        Snapshot::Spectral(_) => Err(Error::Snapshot(
            "expected a real-sample snapshot, found spectral coefficients".into(),
        )),
    }
}

pub fn read_spectral(path: impl AsRef<Path>) -> Result<SpectralField> {
    match read_snapshot(path)? {
        Snapshot::Spectral(f) => Ok(f),
        Snapshot::Real(_) => Err(Error::Snapshot(
            "expected a spectral snapshot, found real samples".into(),
        )),
    }
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!(
            "bad magic {magic:?}; not a QGF1 snapshot"
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf) as usize;
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let period = f64::from_le_bytes(f64buf);
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let grid = Grid2D::new(n, period, Grid2D::DEFAULT_DEALIAS)
        .map_err(|e| Error::Snapshot(format!("snapshot header invalid: {e}")))?;
    match kind[0] {
        KIND_REAL => {
            let mut samples = Vec::with_capacity(grid.len());
            for _ in 0..grid.len() {
                r.read_exact(&mut f64buf)?;
                samples.push(f64::from_le_bytes(f64buf));
            }
            expect_eof(&mut r)?;
            Ok(Snapshot::Real(RealField::from_samples(grid, samples)?))
        }
        KIND_SPECTRAL => {
            let mut coeffs = Vec::with_capacity(grid.len());
            for _ in 0..grid.len() {
                r.read_exact(&mut f64buf)?;
                let re = f64::from_le_bytes(f64buf);
                r.read_exact(&mut f64buf)?;
                let im = f64::from_le_bytes(f64buf);
                coeffs.push(Complex::new(re, im));
            }
            expect_eof(&mut r)?;
            Ok(Snapshot::Spectral(SpectralField::from_coeffs(grid, coeffs)?))
        }
        k => Err(Error::Snapshot(format!("unknown payload kind {k}"))),
    }
}

fn write_header(w: &mut impl Write, grid: &Grid2D, kind: u8) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.period().to_le_bytes())?;
    w.write_all(&[kind])?;
    Ok(())
}

fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Snapshot("trailing bytes after payload".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::transform_forward;
    use crate::rng::random_bandlimited;

    #[test]
    fn real_roundtrip_is_bit_exact() {
        let grid = Grid2D::square(32).unwrap();
        let f = random_bandlimited(grid, 9, 1, 10, 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.qgf");
        write_real(&path, &f).unwrap();
        let g = read_real(&path).unwrap();
        assert_eq!(g.grid().n(), 32);
        for (a, b) in f.samples().iter().zip(g.samples()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn spectral_roundtrip_is_bit_exact() {
        let grid = Grid2D::square(16).unwrap();
        let f = random_bandlimited(grid, 5, 1, 5, 0.7).unwrap();
        let fh = transform_forward(&f).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.qgf");
        write_spectral(&path, &fh).unwrap();
        let gh = read_spectral(&path).unwrap();
        for (a, b) in fh.coeffs().iter().zip(gh.coeffs()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn kind_mismatch_and_corruption_are_rejected() {
        let grid = Grid2D::square(16).unwrap();
        let f = RealField::from_fn(grid, |x1, x2| x1.sin() + x2.cos());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.qgf");
        write_real(&path, &f).unwrap();
        assert!(read_spectral(&path).is_err());

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        let bad = dir.path().join("bad.qgf");
        std::fs::write(&bad, &bytes).unwrap();
        assert!(read_snapshot(&bad).is_err());

        let mut truncated = std::fs::read(&path).unwrap();
        truncated.truncate(truncated.len() - 3);
        let short = dir.path().join("short.qgf");
        std::fs::write(&short, &truncated).unwrap();
        assert!(read_snapshot(&short).is_err());

        let mut padded = std::fs::read(&path).unwrap();
        padded.push(0);
        let long = dir.path().join("long.qgf");
        std::fs::write(&long, &padded).unwrap();
        assert!(read_snapshot(&long).is_err());
    }
}
