//! Spectral state snapshots.
//!
//! Binary layout (little endian): the 8-byte magic `KGSNAP01`, `N` as u64,
//! then for each of the 2N slots in FFT order `Re û, Im û, Re v̂, Im v̂`.
//! The CSV layout has header `mode,u_re,u_im,v_re,v_im` and one line per
//! slot. Both round-trip the coefficients bit for bit.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::config::SnapshotFormat;
use crate::error::{KgError, Result};
use crate::grid::{Grid, SpectralField, StateU};

const MAGIC: &[u8; 8] = b"KGSNAP01";

pub fn write_snapshot(path: &Path, state: &StateU, format: SnapshotFormat) -> Result<()> {
    match format {
        SnapshotFormat::Binary => write_binary(path, state),
        SnapshotFormat::Csv => write_csv(path, state),
    }
}

fn write_binary(path: &Path, state: &StateU) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(state.grid().n() as u64).to_le_bytes())?;
    for (a, b) in state.u.coeffs().iter().zip(state.v.coeffs()) {
        for x in [a.re, a.im, b.re, b.im] {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_csv(path: &Path, state: &StateU) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["mode", "u_re", "u_im", "v_re", "v_im"])
        .map_err(csv_err)?;
    let grid = state.grid();
    for (i, (a, b)) in state.u.coeffs().iter().zip(state.v.coeffs()).enumerate() {
        w.write_record(&[
            grid.mode(i).to_string(),
            a.re.to_string(),
            a.im.to_string(),
            b.re.to_string(),
            b.im.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads either format, telling them apart by the magic bytes.
pub fn read_snapshot(path: &Path) -> Result<StateU> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes)
    } else {
        read_csv(&bytes)
    }
}

fn corrupt(msg: impl Into<String>) -> KgError {
    KgError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, msg.into()))
}

fn csv_err(e: csv::Error) -> KgError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => KgError::Io(io),
        other => corrupt(format!("{other:?}")),
    }
}

fn assemble(n: usize, u: Vec<Complex64>, v: Vec<Complex64>) -> Result<StateU> {
    let grid = Grid::new(n)?;
    StateU::new(
        SpectralField::from_coeffs(&grid, u)?,
        SpectralField::from_coeffs(&grid, v)?,
    )
}

fn read_binary(bytes: &[u8]) -> Result<StateU> {
    let word = |k: usize| -> Result<[u8; 8]> {
        bytes
            .get(8 * k..8 * k + 8)
            .map(|s| s.try_into().unwrap())
            .ok_or_else(|| corrupt("snapshot truncated"))
    };
    let n = u64::from_le_bytes(word(1)?) as usize;
    if bytes.len() != 16 + 64 * n {
        return Err(corrupt(format!("snapshot length {} does not fit N = {n}", bytes.len())));
    }
    let f = |k: usize| f64::from_le_bytes(word(k).unwrap());
    let (mut u, mut v) = (Vec::with_capacity(2 * n), Vec::with_capacity(2 * n));
    for i in 0..2 * n {
        let k = 2 + 4 * i;
        u.push(Complex64::new(f(k), f(k + 1)));
        v.push(Complex64::new(f(k + 2), f(k + 3)));
    }
    assemble(n, u, v)
}

fn read_csv(bytes: &[u8]) -> Result<StateU> {
    let mut r = csv::Reader::from_reader(bytes);
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let x: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|e| corrupt(e.to_string())))
            .collect::<Result<_>>()?;
        if x.len() != 4 {
            return Err(corrupt("snapshot row needs five columns"));
        }
        u.push(Complex64::new(x[0], x[1]));
        v.push(Complex64::new(x[2], x[3]));
    }
    if u.len() % 2 != 0 {
        return Err(corrupt("odd number of snapshot rows"));
    }
    assemble(u.len() / 2, u, v)
}
