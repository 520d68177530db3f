//! Flat field serialization.
//!
//! Binary layout (little endian): magic `KFLD`, `u32` version, `u32` dim,
//! `u32` n, `f64` length, then `n^dim` `f64` samples in row-major order.
//!
//! CSV layout: a `dim,n,length` header row, one row with those values,
//! then one sample per row in row-major order. Samples are written with the
//! shortest representation that parses back to the same `f64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Field, Grid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"KFLD";
const VERSION: u32 = 1;

pub fn write_binary<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let length = read_f64(&mut r)?;
    let grid = Grid::new(dim, n, length)?;
    let mut values = Vec::with_capacity(grid.nodes());
    for _ in 0..grid.nodes() {
        values.push(read_f64(&mut r)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after samples".into()));
    }
    Field::new(grid, values)
}

pub fn write_csv<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    writeln!(w, "dim,n,length")?;
    writeln!(w, "{},{},{}", g.dim(), g.n(), g.length())?;
    for v in field.values() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Field> {
    let mut lines = BufReader::new(r).lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Format("unexpected end of csv".into()))?
            .map_err(Error::from)
    };
    if next()?.trim() != "dim,n,length" {
        return Err(Error::Format("missing csv header".into()));
    }
    let header = next()?;
    let parts: Vec<&str> = header.trim().split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Format("header row needs dim,n,length".into()));
    }
    let parse_err = |e: &dyn std::fmt::Display| Error::Format(e.to_string());
    let dim: usize = parts[0].parse().map_err(|e| parse_err(&e))?;
    let n: usize = parts[1].parse().map_err(|e| parse_err(&e))?;
    let length: f64 = parts[2].parse().map_err(|e| parse_err(&e))?;
    let grid = Grid::new(dim, n, length)?;
    let mut values = Vec::with_capacity(grid.nodes());
    for _ in 0..grid.nodes() {
        values.push(next()?.trim().parse::<f64>().map_err(|e| parse_err(&e))?);
    }
    Field::new(grid, values)
}

pub fn save_binary(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_binary(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Field> {
    read_binary(BufReader::new(File::open(path)?))
}

pub fn save_csv(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Field> {
    read_csv(File::open(path)?)
}
