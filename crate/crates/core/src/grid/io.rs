//! `SRDP` table files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "SRDP"                    4 bytes
//! version                   u32 (currently 1)
//! axis count                u32
//! per axis: lo f64, hi f64, count u32, periodic u8
//! stage                     u32
//! payload                   f64 per node (value table) or u32 per node (policy table)
//! ```
//!
//! The payload is in row-major node order, axis 0 slowest.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{Axis, GridSpec, PolicyTable, ValueTable};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SRDP";
pub const VERSION: u32 = 1;

fn write_header(out: &mut Vec<u8>, grid: &GridSpec, stage: usize) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for axis in grid.axes() {
        out.extend_from_slice(&axis.lo.to_le_bytes());
        out.extend_from_slice(&axis.hi.to_le_bytes());
        out.extend_from_slice(&(axis.count as u32).to_le_bytes());
        out.push(axis.periodic as u8);
    }
    out.extend_from_slice(&(stage as u32).to_le_bytes());
}

pub fn encode_values(table: &ValueTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 8 * table.values.len());
    write_header(&mut out, &table.grid, table.stage);
    for v in &table.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode_policy(table: &PolicyTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 4 * table.choices.len());
    write_header(&mut out, &table.grid, table.stage);
    for c in &table.choices {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }

    fn u8(&mut self) -> Result<u8> {
        self.take::<1>().map(|b| b[0])
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

fn read_header(cur: &mut Cursor) -> Result<(GridSpec, usize)> {
    if &cur.take::<4>()? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dims = cur.u32()? as usize;
    let mut axes = Vec::with_capacity(dims.min(super::MAX_DIM));
    for _ in 0..dims {
        let lo = cur.f64()?;
        let hi = cur.f64()?;
        let count = cur.u32()? as usize;
        let periodic = match cur.u8()? {
            0 => false,
            1 => true,
            other => return Err(Error::Format(format!("bad periodic flag {other}"))),
        };
        axes.push(Axis {
            lo,
            hi,
            count,
            periodic,
        });
    }
    let grid = GridSpec::new(axes)?;
    let stage = cur.u32()? as usize;
    Ok((grid, stage))
}

pub fn decode_values(bytes: &[u8]) -> Result<ValueTable> {
    let mut cur = Cursor { bytes, pos: 0 };
    let (grid, stage) = read_header(&mut cur)?;
    if cur.remaining() != 8 * grid.len() {
        return Err(Error::Format(format!(
            "expected {} value bytes, found {}",
            8 * grid.len(),
            cur.remaining()
        )));
    }
    let values = (0..grid.len()).map(|_| cur.f64()).collect::<Result<_>>()?;
    ValueTable::new(grid, stage, values)
}

pub fn decode_policy(bytes: &[u8]) -> Result<PolicyTable> {
    let mut cur = Cursor { bytes, pos: 0 };
    let (grid, stage) = read_header(&mut cur)?;
    if cur.remaining() != 4 * grid.len() {
        return Err(Error::Format(format!(
            "expected {} choice bytes, found {}",
            4 * grid.len(),
            cur.remaining()
        )));
    }
    let choices = (0..grid.len()).map(|_| cur.u32()).collect::<Result<_>>()?;
    PolicyTable::new(grid, stage, choices)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

pub fn save_values(path: &Path, table: &ValueTable) -> Result<()> {
    write_bytes(path, &encode_values(table))
}

pub fn load_values(path: &Path) -> Result<ValueTable> {
    decode_values(&read_bytes(path)?)
}

pub fn save_policy(path: &Path, table: &PolicyTable) -> Result<()> {
    write_bytes(path, &encode_policy(table))
}

pub fn load_policy(path: &Path) -> Result<PolicyTable> {
    decode_policy(&read_bytes(path)?)
}
