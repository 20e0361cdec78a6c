//! Binary snapshot of a [`FieldSequence`].
//!
//! Layout, all little-endian:
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 8 | tag `CESAROSQ` |
//! | 8  | 4 | format version (`u32`) |
//! | 12 | 4 | space dimension `d` |
//! | 16 | 4 | cells along `x1` |
//! | 20 | 4 | cells along `x2` (1 when `d = 1`) |
//! | 24 | 4 | time steps |
//! | 28 | 4 | state dimension `D` |
//! | 32 | 8 | sequence length `N_max` (`u64`) |
//! | 40 | 8 | final time `T` (`f64`) |
//! | 48 | 8 | `L1` |
//! | 56 | 8 | `L2` |
//!
//! The payload follows in `(n, t, x1[, x2], component)` order as `f64`, then a
//! 64-bit FNV-1a checksum of header and payload.

use std::fs;
use std::path::Path;

use cesaro_core::field::{FieldSequence, Grid};

pub const TAG: [u8; 8] = *b"CESAROSQ";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("unsupported snapshot tag or version (version field {found})")]
    Version { found: u32 },
    #[error("snapshot length mismatch: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("snapshot checksum mismatch")]
    Checksum,
    #[error("snapshot header describes an invalid grid: {0}")]
    Header(#[from] cesaro_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

fn u32_field(v: usize, name: &'static str) -> Result<u32, SnapshotError> {
    u32::try_from(v).map_err(|_| {
        SnapshotError::Header(cesaro_core::Error::InvalidArgument {
            name,
            reason: "exceeds the u32 header field".into(),
        })
    })
}

pub fn encode(seq: &FieldSequence) -> Result<Vec<u8>, SnapshotError> {
    let grid = seq.grid();
    let cells = grid.cells_per_dim();
    let lengths = grid.lengths();
    let mut out = Vec::with_capacity(HEADER_LEN + seq.values().len() * 8 + 8);
    out.extend_from_slice(&TAG);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&u32_field(grid.space_dim(), "space_dim")?.to_le_bytes());
    out.extend_from_slice(&u32_field(cells[0], "cells")?.to_le_bytes());
    out.extend_from_slice(&u32_field(cells[1], "cells")?.to_le_bytes());
    out.extend_from_slice(&u32_field(grid.time_steps(), "time_steps")?.to_le_bytes());
    out.extend_from_slice(&u32_field(seq.dim(), "dim")?.to_le_bytes());
    out.extend_from_slice(&(seq.len() as u64).to_le_bytes());
    out.extend_from_slice(&grid.final_time().to_le_bytes());
    out.extend_from_slice(&lengths[0].to_le_bytes());
    out.extend_from_slice(&lengths[1].to_le_bytes());
    debug_assert_eq!(out.len(), HEADER_LEN);
    for v in seq.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let sum = fnv1a(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    Ok(out)
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<FieldSequence, SnapshotError> {
    if bytes.len() < HEADER_LEN {
        // too short to even carry a tag: report as a header problem if the tag is wrong
        if bytes.len() < 12 || bytes[..8] != TAG {
            return Err(SnapshotError::Version { found: 0 });
        }
        return Err(SnapshotError::Length { expected: HEADER_LEN + 8, found: bytes.len() });
    }
    let version = read_u32(bytes, 8);
    if bytes[..8] != TAG || version != VERSION {
        return Err(SnapshotError::Version { found: version });
    }
    let space_dim = read_u32(bytes, 12) as usize;
    let cells = [read_u32(bytes, 16) as usize, read_u32(bytes, 20) as usize];
    let time_steps = read_u32(bytes, 24) as usize;
    let dim = read_u32(bytes, 28) as usize;
    let len = read_u64(bytes, 32) as usize;
    let grid =
        Grid::new(space_dim, cells, time_steps, read_f64(bytes, 40), [read_f64(bytes, 48), read_f64(bytes, 56)])?;
    let count = len
        .checked_mul(grid.cells())
        .and_then(|c| c.checked_mul(dim))
        .ok_or(SnapshotError::Length { expected: usize::MAX, found: bytes.len() })?;
    let expected = HEADER_LEN + count * 8 + 8;
    if bytes.len() != expected {
        return Err(SnapshotError::Length { expected, found: bytes.len() });
    }
    let body = &bytes[..expected - 8];
    if fnv1a(body) != read_u64(bytes, expected - 8) {
        return Err(SnapshotError::Checksum);
    }
    let values = body[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(FieldSequence::new(grid, dim, values)?)
}

pub fn save(path: &Path, seq: &FieldSequence) -> Result<(), SnapshotError> {
    let bytes = encode(seq)?;
    fs::write(path, bytes).map_err(|source| SnapshotError::Io { path: path.display().to_string(), source })
}

pub fn load(path: &Path) -> Result<FieldSequence, SnapshotError> {
    let bytes = fs::read(path).map_err(|source| SnapshotError::Io { path: path.display().to_string(), source })?;
    decode(&bytes)
}
