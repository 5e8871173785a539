//! Binary field snapshots: one JSON header line, then raw little-endian
//! f64 pairs (re, im) for Ω̂ and Θ̂, row-major over η then k.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::spectral::field::SpectralField;
use crate::spectral::grid::Grid;
use crate::{Complex, Error, HypoConstants, PhysParams, Result};

const MAGIC: &str = "stratlab-snapshot";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotHeader {
    magic: String,
    version: u32,
    nk: usize,
    neta: usize,
    dk: f64,
    deta: f64,
    t: f64,
    params: PhysParams,
    consts: HypoConstants,
    payload_crc: u32,
}

/// CRC-32 (IEEE 802.3) over the payload bytes.
pub fn crc32(bytes: &[u8]) -> u32 {
    let mut table = [0u32; 256];
    for (i, entry) in table.iter_mut().enumerate() {
        let mut c = i as u32;
        for _ in 0..8 {
            c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
        }
        *entry = c;
    }
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bytes {
        crc = table[((crc ^ b as u32) & 0xFF) as usize] ^ (crc >> 8);
    }
    crc ^ 0xFFFF_FFFF
}

fn payload_bytes(field: &SpectralField) -> Vec<u8> {
    let g = &field.grid;
    let mut out = Vec::with_capacity(g.len() * 32);
    for arr in [&field.omega, &field.theta] {
        for ie in 0..g.neta {
            for ik in 0..g.nk {
                let v = arr[g.idx(ik, ie)];
                out.extend_from_slice(&v.re.to_le_bytes());
                out.extend_from_slice(&v.im.to_le_bytes());
            }
        }
    }
    out
}

/// Writes a snapshot of the field.
pub fn write_snapshot(field: &SpectralField, path: &Path) -> Result<()> {
    let payload = payload_bytes(field);
    let header = SnapshotHeader {
        magic: MAGIC.to_string(),
        version: VERSION,
        nk: field.grid.nk,
        neta: field.grid.neta,
        dk: field.grid.dk,
        deta: field.grid.deta,
        t: field.t,
        params: field.params,
        consts: field.consts,
        payload_crc: crc32(&payload),
    };
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    w.write_all(&payload)?;
    w.flush()?;
    Ok(())
}

/// Decodes a snapshot from raw bytes, verifying structure and checksum.
pub fn decode_snapshot(bytes: &[u8]) -> Result<SpectralField> {
    let newline = bytes
        .iter()
        .take(1 << 20)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Snapshot("missing header terminator".to_string()))?;
    let header: SnapshotHeader = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::Snapshot(format!("bad header: {e}")))?;
    if header.magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {:?}", header.magic)));
    }
    if header.version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {}", header.version)));
    }
    let count = header
        .nk
        .checked_mul(header.neta)
        .and_then(|n| n.checked_mul(32))
        .ok_or_else(|| Error::Snapshot("grid dimensions overflow".to_string()))?;
    if count > 1 << 31 {
        return Err(Error::Snapshot("payload exceeds 2 GiB".to_string()));
    }
    let payload = &bytes[newline + 1..];
    if payload.len() != count {
        return Err(Error::Snapshot(format!(
            "payload is {} bytes, header implies {count}",
            payload.len()
        )));
    }
    let crc = crc32(payload);
    if crc != header.payload_crc {
        return Err(Error::Snapshot(format!(
            "payload checksum mismatch: got {crc:#010x}, header says {:#010x}",
            header.payload_crc
        )));
    }

    let grid = Grid::new(header.nk, header.neta, header.dk, header.deta)
        .map_err(|e| Error::Snapshot(format!("bad grid in header: {e}")))?;
    if !(header.t.is_finite() && header.t >= 0.0) {
        return Err(Error::Snapshot(format!("bad snapshot time {}", header.t)));
    }
    let mut field = SpectralField::zero(grid, header.params, header.consts);
    field.t = header.t;
    let g = field.grid.clone();
    let mut offset = 0usize;
    let mut read_f64 = |payload: &[u8]| -> f64 {
        let v = f64::from_le_bytes(payload[offset..offset + 8].try_into().unwrap());
        offset += 8;
        v
    };
    for arr_idx in 0..2 {
        for ie in 0..g.neta {
            for ik in 0..g.nk {
                let re = read_f64(payload);
                let im = read_f64(payload);
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Snapshot(format!(
                        "non-finite coefficient at (ik={ik}, ie={ie})"
                    )));
                }
                let v = Complex::new(re, im);
                if arr_idx == 0 {
                    field.omega[g.idx(ik, ie)] = v;
                } else {
                    field.theta[g.idx(ik, ie)] = v;
                }
            }
        }
    }
    Ok(field)
}

/// Reads a snapshot file back into a field.
pub fn read_snapshot(path: &Path) -> Result<SpectralField> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_snapshot(&bytes)
}
