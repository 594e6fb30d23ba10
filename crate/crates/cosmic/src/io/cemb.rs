//! CEMB: little-endian embedding matrix.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CEMB"
//! 4       4     version (u32, = 1)
//! 8       8     n_rows (u64)
//! 16      8     dim (u64)
//! 24      1     dtype (u8, 0 = f32)
//! 25      ...   n_rows × dim f32 values, row-major
//! ```
//!
//! Row ids live in a sidecar `<path>.ids`, one UTF-8 id per line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cosmic_core::EmbeddingMatrix;

use super::{IoError, Result};

pub const CEMB_MAGIC: [u8; 4] = *b"CEMB";
pub const CEMB_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 25;
const DTYPE_F32: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CembHeader {
    pub version: u32,
    pub n_rows: u64,
    pub dim: u64,
    pub dtype: u8,
}

impl CembHeader {
    pub fn payload_len(&self) -> u64 {
        self.n_rows.saturating_mul(self.dim).saturating_mul(4)
    }

    fn to_bytes(self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&CEMB_MAGIC);
        out[4..8].copy_from_slice(&self.version.to_le_bytes());
        out[8..16].copy_from_slice(&self.n_rows.to_le_bytes());
        out[16..24].copy_from_slice(&self.dim.to_le_bytes());
        out[24] = self.dtype;
        out
    }

    fn parse(path: &Path, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || bytes[..4] != CEMB_MAGIC {
            return Err(IoError::BadMagic { path: path.to_path_buf() });
        }
        if bytes.len() < HEADER_LEN {
            return Err(IoError::TruncatedPayload {
                path: path.to_path_buf(),
                expected: HEADER_LEN as u64,
                found: bytes.len() as u64,
            });
        }
        let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        let header = CembHeader {
            version: u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")),
            n_rows: u64_at(8),
            dim: u64_at(16),
            dtype: bytes[24],
        };
        if header.version != CEMB_VERSION {
            return Err(IoError::VersionUnsupported { path: path.to_path_buf(), version: header.version });
        }
        if header.dtype != DTYPE_F32 {
            return Err(IoError::DtypeUnsupported { path: path.to_path_buf(), dtype: header.dtype });
        }
        Ok(header)
    }
}

/// `<path>.ids`.
pub fn ids_path(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".ids");
    PathBuf::from(s)
}

/// Reads a CEMB file and its `<path>.ids` sidecar.
pub fn read_cemb(path: &Path) -> Result<EmbeddingMatrix> {
    read_cemb_with_ids(path, &ids_path(path))
}

pub fn read_cemb_with_ids(path: &Path, ids: &Path) -> Result<EmbeddingMatrix> {
    let (header, values) = read_payload(path)?;
    let text = fs::read_to_string(ids).map_err(|e| IoError::io(ids, e))?;
    let ids_list: Vec<String> = text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect();
    if ids_list.len() as u64 != header.n_rows {
        return Err(IoError::IdCount { path: ids.to_path_buf(), ids: ids_list.len(), rows: header.n_rows as usize });
    }
    EmbeddingMatrix::from_f32(ids_list, header.dim as usize, &values).map_err(|e| IoError::data(path, e))
}

/// Header and raw values of a CEMB file.
pub(crate) fn read_payload(path: &Path) -> Result<(CembHeader, Vec<f32>)> {
    let bytes = fs::read(path).map_err(|e| IoError::io(path, e))?;
    let header = CembHeader::parse(path, &bytes)?;
    let expected = header.payload_len();
    let found = (bytes.len() - HEADER_LEN) as u64;
    if found < expected {
        return Err(IoError::TruncatedPayload { path: path.to_path_buf(), expected, found });
    }
    if found > expected {
        return Err(IoError::TrailingBytes { path: path.to_path_buf(), expected, found });
    }
    if header.n_rows == 0 || header.dim == 0 {
        return Err(IoError::data(path, cosmic_core::Error::EmptyDataset));
    }
    let values: Vec<f32> = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        let row = pos / header.dim as usize;
        return Err(IoError::data(path, cosmic_core::Error::NonFiniteValue { row }));
    }
    Ok((header, values))
}

/// Writes `matrix` as f32 CEMB plus the `<path>.ids` sidecar.
pub fn write_cemb(matrix: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let values: Vec<f32> = matrix.values().iter().map(|&v| v as f32).collect();
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(IoError::data(path, cosmic_core::Error::NonFiniteValue { row: pos / matrix.dim() }));
    }
    if let Some(bad) = matrix.ids().iter().find(|id| id.contains('\n') || id.contains('\r')) {
        return Err(IoError::data(path, cosmic_core::Error::OutOfRange(format!("id {bad:?} contains a line break"))));
    }
    let header = CembHeader {
        version: CEMB_VERSION,
        n_rows: matrix.n_rows() as u64,
        dim: matrix.dim() as u64,
        dtype: DTYPE_F32,
    };
    let mut bytes = Vec::with_capacity(HEADER_LEN + values.len() * 4);
    bytes.extend_from_slice(&header.to_bytes());
    for v in &values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_file(path, &bytes)?;
    let mut ids = String::new();
    for id in matrix.ids() {
        ids.push_str(id);
        ids.push('\n');
    }
    write_file(&ids_path(path), ids.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| IoError::io(path, e))
}
