//! File formats: CEMB embedding matrices with their id sidecars, id-keyed
//! label and score tables, run manifests, and serialized estimator models.

mod cemb;
mod manifest;
mod model;
mod table;

use std::path::{Path, PathBuf};

pub use cemb::{ids_path, read_cemb, read_cemb_with_ids, write_cemb, CembHeader, CEMB_MAGIC, CEMB_VERSION, HEADER_LEN};
pub use manifest::{read_manifest, write_manifest, Manifest};
pub use model::{read_model, write_model, StoredModel};
pub use table::{read_labels, read_scores, LabelFile};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: bad magic bytes", path.display())]
    BadMagic { path: PathBuf },
    #[error("{}: unsupported format version {version}", path.display())]
    VersionUnsupported { path: PathBuf, version: u32 },
    #[error("{}: unsupported dtype {dtype}", path.display())]
    DtypeUnsupported { path: PathBuf, dtype: u8 },
    #[error("{}: truncated payload: expected {expected} bytes, found {found}", path.display())]
    TruncatedPayload { path: PathBuf, expected: u64, found: u64 },
    #[error("{}: {found} bytes after the expected {expected}-byte payload", path.display())]
    TrailingBytes { path: PathBuf, expected: u64, found: u64 },
    #[error("{}: {ids} ids for {rows} rows", path.display())]
    IdCount { path: PathBuf, ids: usize, rows: usize },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Data { path: PathBuf, source: cosmic_core::Error },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn data(path: &Path, source: cosmic_core::Error) -> Self {
        IoError::Data { path: path.to_path_buf(), source }
    }

    pub(crate) fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        IoError::Parse { path: path.to_path_buf(), line, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, IoError>;
