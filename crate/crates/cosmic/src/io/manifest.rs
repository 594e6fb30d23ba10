//! Run manifest: `key: value` lines, then an optional `extra:` block of
//! indented `key: value` lines. `#` starts a comment line. Relative paths
//! resolve against the manifest's directory.
//!
//! ```text
//! dataset_name: cnn_dailymail
//! embedder_name: WhereIsAI/UAE-Large-V1
//! summarizer_name: facebook/bart-large-cnn
//! embedding_file: bart.cemb
//! ids_file: bart.cemb.ids
//! created_by: embed-client 0.1
//! extra:
//!   max_tokens: 512
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cosmic_core::EmbeddingMatrix;

use super::{read_cemb_with_ids, IoError, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub dataset_name: String,
    pub embedder_name: String,
    pub summarizer_name: String,
    pub embedding_file: PathBuf,
    pub ids_file: PathBuf,
    pub created_by: String,
    pub extra: BTreeMap<String, String>,
}

impl Manifest {
    /// Loads the referenced embeddings; the id count must match the header.
    pub fn load_embeddings(&self) -> Result<EmbeddingMatrix> {
        read_cemb_with_ids(&self.embedding_file, &self.ids_file)
    }
}

const REQUIRED: [&str; 5] = ["dataset_name", "embedder_name", "summarizer_name", "embedding_file", "ids_file"];

/// Parses a manifest, resolving file paths against its directory.
pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut fields = BTreeMap::new();
    let mut extra = BTreeMap::new();
    let mut in_extra = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let indented = raw.starts_with(' ') || raw.starts_with('\t');
        let Some((key, value)) = raw.trim().split_once(':') else {
            return Err(IoError::parse(path, line_no, "expected `key: value`"));
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if in_extra && indented {
            extra.insert(key, value);
            continue;
        }
        in_extra = false;
        if key == "extra" && value.is_empty() {
            in_extra = true;
        } else if !REQUIRED.contains(&key.as_str()) && key != "created_by" {
            return Err(IoError::parse(path, line_no, format!("unknown key `{key}`")));
        } else if fields.insert(key.clone(), value).is_some() {
            return Err(IoError::parse(path, line_no, format!("duplicate key `{key}`")));
        }
    }
    for key in REQUIRED {
        if fields.get(key).is_none_or(|v| v.is_empty()) {
            return Err(IoError::parse(path, 0, format!("missing `{key}`")));
        }
    }
    let mut take = |k: &str| fields.remove(k).unwrap_or_default();
    Ok(Manifest {
        dataset_name: take("dataset_name"),
        embedder_name: take("embedder_name"),
        summarizer_name: take("summarizer_name"),
        embedding_file: base.join(take("embedding_file")),
        ids_file: base.join(take("ids_file")),
        created_by: take("created_by"),
        extra,
    })
}

/// Writes a manifest; paths are written as given.
pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (k, v) in [
        ("dataset_name", manifest.dataset_name.as_str()),
        ("embedder_name", &manifest.embedder_name),
        ("summarizer_name", &manifest.summarizer_name),
        ("embedding_file", &manifest.embedding_file.to_string_lossy()),
        ("ids_file", &manifest.ids_file.to_string_lossy()),
        ("created_by", &manifest.created_by),
    ] {
        out.push_str(&format!("{k}: {v}\n"));
    }
    if !manifest.extra.is_empty() {
        out.push_str("extra:\n");
        for (k, v) in &manifest.extra {
            out.push_str(&format!("  {k}: {v}\n"));
        }
    }
    super::cemb::write_file(path, out.as_bytes())
}
