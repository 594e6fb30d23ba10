//! Line-delimited `id,value` tables. A first line whose first field is `id`
//! is a header and skipped; blank lines are ignored.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use cosmic_core::analysis::{Labels, Scores};

use super::{IoError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabelFile {
    pub labels: Labels,
    pub vocabulary: BTreeSet<String>,
}

fn read_rows<T>(path: &Path, mut parse: impl FnMut(&str, usize) -> Result<T>) -> Result<Vec<(String, T)>> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let Some((id, value)) = line.split_once(',') else {
            return Err(IoError::parse(path, line_no, "expected `id,value`"));
        };
        let (id, value) = (id.trim(), value.trim());
        if std::mem::take(&mut first) && id == "id" {
            continue;
        }
        if id.is_empty() {
            return Err(IoError::parse(path, line_no, "empty id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(IoError::data(path, cosmic_core::Error::DuplicateId(id.to_string())));
        }
        rows.push((id.to_string(), parse(value, line_no)?));
    }
    if rows.is_empty() {
        return Err(IoError::data(path, cosmic_core::Error::EmptyDataset));
    }
    Ok(rows)
}

/// Reads `id,label` rows; the vocabulary is the set of labels seen.
pub fn read_labels(path: &Path) -> Result<LabelFile> {
    let rows = read_rows(path, |v, line| {
        if v.is_empty() {
            Err(IoError::parse(path, line, "empty label"))
        } else {
            Ok(v.to_string())
        }
    })?;
    let vocabulary = rows.iter().map(|(_, l)| l.clone()).collect();
    Ok(LabelFile { labels: rows.into_iter().collect(), vocabulary })
}

/// Reads `id,value` rows with finite real values.
pub fn read_scores(path: &Path) -> Result<Scores> {
    let mut row = 0usize;
    let rows = read_rows(path, |v, line| {
        let x: f64 = v.parse().map_err(|_| IoError::parse(path, line, format!("`{v}` is not a number")))?;
        row += 1;
        if !x.is_finite() {
            return Err(IoError::data(path, cosmic_core::Error::NonFiniteValue { row: row - 1 }));
        }
        Ok(x)
    })?;
    Ok(rows.into_iter().collect())
}
