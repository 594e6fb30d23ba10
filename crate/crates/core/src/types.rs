//! Embedding matrices and id-aligned source/summary pairs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// `n_rows × dim` embeddings in row-major order, one string id per row.
///
/// Values are always finite. Ids are expected to be unique; that is checked
/// where rows get paired ([`validate_pairing`]) and reported by
/// [`EmbeddingMatrix::duplicate_ids`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    values: Vec<f64>,
    ids: Vec<String>,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<String>, dim: usize, values: Vec<f64>) -> Result<Self> {
        if ids.is_empty() || dim == 0 {
            return Err(Error::EmptyDataset);
        }
        if values.len() != ids.len() * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} rows of dimension {}",
                values.len(),
                ids.len(),
                dim
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: pos / dim });
        }
        Ok(Self { dim, values, ids })
    }

    /// Builds from 32-bit storage values, promoting to 64-bit.
    pub fn from_f32(ids: Vec<String>, dim: usize, values: &[f32]) -> Result<Self> {
        Self::new(ids, dim, values.iter().map(|&v| f64::from(v)).collect())
    }

    /// Rows get ids `"0"`, `"1"`, ... in order.
    pub fn with_index_ids(dim: usize, values: Vec<f64>) -> Result<Self> {
        let n = values.len().checked_div(dim).unwrap_or(0);
        Self::new((0..n).map(|i| format!("{i}")).collect(), dim, values)
    }

    pub fn n_rows(&self) -> usize {
        self.ids.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn duplicate_ids(&self) -> Vec<&str> {
        let mut seen = BTreeMap::new();
        let mut dups = Vec::new();
        for id in &self.ids {
            let count = seen.entry(id.as_str()).or_insert(0usize);
            *count += 1;
            if *count == 2 {
                dups.push(id.as_str());
            }
        }
        dups
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * self.dim);
        let mut ids = Vec::with_capacity(rows.len());
        for &r in rows {
            values.extend_from_slice(self.row(r));
            ids.push(self.ids[r].clone());
        }
        Self::new(ids, self.dim, values)
    }

    /// Applies `x ↦ scale[j]·x + shift[j]` to every column `j`.
    pub fn affine(&self, scale: &[f64], shift: &[f64]) -> Result<Self> {
        if scale.len() != self.dim || shift.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: scale.len().min(shift.len()) });
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let j = k % self.dim;
                scale[j] * v + shift[j]
            })
            .collect();
        Self::new(self.ids.clone(), self.dim, values)
    }
}

/// Source embeddings `T` and summary embeddings `S`, aligned row for row.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    source: EmbeddingMatrix,
    summary: EmbeddingMatrix,
}

impl PairedDataset {
    pub fn source(&self) -> &EmbeddingMatrix {
        &self.source
    }

    pub fn summary(&self) -> &EmbeddingMatrix {
        &self.summary
    }

    pub fn n_rows(&self) -> usize {
        self.source.n_rows()
    }

    /// The same pairs with the roles of the two sides exchanged.
    pub fn swapped(&self) -> PairedDataset {
        PairedDataset { source: self.summary.clone(), summary: self.source.clone() }
    }

    pub fn into_parts(self) -> (EmbeddingMatrix, EmbeddingMatrix) {
        (self.source, self.summary)
    }
}

/// Pairs rows of `summary` with rows of `source` by id.
///
/// The result keeps the source row order and permutes summary rows to match.
/// Fails with [`Error::MismatchedIds`] unless the ids form a bijection.
pub fn validate_pairing(source: EmbeddingMatrix, summary: EmbeddingMatrix) -> Result<PairedDataset> {
    if source.n_rows() == 0 || summary.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if let Some(dup) = source.duplicate_ids().first().or(summary.duplicate_ids().first()) {
        return Err(Error::MismatchedIds(format!("duplicate id `{dup}`")));
    }
    if source.n_rows() != summary.n_rows() {
        return Err(Error::MismatchedIds(format!(
            "{} source rows vs {} summary rows",
            source.n_rows(),
            summary.n_rows()
        )));
    }
    let index: BTreeMap<&str, usize> =
        summary.ids().iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut order = Vec::with_capacity(source.n_rows());
    for id in source.ids() {
        match index.get(id.as_str()) {
            Some(&i) => order.push(i),
            None => return Err(Error::MismatchedIds(format!("id `{id}` missing from summaries"))),
        }
    }
    let identity = order.iter().enumerate().all(|(a, &b)| a == b);
    let summary = if identity { summary } else { summary.select_rows(&order)? };
    Ok(PairedDataset { source, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn matrix(names: &[&str], dim: usize) -> EmbeddingMatrix {
        let n = names.len();
        let values = (0..n * dim).map(|k| k as f64).collect();
        EmbeddingMatrix::new(ids(names), dim, values).unwrap()
    }

    #[test]
    fn pairing_reorders_summary_rows() {
        let source = matrix(&["a", "b", "c"], 4);
        let summary = matrix(&["c", "a", "b"], 8);
        let pairs = validate_pairing(source, summary.clone()).unwrap();
        assert_eq!(pairs.summary().ids(), &ids(&["a", "b", "c"])[..]);
        assert_eq!(pairs.summary().row(0), summary.row(1));
        assert_eq!(pairs.summary().row(2), summary.row(0));
        assert_eq!(pairs.summary().dim(), 8);
    }

    #[test]
    fn duplicate_id_is_a_mismatch() {
        let source = matrix(&["a", "b"], 2);
        let summary = matrix(&["a", "a"], 2);
        assert!(matches!(validate_pairing(source, summary), Err(Error::MismatchedIds(_))));
    }

    #[test]
    fn missing_id_is_a_mismatch() {
        let source = matrix(&["a", "b"], 2);
        let summary = matrix(&["a", "z"], 2);
        assert!(matches!(validate_pairing(source, summary), Err(Error::MismatchedIds(_))));
    }

    #[test]
    fn nan_reports_its_row() {
        let mut values = vec![0.0; 7 * 3];
        values[5 * 3 + 1] = f64::NAN;
        let err = EmbeddingMatrix::with_index_ids(3, values).unwrap_err();
        assert_eq!(err, Error::NonFiniteValue { row: 5 });
    }

    #[test]
    fn empty_matrix_rejected() {
        assert_eq!(EmbeddingMatrix::new(vec![], 3, vec![]), Err(Error::EmptyDataset));
    }

    #[test]
    fn pairing_is_idempotent() {
        let pairs = validate_pairing(matrix(&["x", "y", "z"], 2), matrix(&["z", "x", "y"], 3)).unwrap();
        let (s, t) = pairs.clone().into_parts();
        let again = validate_pairing(s, t).unwrap();
        assert_eq!(again, pairs);
    }
}
