use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{ln, sqrt};
use crate::EmbeddingMatrix;

/// Per-dimension shift and scale mapping data to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub(crate) shift: Vec<f64>,
    pub(crate) scale: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Self { shift: alloc::vec![0.0; dim], scale: alloc::vec![1.0; dim] }
    }

    /// Fits on the given rows. Zero-variance dimensions keep scale 1 and
    /// produce a warning.
    pub fn fit(data: &EmbeddingMatrix, rows: &[usize], warnings: &mut Vec<String>) -> Self {
        let d = data.dim();
        let n = rows.len() as f64;
        let mut shift = alloc::vec![0.0; d];
        for &r in rows {
            for (m, x) in shift.iter_mut().zip(data.row(r)) {
                *m += x;
            }
        }
        shift.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; d];
        for &r in rows {
            for ((v, x), m) in var.iter_mut().zip(data.row(r)).zip(&shift) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = var
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let sd = sqrt(v / n);
                if sd > 0.0 {
                    sd
                } else {
                    warnings.push(format!("dimension {j} has zero variance; scale set to 1"));
                    1.0
                }
            })
            .collect();
        Self { shift, scale }
    }

    pub fn from_parts(shift: Vec<f64>, scale: Vec<f64>) -> Self {
        Self { shift, scale }
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (((o, x), m), s) in out.iter_mut().zip(x).zip(&self.shift).zip(&self.scale) {
            *o = (x - m) / s;
        }
    }

    /// `Σ_j ln scale_j`: the entropy shift back to original coordinates.
    pub fn log_det(&self) -> f64 {
        self.scale.iter().map(|s| ln(*s)).sum()
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }
}
